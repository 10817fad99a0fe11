"""Service API: round lifecycle, SSE streaming, submissions, isolation."""

import json
import time

import pytest
from fastapi.testclient import TestClient

from debatesim.arguments import canonical_json, transcript_to_dict
from debatesim.config import CliConfig
from debatesim.events import event_from_dict
from debatesim.service import create_app

from conftest import FIXTURES
from replay import reconstruct_transcript_dict


@pytest.fixture
def service_config(tmp_path):
    base = json.loads((FIXTURES / "config.json").read_text(encoding="utf-8"))
    return CliConfig(
        corpus=str(FIXTURES / "cards.ndjson"),
        index=str(FIXTURES / "index.json"),
        output_dir=str(tmp_path / "out"),
        mock_script=str(FIXTURES / "full_round.script.json"),
        resolution=base["resolution"],
        profiles=base["profiles"],
        speech_profile=base["speech_profile"],
        judges=base["judges"],
    )


@pytest.fixture
def client(service_config, round_corpus, round_index):
    app = create_app(service_config, corpus=round_corpus, index=round_index)
    with TestClient(app) as test_client:
        yield test_client


def wait_for_status(client, round_id, wanted, timeout=30.0):
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        status = client.get(f"/rounds/{round_id}").json()["status"]
        if status in wanted:
            return status
        time.sleep(0.02)
    raise AssertionError(f"round {round_id} never reached {wanted}")


def parse_sse(text: str) -> list[dict]:
    events = []
    for chunk in text.split("\n\n"):
        data_lines = [line[6:] for line in chunk.splitlines() if line.startswith("data: ")]
        if data_lines:
            events.append(json.loads("\n".join(data_lines)))
    return events


def collect_events(client, round_id, from_sequence=0):
    with client.stream("GET", f"/rounds/{round_id}/events", params={"from_sequence": from_sequence}) as resp:
        assert resp.status_code == 200
        body = "".join(resp.iter_text())
    return parse_sse(body)


def start_round(client, resolution="Resolved: test the service.", **kwargs):
    resp = client.post("/rounds", json={"resolution": resolution, **kwargs})
    assert resp.status_code == 200, resp.text
    return resp.json()["round_id"]


class TestRoundLifecycle:
    def test_create_then_complete_with_full_stream(self, client):
        round_id = start_round(client)
        wait_for_status(client, round_id, {"complete"})
        events = collect_events(client, round_id)
        kinds = [e["kind"] for e in events]
        assert kinds[0] == "round_created"
        assert kinds[-1] == "decision"
        assert kinds.count("speech_committed") == 8
        assert kinds.count("cx_committed") == 4
        sequences = [e["sequence"] for e in events]
        assert sequences == list(range(1, len(events) + 1))

    def test_two_rounds_are_independent(self, client):
        a = start_round(client)
        b = start_round(client)
        assert a != b
        wait_for_status(client, a, {"complete"})
        wait_for_status(client, b, {"complete"})
        events_a = collect_events(client, a)
        events_b = collect_events(client, b)
        assert all(e["round_id"] == a for e in events_a)
        assert all(e["round_id"] == b for e in events_b)

    def test_empty_resolution_rejected(self, client):
        resp = client.post("/rounds", json={"resolution": "   "})
        assert resp.status_code == 400
        assert "InvalidConfig" in resp.json()["detail"]

    def test_unknown_round_404(self, client):
        assert client.get("/rounds/nope").status_code == 404
        assert client.get("/rounds/nope/transcript").status_code == 404
        resp = client.post("/rounds/nope/speeches/2AC", json={"content": "x"})
        assert resp.status_code == 404

    def test_event_log_reconstructs_transcript(self, client):
        round_id = start_round(client)
        wait_for_status(client, round_id, {"complete"})
        events = [event_from_dict(e) for e in collect_events(client, round_id)]
        reconstructed = reconstruct_transcript_dict(events)
        actual = client.get(f"/rounds/{round_id}/transcript").json()
        assert canonical_json(reconstructed) == canonical_json(actual)

    def test_transcript_formats(self, client):
        round_id = start_round(client)
        wait_for_status(client, round_id, {"complete"})
        display = client.get(f"/rounds/{round_id}/transcript", params={"format": "display"}).text
        spoken = client.get(f"/rounds/{round_id}/transcript", params={"format": "spoken"}).text
        assert display.count("## Speech ") == 8
        assert "## Speech" not in spoken


class TestStreamResume:
    def test_reconnect_at_positions_no_gaps_or_duplicates(self, client):
        round_id = start_round(client)
        wait_for_status(client, round_id, {"complete"})
        full = collect_events(client, round_id)
        n = len(full)
        for start in (0, 1, 2, n // 2, n - 1, n):
            events = collect_events(client, round_id, from_sequence=start)
            assert [e["sequence"] for e in events] == list(range(max(start, 1), n + 1))

    def test_last_event_id_header_resumes_after_position(self, client):
        round_id = start_round(client)
        wait_for_status(client, round_id, {"complete"})
        full = collect_events(client, round_id)
        with client.stream(
            "GET", f"/rounds/{round_id}/events", headers={"Last-Event-ID": str(len(full) // 2)}
        ) as resp:
            events = parse_sse("".join(resp.iter_text()))
        assert events[0]["sequence"] == len(full) // 2 + 1
        assert events[-1]["sequence"] == len(full)

    def test_midstream_connect_sees_live_tail(self, client):
        round_id = start_round(client, humans=["2AR"])
        wait_for_status(client, round_id, {"awaiting_human"})
        early = snapshot_events_until(client, round_id, "awaiting_human")
        assert early[-1]["kind"] == "awaiting_human"
        client.post(f"/rounds/{round_id}/speeches/2AR", json={"content": "The aff wins on magnitude."})
        wait_for_status(client, round_id, {"complete"})
        resumed = collect_events(client, round_id, from_sequence=early[-1]["sequence"] + 1)
        kinds = [e["kind"] for e in resumed]
        assert "human_committed" in kinds and "decision" in kinds
        merged = [e["sequence"] for e in early + resumed]
        assert merged == list(range(1, len(merged) + 1))


def snapshot_events_until(client, round_id, last_kind, timeout=10.0):
    """Poll the snapshot stream (wait=false) of an open round until its
    tail event has the wanted kind."""
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        with client.stream(
            "GET", f"/rounds/{round_id}/events", params={"wait": "false"}
        ) as resp:
            events = parse_sse("".join(resp.iter_text()))
        if events and events[-1]["kind"] == last_kind:
            return events
        time.sleep(0.05)
    raise AssertionError(f"stream never ended with {last_kind}")


class TestHumanFlow:
    def test_submit_accepted_and_round_resumes(self, client):
        round_id = start_round(client, humans=["2AC"])
        wait_for_status(client, round_id, {"awaiting_human"})
        resp = client.post(
            f"/rounds/{round_id}/speeches/2AC",
            json={"content": {"text": "We answer everything and extend the case."}},
        )
        assert resp.status_code == 200
        assert resp.json()["accepted"] is True
        wait_for_status(client, round_id, {"complete"})
        transcript = client.get(f"/rounds/{round_id}/transcript").json()
        speech_2ac = transcript["entries"][4]
        assert speech_2ac["author"] == "human"

    def test_wrong_slot_409(self, client):
        round_id = start_round(client, humans=["2AC"])
        wait_for_status(client, round_id, {"awaiting_human"})
        resp = client.post(f"/rounds/{round_id}/speeches/1AR", json={"content": "too early"})
        assert resp.status_code == 409
        assert resp.json()["detail"]["error"] == "WrongSlot"
        assert resp.json()["detail"]["expected"] == "2AC"

    def test_not_awaiting_409(self, client):
        round_id = start_round(client)
        wait_for_status(client, round_id, {"complete"})
        resp = client.post(f"/rounds/{round_id}/speeches/2AC", json={"content": "late"})
        assert resp.status_code == 409
        assert resp.json()["detail"]["error"] == "NotAwaitingHuman"

    def test_empty_submission_422(self, client):
        round_id = start_round(client, humans=["2AC"])
        wait_for_status(client, round_id, {"awaiting_human"})
        resp = client.post(f"/rounds/{round_id}/speeches/2AC", json={"content": "   "})
        assert resp.status_code == 422
        assert resp.json()["detail"]["error"] == "ValidationFailed"


class TestTopics:
    def test_topic_creates_round(self, client):
        resp = client.post("/topics", json={"resolution": "Resolved: topics work."})
        assert resp.status_code == 200
        round_id = resp.json()["round_id"]
        wait_for_status(client, round_id, {"complete"})
        transcript = client.get(f"/rounds/{round_id}/transcript").json()
        assert transcript["resolution"] == "Resolved: topics work."

    def test_empty_topic_rejected(self, client):
        assert client.post("/topics", json={"resolution": ""}).status_code == 400


class TestIsolation:
    def test_failed_round_does_not_poison_others(self, client, tmp_path):
        # a round pointed at a script whose 1AC drafter errors
        broken_script = json.loads((FIXTURES / "full_round.script.json").read_text("utf-8"))
        broken_script["routes"]["1AC/plantext/1/drafter"] = {"$error": "provider"}
        broken_path = tmp_path / "broken.script.json"
        broken_path.write_text(json.dumps(broken_script), encoding="utf-8")

        bad = start_round(client, mock_script=str(broken_path))
        good = start_round(client)
        wait_for_status(client, bad, {"failed"})
        wait_for_status(client, good, {"complete"})
        bad_kinds = [e["kind"] for e in collect_events(client, bad)]
        good_kinds = [e["kind"] for e in collect_events(client, good)]
        assert "failed" in bad_kinds
        assert "failed" not in good_kinds
        assert good_kinds[-1] == "decision"


class TestSearchEndpoint:
    def test_search_matches_index_order(self, client, round_index):
        from debatesim.indexing import search as index_search

        resp = client.get("/search", params={"q": "clean technology investment", "k": 8})
        assert resp.status_code == 200
        hits = resp.json()["hits"]
        expected = index_search(round_index, "clean technology investment", 8)
        assert [h["card_id"] for h in hits] == [h.card_id for h in expected]
        assert all("tag" in h and "cite" in h for h in hits)


class TestAuth:
    def test_token_gates_mutations_when_set(self, service_config, round_corpus, round_index, monkeypatch):
        monkeypatch.setenv("DEBATESIM_TOKEN", "sekrit")
        app = create_app(service_config, corpus=round_corpus, index=round_index)
        with TestClient(app) as client:
            denied = client.post("/rounds", json={"resolution": "Resolved: auth."})
            assert denied.status_code == 401
            allowed = client.post(
                "/rounds",
                json={"resolution": "Resolved: auth."},
                headers={"X-Debatesim-Token": "sekrit"},
            )
            assert allowed.status_code == 200
            # reads stay open
            round_id = allowed.json()["round_id"]
            assert client.get(f"/rounds/{round_id}").status_code == 200


class TestAudio:
    def test_mock_tts_emits_audio_ready_and_serves_files(self, service_config, round_corpus, round_index):
        service_config.tts = {"provider": "mock", "audio_format": "mp3"}
        app = create_app(service_config, corpus=round_corpus, index=round_index)
        with TestClient(app) as client:
            round_id = start_round(client)
            wait_for_status(client, round_id, {"complete"})
            events = collect_events(client, round_id)
            audio_events = [e for e in events if e["kind"] == "audio_ready"]
            assert len(audio_events) == 8
            resp = client.get(f"/rounds/{round_id}/audio/1AC")
            assert resp.status_code == 200
            assert resp.content.startswith(b"[")
            assert client.get(f"/rounds/{round_id}/audio/2NR").status_code == 200
