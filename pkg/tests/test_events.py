"""Event log: sequencing, replay, live follow, persistence."""

import threading

import pytest

from debatesim.events import EventLog, read_event_file


class TestEmit:
    def test_sequences_are_gap_free_from_one(self):
        log = EventLog("r")
        for _ in range(5):
            log.emit("item_started", {})
        assert [e.sequence for e in log.snapshot()] == [1, 2, 3, 4, 5]

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            EventLog("r").emit("mystery")

    def test_terminal_event_closes_log(self):
        log = EventLog("r")
        log.emit("decision", {})
        assert log.closed
        assert log.emit("item_started", {}) is None  # dropped with a warning
        assert log.last_sequence == 1

    def test_versioned_payload(self):
        log = EventLog("r")
        event = log.emit("round_created", {"resolution": "x"})
        assert event.to_dict()["v"] == 1


class TestFollow:
    def test_replay_then_live(self):
        log = EventLog("r")
        log.emit("round_created", {})
        log.emit("item_started", {"item": "1AC"})

        seen = []

        def consumer():
            for event in log.follow(from_sequence=1):
                seen.append(event.sequence)

        thread = threading.Thread(target=consumer)
        thread.start()
        log.emit("speech_committed", {})
        log.emit("decision", {})
        thread.join(timeout=5)
        assert seen == [1, 2, 3, 4]

    def test_resume_from_position_loses_nothing(self):
        log = EventLog("r")
        for _ in range(4):
            log.emit("item_started", {})
        log.emit("decision", {})
        for start in range(1, 6):
            got = [e.sequence for e in log.follow(from_sequence=start)]
            assert got == list(range(start, 6))

    def test_snapshot_from_sequence(self):
        log = EventLog("r")
        for _ in range(3):
            log.emit("item_started", {})
        assert [e.sequence for e in log.snapshot(2)] == [2, 3]


class TestPersistence:
    def test_events_mirrored_to_file(self, tmp_path):
        path = tmp_path / "events.ndjson"
        log = EventLog("r", persist_path=path)
        log.emit("round_created", {"resolution": "x"})
        log.emit("decision", {"decision": {"winner": "AFF"}})
        events = read_event_file(path)
        assert [e.kind for e in events] == ["round_created", "decision"]
        assert events[0].payload == {"resolution": "x"}
        assert events[1].round_id == "r"
