"""CLI command surface: artifacts, manifests, exit codes, precedence."""

import json
from pathlib import Path

import pytest

from debatesim.cli import main
from debatesim.config import load_config

from conftest import FIXTURES


@pytest.fixture
def cli_env(tmp_path):
    """A config file pointing at the shipped fixtures with a temp output dir."""
    base = json.loads((FIXTURES / "config.json").read_text(encoding="utf-8"))
    base["corpus"] = str(FIXTURES / "cards.ndjson")
    base["index"] = str(FIXTURES / "index.json")
    base["mock_script"] = str(FIXTURES / "full_round.script.json")
    base["output_dir"] = str(tmp_path / "out")
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps(base), encoding="utf-8")
    return {"config": str(config_path), "tmp": tmp_path, "base": base}


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    manifest = None
    for line in reversed(out.out.strip().splitlines()):
        try:
            candidate = json.loads(line)
        except json.JSONDecodeError:
            continue
        if isinstance(candidate, dict) and "artifacts" in candidate:
            manifest = candidate
            break
    return code, out, manifest


class TestIngest:
    def test_reports_and_manifest(self, capsys, cli_env):
        code, out, manifest = run_cli(capsys, "ingest", "--config", cli_env["config"])
        assert code == 0
        report = json.loads(Path(manifest["artifacts"]["report"]).read_text("utf-8"))
        assert report["accepted"] == 32
        assert report["rejected"] == 0

    def test_missing_file_is_domain_error(self, capsys, cli_env):
        code, out, _ = run_cli(capsys, "ingest", "/nope/missing.ndjson", "--config", cli_env["config"])
        assert code == 1
        assert "error:" in out.err


class TestIndexCommands:
    def test_build_then_search_matches_library_order(self, capsys, cli_env, round_index):
        from debatesim.indexing import search

        index_path = cli_env["tmp"] / "rebuilt.json"
        code, _, manifest = run_cli(
            capsys, "index", "build", "--config", cli_env["config"], "--out", str(index_path)
        )
        assert code == 0
        assert Path(manifest["artifacts"]["index"]).exists()

        code, _, manifest = run_cli(
            capsys, "index", "search", "carbon levy emissions", "-k", "5",
            "--config", cli_env["config"], "--index", str(index_path),
        )
        assert code == 0
        got = [h["card_id"] for h in manifest["artifacts"]["hits"]]
        want = [h.card_id for h in search(round_index, "carbon levy emissions", 5)]
        assert got == want

    def test_search_without_index_errors(self, capsys, cli_env, tmp_path):
        bare = tmp_path / "bare.json"
        bare.write_text(json.dumps({"corpus": cli_env["base"]["corpus"], "output_dir": str(tmp_path)}),
                        encoding="utf-8")
        code, out, _ = run_cli(capsys, "index", "search", "x", "--config", str(bare))
        assert code == 1


class TestRun:
    def test_mock_round_produces_artifacts(self, capsys, cli_env):
        code, _, manifest = run_cli(
            capsys, "run", "--config", cli_env["config"],
            "--mock", cli_env["base"]["mock_script"], "--round-id", "cli-a",
        )
        assert code == 0
        artifacts = manifest["artifacts"]
        assert artifacts["status"] == "complete"
        transcript = json.loads(Path(artifacts["transcript"]).read_text("utf-8"))
        assert len(transcript["entries"]) == 12
        assert transcript["decision"]["winner"] == "AFF"
        rendered = Path(artifacts["rendered"]).read_text("utf-8")
        assert rendered.count("## Speech ") == 8
        assert Path(artifacts["events"]).exists()

    def test_same_seed_runs_byte_identical(self, capsys, cli_env):
        paths = []
        for round_id in ("cli-b", "cli-c"):
            code, _, manifest = run_cli(
                capsys, "run", "--config", cli_env["config"], "--round-id", round_id, "--seed", "3",
            )
            assert code == 0
            paths.append(Path(manifest["artifacts"]["transcript"]))
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_missing_resolution_errors(self, capsys, cli_env, tmp_path):
        bare = tmp_path / "nores.json"
        config = dict(cli_env["base"])
        config.pop("resolution")
        bare.write_text(json.dumps(config), encoding="utf-8")
        code, out, _ = run_cli(capsys, "run", "--config", str(bare))
        assert code == 1

    def test_unknown_subcommand_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2


class TestRunWithHumanAndResume:
    def test_human_slot_checkpoints_then_resume_with_submission(self, capsys, cli_env):
        code, _, manifest = run_cli(
            capsys, "run", "--config", cli_env["config"], "--round-id", "cli-h",
            "--human", "2AC",
        )
        assert code == 0
        assert manifest["artifacts"]["status"] == "awaiting_human"
        checkpoint = manifest["artifacts"]["checkpoint"]

        submission = cli_env["tmp"] / "2ac.txt"
        submission.write_text("We answer the off-case and extend the case.", encoding="utf-8")
        code, _, manifest = run_cli(
            capsys, "resume", checkpoint, "--config", cli_env["config"],
            "--submit", f"2AC={submission}",
        )
        assert code == 0
        assert manifest["artifacts"]["status"] == "complete"
        transcript = json.loads(Path(manifest["artifacts"]["transcript"]).read_text("utf-8"))
        assert transcript["entries"][4]["author"] == "human"
        assert len(transcript["entries"]) == 12


class TestJudgeAndPanel:
    @pytest.fixture
    def transcript_dir(self, capsys, cli_env):
        run_cli(capsys, "run", "--config", cli_env["config"], "--round-id", "cli-j")
        src = Path(cli_env["base"]["output_dir"]) / "rounds" / "cli-j" / "transcript.json"
        directory = cli_env["tmp"] / "transcripts"
        directory.mkdir()
        (directory / "round_a.json").write_bytes(src.read_bytes())
        (directory / "round_b.json").write_bytes(src.read_bytes())
        return directory

    def test_judge_single_transcript(self, capsys, cli_env, transcript_dir):
        code, out, manifest = run_cli(
            capsys, "judge", str(transcript_dir / "round_a.json"),
            "--judge", "judge-main", "--config", cli_env["config"],
        )
        assert code == 0
        assert manifest["artifacts"]["winner"] == "AFF"
        ballot = json.loads(Path(manifest["artifacts"]["ballot"]).read_text("utf-8"))
        assert ballot["rfd"]

    def test_panel_over_directory(self, capsys, cli_env, transcript_dir, tmp_path):
        # per-judge scripted ballots so the matrix is not constant
        script = json.loads(Path(cli_env["base"]["mock_script"]).read_text("utf-8"))
        script["routes"]["panel/*/judge-main"] = {"winner": "AFF", "rfd": "baseline likes aff"}
        script["routes"]["panel/round_a/judge-alt"] = {"winner": "AFF", "rfd": "agree"}
        script["routes"]["panel/round_b/judge-alt"] = {"winner": "NEG", "rfd": "disagree"}
        panel_script = tmp_path / "panel.script.json"
        panel_script.write_text(json.dumps(script), encoding="utf-8")

        config = dict(cli_env["base"])
        config["profiles"] = dict(config["profiles"])
        config["profiles"]["judge-alt"] = {"provider": "script", "model_name": "mock-judge-b"}
        config_path = tmp_path / "panel-config.json"
        config_path.write_text(json.dumps(config), encoding="utf-8")

        code, out, manifest = run_cli(
            capsys, "panel", str(transcript_dir),
            "--judges", "judge-main,judge-alt", "--baseline", "judge-main",
            "--config", str(config_path), "--mock", str(panel_script),
        )
        assert code == 0
        csv_text = Path(manifest["artifacts"]["csv"]).read_text("utf-8")
        lines = csv_text.strip().splitlines()
        assert lines[0].startswith("judge,")
        rows = {line.split(",")[0]: line.split(",") for line in lines[1:]}
        assert float(rows["judge-main"][1]) == 100.0
        assert float(rows["judge-alt"][1]) == 50.0
        assert float(rows["judge-alt"][2]) == -50.0
        assert "Win Rate" in Path(manifest["artifacts"]["text"]).read_text("utf-8")


class TestRenderAndSpeak:
    @pytest.fixture
    def transcript_path(self, capsys, cli_env):
        run_cli(capsys, "run", "--config", cli_env["config"], "--round-id", "cli-r")
        return Path(cli_env["base"]["output_dir"]) / "rounds" / "cli-r" / "transcript.json"

    def test_render_display_and_spoken(self, capsys, cli_env, transcript_path):
        out_path = cli_env["tmp"] / "round.md"
        code, _, manifest = run_cli(
            capsys, "render", str(transcript_path), "--mode", "display",
            "--config", cli_env["config"], "--out", str(out_path),
        )
        assert code == 0
        assert out_path.read_text("utf-8").count("## Speech ") == 8

        code, out, _ = run_cli(
            capsys, "render", str(transcript_path), "--mode", "spoken", "--config", cli_env["config"]
        )
        assert code == 0
        assert "## Speech" not in out.out

    def test_speak_writes_audio_with_mock_tts(self, capsys, cli_env, transcript_path):
        code, _, manifest = run_cli(
            capsys, "speak", str(transcript_path), "--slot", "1AR",
            "--tts-provider", "mock", "--config", cli_env["config"],
        )
        assert code == 0
        audio = Path(manifest["artifacts"]["audio"])
        assert audio.exists() and audio.suffix == ".mp3"
        script_text = Path(manifest["artifacts"]["script"]).read_text("utf-8")
        assert script_text  # spoken script persisted beside the audio
        assert audio.read_bytes().decode("utf-8").strip("[]")


class TestConfigPrecedence:
    def test_flags_beat_env_beat_file(self, tmp_path, monkeypatch):
        config_path = tmp_path / "c.json"
        config_path.write_text(json.dumps({"output_dir": "from-file", "year_pin": 1999}), "utf-8")
        monkeypatch.setenv("DEBATESIM_OUTPUT_DIR", "from-env")
        monkeypatch.setenv("DEBATESIM_YEAR_PIN", "2001")

        config = load_config(config_path)
        assert config.output_dir == "from-env"
        assert config.year_pin == 2001

        config = load_config(config_path, overrides={"output_dir": "from-flag"})
        assert config.output_dir == "from-flag"

    def test_env_config_path(self, tmp_path, monkeypatch):
        config_path = tmp_path / "c.json"
        config_path.write_text(json.dumps({"output_dir": "via-env-config"}), "utf-8")
        monkeypatch.setenv("DEBATESIM_CONFIG", str(config_path))
        assert load_config(None).output_dir == "via-env-config"
