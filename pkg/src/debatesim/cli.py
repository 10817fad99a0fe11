"""Command line front end: every service capability, offline, on files.

Subcommands: ingest, index build/search, run, resume, judge, panel,
render, speak, serve.  Each command writes machine-readable artifacts
under the output directory and prints a final JSON manifest line with
their paths.  Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import uuid
from pathlib import Path

from . import __version__
from .adjudicate import DecisionMatrix, judge_id_for, judge_round, panel_csv, panel_report, panel_text
from .arguments import (
    canonical_json,
    decision_to_dict,
    render_transcript,
    transcript_from_dict,
    transcript_to_dict,
)
from .config import CliConfig, build_engines, build_gateway, load_config
from .corpus import load_corpus
from .delivery import realize_script, synthesize, tts_client_for, write_audio
from .events import EventLog
from .gateway import GatewayError
from .indexing import Bm25Params, build_index, load_index, save_index, search
from .pipeline import (
    ParticipantAssignment,
    PipelineError,
    RoundConfig,
    RoundEngine,
    RoundFailed,
    engine_from_checkpoint,
)
from .slots import SPEECH_CODES


class CliError(Exception):
    """Domain failure: message to stderr, exit 1."""


def _manifest(command: str, **artifacts) -> None:
    print(json.dumps({"command": command, "artifacts": artifacts}, ensure_ascii=False))


def _config_from_args(args) -> CliConfig:
    overrides = {
        "corpus": getattr(args, "corpus", None),
        "index": getattr(args, "index", None),
        "output_dir": getattr(args, "output_dir", None),
    }
    return load_config(args.config, overrides=overrides)


def _load_transcript(path: str):
    return transcript_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_ingest(args) -> None:
    config = _config_from_args(args)
    source = args.file or config.corpus
    if not source:
        raise CliError("no ingest file given")
    handle, report = load_corpus(source)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    report_path = out / "ingest_report.json"
    report_path.write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")
    print(f"ingested {handle.card_count} cards ({report.rejected} rejected of {report.total_lines} lines)")
    _manifest("ingest", report=str(report_path))


def cmd_index_build(args) -> None:
    config = _config_from_args(args)
    if not config.corpus:
        raise CliError("no corpus configured")
    handle, _ = load_corpus(config.corpus)
    params = Bm25Params(k1=args.k1, b=args.b)
    index = build_index(handle, params)
    out_path = Path(args.out or config.index or Path(config.output_dir) / "index.json")
    out_path.parent.mkdir(parents=True, exist_ok=True)
    save_index(index, out_path)
    print(f"indexed {index.doc_count} cards -> {out_path}")
    _manifest("index-build", index=str(out_path))


def cmd_index_search(args) -> None:
    config = _config_from_args(args)
    if not config.index or not Path(config.index).exists():
        raise CliError("no index file configured; run `index build` first")
    index = load_index(config.index)
    corpus = None
    if config.corpus and Path(config.corpus).exists():
        corpus, _ = load_corpus(config.corpus)
    hits = search(index, args.query, args.k)
    rows = []
    for hit in hits:
        row = {"rank": hit.rank, "card_id": hit.card_id, "score": round(hit.score, 6)}
        if corpus is not None and hit.card_id in corpus:
            card = corpus.get_card(hit.card_id)
            row["tag"] = card.tag
            row["cite"] = card.cite
        rows.append(row)
        label = f"  {hit.rank:>3}. {hit.card_id}  {hit.score:.4f}"
        if "tag" in row:
            label += f"  {row['tag']}"
        print(label)
    if not rows:
        print("  (no hits)")
    _manifest("index-search", hits=rows)


def _round_config(config: CliConfig, resolution: str, humans: list[str], seed: int) -> RoundConfig:
    return RoundConfig(
        resolution=resolution,
        assignment=ParticipantAssignment.with_humans(humans or []),
        speech_profile=config.profile(config.speech_profile),
        judges=tuple(config.judge_profiles()),
        seed=seed,
        year_pin=config.year_pin,
        max_iterations=config.max_iterations,
        evidence_k=config.evidence_k,
        advantage_count=config.advantage_count,
        cx_pairs=config.cx_pairs,
        repair_budget=config.repair_budget,
    )


def _write_round_artifacts(engine: RoundEngine, round_dir: Path) -> dict:
    transcript_path = round_dir / "transcript.json"
    transcript_path.write_text(canonical_json(transcript_to_dict(engine.transcript)), encoding="utf-8")
    rendered_path = round_dir / "transcript.md"
    rendered_path.write_text(
        render_transcript(engine.transcript, engine.engines.corpus, "display"), encoding="utf-8"
    )
    return {"transcript": str(transcript_path), "rendered": str(rendered_path)}


def _drive_round(engine: RoundEngine, submissions: dict[str, dict | str]) -> str:
    """Advance, feeding queued human submissions for their slots."""
    status = engine.run(block_on_human=False)
    while status == "awaiting_human":
        code = engine.order[engine.cursor].code
        if code not in submissions:
            break
        engine.submit_human(code, submissions.pop(code))
        status = engine.run(block_on_human=False)
    return status


def cmd_run(args) -> None:
    config = _config_from_args(args)
    resolution = args.resolution or config.resolution
    if not resolution:
        raise CliError("no resolution given (use --resolution or config)")
    engines = build_engines(config, mock_script=args.mock)
    round_id = args.round_id or uuid.uuid4().hex[:12]
    round_dir = Path(config.output_dir) / "rounds" / round_id
    round_dir.mkdir(parents=True, exist_ok=True)

    log = EventLog(round_id, persist_path=round_dir / "events.ndjson")
    log.emit("round_created", {"resolution": resolution, "round_id": round_id})
    round_config = _round_config(config, resolution, args.human, args.seed)
    engine = RoundEngine(
        round_config, engines, round_id=round_id, event_log=log,
        checkpoint_path=round_dir / "checkpoint.json",
    )
    try:
        status = _drive_round(engine, {})
    except RoundFailed as exc:
        _write_round_artifacts(engine, round_dir)
        _manifest("run", round_id=round_id, status="failed",
                  checkpoint=str(engine.checkpoint_path), error=str(exc))
        raise CliError(f"round failed: {exc}") from exc

    artifacts = _write_round_artifacts(engine, round_dir)
    if status == "awaiting_human":
        print(f"round {round_id} awaiting human {engine.order[engine.cursor].code}; "
              f"resume with: debatesim resume {engine.checkpoint_path}")
    else:
        print(f"round {round_id} {status}; transcript at {artifacts['transcript']}")
    _manifest(
        "run", round_id=round_id, status=status,
        checkpoint=str(engine.checkpoint_path), events=str(round_dir / "events.ndjson"),
        **artifacts,
    )


def cmd_resume(args) -> None:
    config = _config_from_args(args)
    engines = build_engines(config, mock_script=args.mock)
    checkpoint = Path(args.checkpoint)
    if not checkpoint.exists():
        raise CliError(f"checkpoint not found: {checkpoint}")
    round_dir = checkpoint.parent
    log = EventLog(checkpoint.stem, persist_path=round_dir / "events.ndjson")
    engine = engine_from_checkpoint(checkpoint, engines, event_log=log)

    submissions: dict[str, dict | str] = {}
    for spec in args.submit or []:
        code, _, path = spec.partition("=")
        if not path:
            raise CliError(f"--submit wants SLOT=FILE, got {spec!r}")
        raw = Path(path).read_text(encoding="utf-8")
        try:
            submissions[code] = json.loads(raw)
        except json.JSONDecodeError:
            submissions[code] = {"text": raw}

    try:
        status = _drive_round(engine, submissions)
    except (RoundFailed, PipelineError) as exc:
        raise CliError(f"resume failed: {exc}") from exc
    artifacts = _write_round_artifacts(engine, round_dir)
    print(f"round {engine.round_id} {status}")
    _manifest("resume", round_id=engine.round_id, status=status, **artifacts)


def cmd_judge(args) -> None:
    config = _config_from_args(args)
    transcript = _load_transcript(args.transcript)
    profile = config.profile(args.judge)
    engines = build_engines(config, mock_script=args.mock)
    try:
        decision = judge_round(transcript, profile, engines.gateway, engines.corpus,
                               repair_budget=config.repair_budget)
    except GatewayError as exc:
        raise CliError(f"judging failed: {exc}") from exc
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    ballot_path = out / f"ballot_{Path(args.transcript).stem}_{args.judge}.json"
    ballot_path.write_text(json.dumps(decision_to_dict(decision), indent=2) + "\n", encoding="utf-8")
    print(f"{decision.judge_id}: {decision.winner}")
    print(decision.rfd)
    _manifest("judge", ballot=str(ballot_path), winner=decision.winner)


def cmd_panel(args) -> None:
    config = _config_from_args(args)
    directory = Path(args.transcripts)
    paths = sorted(directory.glob("*.json"))
    if not paths:
        raise CliError(f"no transcript JSON files under {directory}")
    judges = [name.strip() for name in args.judges.split(",") if name.strip()]
    if args.baseline not in judges:
        raise CliError(f"baseline {args.baseline!r} must be one of the judges")
    engines = build_engines(config, mock_script=args.mock)

    sides_by_round: dict[str, str] = {}
    if args.sides_file:
        sides_by_round = json.loads(Path(args.sides_file).read_text(encoding="utf-8"))

    rounds = []
    cells = {}
    judge_ids = {}
    for path in paths:
        transcript = _load_transcript(str(path))
        round_name = path.stem
        rounds.append(round_name)
        for judge_name in judges:
            profile = config.profile(judge_name)
            judge_ids[judge_name] = judge_id_for(profile)
            decision = judge_round(
                transcript, profile, engines.gateway, engines.corpus,
                repair_budget=config.repair_budget,
                route=f"panel/{round_name}/{judge_name}",
            )
            cells[(round_name, judge_name)] = decision.winner
    matrix = DecisionMatrix(rounds=rounds, judges=judges, cells=cells)
    sides = [sides_by_round.get(r, args.system_side) for r in rounds]
    result = panel_report(matrix, sides, baseline=args.baseline)

    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    text = panel_text(result)
    csv_path = out / "panel_report.csv"
    text_path = out / "panel_report.txt"
    csv_path.write_text(panel_csv(result), encoding="utf-8")
    text_path.write_text(text + "\n", encoding="utf-8")
    print(text)
    _manifest("panel", csv=str(csv_path), text=str(text_path))


def cmd_render(args) -> None:
    config = _config_from_args(args)
    engines_corpus, _ = load_corpus(config.corpus) if config.corpus else (None, None)
    if engines_corpus is None:
        raise CliError("no corpus configured")
    transcript = _load_transcript(args.transcript)
    rendered = render_transcript(transcript, engines_corpus, args.mode)
    if args.out:
        Path(args.out).write_text(rendered, encoding="utf-8")
        _manifest("render", rendered=str(args.out))
    else:
        print(rendered, end="")
        _manifest("render", rendered="-")


def cmd_speak(args) -> None:
    config = _config_from_args(args)
    corpus, _ = load_corpus(config.corpus)
    transcript = _load_transcript(args.transcript)
    speeches = {s.slot.code: s for s in transcript.speeches()}
    if args.slot not in speeches:
        raise CliError(f"transcript has no speech {args.slot!r}")
    speech = speeches[args.slot]
    profile = config.tts_profile(provider_override=args.tts_provider)
    script = realize_script(speech, corpus, voice_id=profile.voice_for(speech.slot))
    try:
        audio = synthesize(script, profile, client=tts_client_for(profile))
    except GatewayError as exc:
        raise CliError(f"synthesis failed: {exc}") from exc
    source = Path(args.transcript)
    # rounds persist as <round-id>/transcript.json; keep audio beside them
    round_id = source.parent.name if source.stem == "transcript" else source.stem
    path = write_audio(audio, config.output_dir, round_id)
    script_path = path.with_suffix(".script.txt")
    script_path.write_text(script.text, encoding="utf-8")
    print(f"wrote {len(audio.audio_bytes)} bytes of {audio.format} to {path}")
    _manifest("speak", audio=str(path), script=str(script_path),
              estimated_duration=script.estimated_duration)


def cmd_serve(args) -> None:
    import uvicorn

    from .service import create_app

    config = _config_from_args(args)
    app = create_app(config)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="debatesim",
        description="Evidence-grounded policy debate rounds: ingest, retrieve, argue, judge.",
    )
    parser.add_argument("--version", action="version", version=f"debatesim {__version__}")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (or DEBATESIM_CONFIG)")
    common.add_argument("--corpus", help="card ndjson path (overrides config)")
    common.add_argument("--index", help="index file path (overrides config)")
    common.add_argument("--output-dir", help="artifact directory (overrides config)")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="validate and report on a card file")
    p.add_argument("file", nargs="?", help="ndjson card file (defaults to configured corpus)")
    p.set_defaults(func=cmd_ingest)

    p_index = sub.add_parser("index", help="build or query the BM25 index")
    index_sub = p_index.add_subparsers(dest="index_command", required=True)
    p = index_sub.add_parser("build", parents=[common])
    p.add_argument("--out", help="index output path")
    p.add_argument("--k1", type=float, default=1.2)
    p.add_argument("--b", type=float, default=0.75)
    p.set_defaults(func=cmd_index_build)
    p = index_sub.add_parser("search", parents=[common])
    p.add_argument("query")
    p.add_argument("-k", type=int, default=10)
    p.set_defaults(func=cmd_index_search)

    p = sub.add_parser("run", parents=[common], help="run a round")
    p.add_argument("--resolution", help="the resolution to debate")
    p.add_argument("--human", action="append", default=[], metavar="SLOT",
                   help="assign a slot (1AC..2AR or CX-1AC..) to a human; repeatable")
    p.add_argument("--mock", help="scripted-response file for offline rounds")
    p.add_argument("--round-id", help="fixed round id (default: random)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("resume", parents=[common], help="resume a checkpointed round")
    p.add_argument("checkpoint")
    p.add_argument("--submit", action="append", metavar="SLOT=FILE",
                   help="human submission for an awaited slot; repeatable")
    p.add_argument("--mock", help="scripted-response file")
    p.set_defaults(func=cmd_resume)

    p = sub.add_parser("judge", parents=[common], help="judge one transcript")
    p.add_argument("transcript")
    p.add_argument("--judge", required=True, help="profile name from config")
    p.add_argument("--mock", help="scripted-response file")
    p.set_defaults(func=cmd_judge)

    p = sub.add_parser("panel", parents=[common], help="judge a directory of transcripts with a panel")
    p.add_argument("transcripts", help="directory of transcript JSON files")
    p.add_argument("--judges", required=True, help="comma-separated profile names")
    p.add_argument("--baseline", required=True)
    p.add_argument("--system-side", default="AFF", choices=["AFF", "NEG"])
    p.add_argument("--sides-file", help="JSON mapping transcript stem -> system side")
    p.add_argument("--mock", help="scripted-response file")
    p.set_defaults(func=cmd_panel)

    p = sub.add_parser("render", parents=[common], help="render a transcript")
    p.add_argument("transcript")
    p.add_argument("--mode", choices=["display", "spoken"], default="display")
    p.add_argument("--out")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("speak", parents=[common], help="synthesize one speech to audio")
    p.add_argument("transcript")
    p.add_argument("--slot", required=True, choices=list(SPEECH_CODES))
    p.add_argument("--tts-provider", choices=["mock", "openai"])
    p.set_defaults(func=cmd_speak)

    p = sub.add_parser("serve", parents=[common], help="start the round service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError, GatewayError, PipelineError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
