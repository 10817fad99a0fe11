"""HTTP front door: round lifecycle, live event streaming, human input.

Endpoints (all payloads JSON; events carry an explicit ``v`` field):

* ``POST /rounds`` - create a round and start its pipeline.
* ``GET /rounds/{id}/events`` - server-sent event stream; resumes from
  ``from_sequence`` (or the ``Last-Event-ID`` header) with no gaps.
* ``POST /rounds/{id}/speeches/{item}`` - human submission for the
  awaited item.
* ``POST /topics`` - propose a resolution; creates a round from the
  service's template config.
* ``GET /rounds/{id}/transcript`` - JSON, display, or spoken format.
* ``GET /rounds/{id}/audio/{slot}`` - synthesized speech audio.
* ``GET /search`` - evidence search for the composer UI.

Each round runs on its own thread with its own gateway; one round's
failure only ever marks that round failed.  A shared-token env var
(``DEBATESIM_TOKEN``) gates mutating endpoints when set.
"""

from __future__ import annotations

import asyncio
import json
import logging
import os
import threading
import uuid
from pathlib import Path

from fastapi import FastAPI, Header, HTTPException, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse, PlainTextResponse, StreamingResponse
from pydantic import BaseModel

from .arguments import render_transcript, transcript_to_dict
from .config import CliConfig, build_gateway
from .corpus import load_corpus
from .delivery import realize_script, synthesize, tts_client_for, write_audio
from .events import EventLog
from .indexing import build_index, load_index, search
from .pipeline import (
    Engines,
    InvalidHumanSubmission,
    NotAwaitingHuman,
    ParticipantAssignment,
    RoundConfig,
    RoundEngine,
    RoundFailed,
    WrongSlot,
)

logger = logging.getLogger(__name__)

TOKEN_ENV = "DEBATESIM_TOKEN"
STREAM_POLL_SECONDS = 0.05


class CreateRound(BaseModel):
    resolution: str
    humans: list[str] = []
    seed: int = 0
    round_id: str | None = None
    mock_script: str | None = None


class ProposeTopic(BaseModel):
    resolution: str


class SpeechSubmission(BaseModel):
    content: dict | str


class RoundRecord:
    def __init__(self, engine: RoundEngine, log: EventLog, thread: threading.Thread, round_dir: Path):
        self.engine = engine
        self.log = log
        self.thread = thread
        self.round_dir = round_dir


def _sse(event) -> str:
    payload = json.dumps(event.to_dict(), ensure_ascii=False)
    return f"id: {event.sequence}\nevent: {event.kind}\ndata: {payload}\n\n"


def create_app(config: CliConfig, corpus=None, index=None) -> FastAPI:
    """Build the service; ``corpus``/``index`` may be injected for tests."""
    app = FastAPI(title="debatesim", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    if corpus is None and config.corpus:
        corpus, _ = load_corpus(config.corpus)
    if index is None and corpus is not None:
        if config.index and Path(config.index).exists():
            index = load_index(config.index)
        else:
            index = build_index(corpus)

    rounds: dict[str, RoundRecord] = {}
    state = {"corpus": corpus, "index": index, "config": config, "rounds": rounds}
    app.state.debatesim = state

    # -- helpers -------------------------------------------------------------

    def require_token(token: str | None) -> None:
        expected = os.environ.get(TOKEN_ENV)
        if expected and token != expected:
            raise HTTPException(status_code=401, detail="missing or bad token")

    def require_corpus() -> None:
        if state["corpus"] is None or state["index"] is None:
            raise HTTPException(status_code=503, detail="CorpusUnavailable")

    def get_record(round_id: str) -> RoundRecord:
        record = rounds.get(round_id)
        if record is None:
            raise HTTPException(status_code=404, detail="UnknownRound")
        return record

    def make_audio_hook(round_id: str, log: EventLog):
        if not config.tts:
            return None
        profile = config.tts_profile()
        client = tts_client_for(profile)

        def hook(item, entry) -> None:
            from .arguments import Speech

            if not isinstance(entry, Speech):
                return
            script = realize_script(entry, state["corpus"], voice_id=profile.voice_for(entry.slot))
            audio = synthesize(script, profile, client=client)
            path = write_audio(audio, config.output_dir, round_id)
            log.emit("audio_ready", {"item": item.code, "slot": entry.slot.code,
                                     "path": str(path), "format": audio.format})

        return hook

    def start_round(body: CreateRound) -> str:
        require_corpus()
        if not body.resolution.strip():
            raise HTTPException(status_code=400, detail="InvalidConfig: resolution is empty")
        round_id = body.round_id or uuid.uuid4().hex[:12]
        if round_id in rounds:
            raise HTTPException(status_code=409, detail=f"round {round_id} already exists")
        try:
            assignment = ParticipantAssignment.with_humans(body.humans)
            round_config = RoundConfig(
                resolution=body.resolution,
                assignment=assignment,
                speech_profile=config.profile(config.speech_profile),
                judges=tuple(config.judge_profiles()),
                seed=body.seed,
                year_pin=config.year_pin,
                max_iterations=config.max_iterations,
                evidence_k=config.evidence_k,
                advantage_count=config.advantage_count,
                cx_pairs=config.cx_pairs,
                repair_budget=config.repair_budget,
            )
        except (KeyError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=f"InvalidConfig: {exc}") from exc

        round_dir = Path(config.output_dir) / "rounds" / round_id
        round_dir.mkdir(parents=True, exist_ok=True)
        log = EventLog(round_id, persist_path=round_dir / "events.ndjson")
        engines = Engines(
            corpus=state["corpus"],
            index=state["index"],
            gateway=build_gateway(config, mock_script=body.mock_script),
        )
        engine = RoundEngine(
            round_config, engines, round_id=round_id, event_log=log,
            checkpoint_path=round_dir / "checkpoint.json",
        )
        engine.on_commit = make_audio_hook(round_id, log)
        log.emit("round_created", {"resolution": body.resolution, "round_id": round_id})

        def drive() -> None:
            try:
                while engine.status not in ("complete", "failed"):
                    engine.run(block_on_human=True, human_timeout=0.25)
            except RoundFailed as exc:
                logger.warning("round %s failed: %s", round_id, exc)
            except Exception:
                logger.exception("round %s crashed", round_id)
                log.emit("failed", {"item": "internal", "error": "internal error"})
            finally:
                log.close()

        thread = threading.Thread(target=drive, name=f"round-{round_id}", daemon=True)
        rounds[round_id] = RoundRecord(engine, log, thread, round_dir)
        thread.start()
        return round_id

    # -- endpoints ----------------------------------------------------------

    @app.post("/rounds")
    def create_round(body: CreateRound, x_debatesim_token: str | None = Header(default=None)):
        require_token(x_debatesim_token)
        round_id = start_round(body)
        return {"round_id": round_id}

    @app.post("/topics")
    def propose_topic(body: ProposeTopic, x_debatesim_token: str | None = Header(default=None)):
        require_token(x_debatesim_token)
        round_id = start_round(CreateRound(resolution=body.resolution))
        return {"round_id": round_id}

    @app.get("/rounds/{round_id}")
    def round_status(round_id: str):
        record = get_record(round_id)
        engine = record.engine
        cursor_item = (
            engine.order[engine.cursor].code if engine.cursor < len(engine.order) else None
        )
        return {
            "round_id": round_id,
            "status": engine.status,
            "cursor_item": cursor_item,
            "resolution": engine.config.resolution,
            "last_sequence": record.log.last_sequence,
        }

    @app.get("/rounds/{round_id}/events")
    async def stream_events(
        round_id: str,
        from_sequence: int = Query(default=0, ge=0),
        wait: bool = Query(default=True, description="false: replay current events and end"),
        last_event_id: str | None = Header(default=None),
    ):
        record = get_record(round_id)
        start = from_sequence
        if last_event_id:
            try:
                start = max(start, int(last_event_id) + 1)
            except ValueError:
                pass

        async def generate():
            cursor = max(start, 1)
            idle = 0.0
            while True:
                batch = record.log.snapshot(cursor)
                for event in batch:
                    yield _sse(event)
                if batch:
                    cursor = batch[-1].sequence + 1
                    idle = 0.0
                if record.log.closed and not record.log.snapshot(cursor):
                    return
                if not wait:
                    return  # snapshot mode: caller reconnects with from_sequence
                idle += STREAM_POLL_SECONDS
                if idle >= 15.0:
                    yield ": keepalive\n\n"
                    idle = 0.0
                await asyncio.sleep(STREAM_POLL_SECONDS)

        return StreamingResponse(
            generate(),
            media_type="text/event-stream",
            headers={"Cache-Control": "no-cache", "X-Accel-Buffering": "no"},
        )

    @app.post("/rounds/{round_id}/speeches/{item_code}")
    def submit_speech(
        round_id: str,
        item_code: str,
        body: SpeechSubmission,
        x_debatesim_token: str | None = Header(default=None),
    ):
        require_token(x_debatesim_token)
        record = get_record(round_id)
        try:
            record.engine.submit_human(item_code, body.content)
        except WrongSlot as exc:
            raise HTTPException(status_code=409, detail={"error": "WrongSlot", "expected": exc.expected}) from exc
        except NotAwaitingHuman as exc:
            raise HTTPException(status_code=409, detail={"error": "NotAwaitingHuman", "message": str(exc)}) from exc
        except InvalidHumanSubmission as exc:
            raise HTTPException(
                status_code=422, detail={"error": "ValidationFailed", "violations": exc.violations}
            ) from exc
        return {"accepted": True, "item": item_code}

    @app.get("/rounds/{round_id}/transcript")
    def get_transcript(round_id: str, format: str = Query(default="json")):
        record = get_record(round_id)
        transcript = record.engine.transcript
        if format == "json":
            return transcript_to_dict(transcript)
        if format in ("display", "spoken"):
            return PlainTextResponse(render_transcript(transcript, state["corpus"], format))
        raise HTTPException(status_code=400, detail=f"unknown format {format!r}")

    @app.get("/rounds/{round_id}/audio/{slot}")
    def get_audio(round_id: str, slot: str):
        record = get_record(round_id)
        audio_dir = record.round_dir / "audio"
        matches = sorted(audio_dir.glob(f"{slot}.*")) if audio_dir.exists() else []
        if not matches:
            raise HTTPException(status_code=404, detail="no audio for that slot")
        return FileResponse(matches[0])

    @app.get("/search")
    def search_evidence(q: str, k: int = Query(default=10, ge=1, le=100)):
        require_corpus()
        hits = search(state["index"], q, k)
        out = []
        for hit in hits:
            card = state["corpus"].get_card(hit.card_id)
            out.append(
                {
                    "card_id": hit.card_id,
                    "score": hit.score,
                    "rank": hit.rank,
                    "tag": card.tag,
                    "cite": card.cite,
                }
            )
        return {"query": q, "hits": out}

    @app.get("/healthz")
    def healthz():
        return {"ok": True, "rounds": len(rounds)}

    return app
