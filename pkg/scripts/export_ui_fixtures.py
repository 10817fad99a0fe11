#!/usr/bin/env python3
"""Export frontend test fixtures from real engine runs.

Produces, under frontend/test/fixtures/:
  round_ai.events.ndjson         - full event log of an all-AI mock round
  round_ai.transcript.md         - its CLI display rendering
  round_human2ac.events.ndjson   - log of a round where a human gave the 2AC
  round_human2ac.transcript.md   - its CLI display rendering
  submission_2ac.json            - the human 2AC submission content
  search_results.json            - /search response for the composer panel

The frontend's fold/render tests compare their output byte-for-byte
against these, so the view model provably matches the CLI rendering.

Usage: python3 scripts/export_ui_fixtures.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from debatesim.arguments import render_transcript
from debatesim.corpus import load_corpus
from debatesim.events import EventLog
from debatesim.gateway import Gateway, ScriptedProvider
from debatesim.indexing import load_index, search
from debatesim.pipeline import Engines, ParticipantAssignment, RoundConfig, RoundEngine

FIXTURES = ROOT / "fixtures"
OUT = ROOT / "frontend" / "test" / "fixtures"

SUBMISSION_2AC = {
    "text": (
        "We answer the disadvantage on timing, extend both advantages, and the "
        "permutation resolves the kritik; the counterplan cannot enforce interstate leakage."
    )
}


def engines() -> Engines:
    corpus, _ = load_corpus(FIXTURES / "cards.ndjson")
    index = load_index(FIXTURES / "index.json")
    routes = json.loads((FIXTURES / "full_round.script.json").read_text("utf-8"))["routes"]
    gateway = Gateway(providers={"script": ScriptedProvider(routes)}, sleep=lambda _: None)
    return Engines(corpus=corpus, index=index, gateway=gateway)


def run(round_id: str, humans: list[str], submissions: dict[str, dict]) -> tuple:
    config = json.loads((FIXTURES / "config.json").read_text("utf-8"))
    eng = engines()
    log_path = OUT / f"{round_id}.events.ndjson"
    log_path.unlink(missing_ok=True)
    log = EventLog(round_id, persist_path=log_path)
    log.emit("round_created", {"resolution": config["resolution"], "round_id": round_id})
    engine = RoundEngine(
        RoundConfig(resolution=config["resolution"], assignment=ParticipantAssignment.with_humans(humans)),
        eng,
        round_id=round_id,
        event_log=log,
    )
    status = engine.run(block_on_human=False)
    while status == "awaiting_human":
        code = engine.order[engine.cursor].code
        engine.submit_human(code, submissions[code])
        status = engine.run(block_on_human=False)
    assert status == "complete", status
    return engine.transcript, eng.corpus


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)

    transcript, corpus = run("round_ai", [], {})
    (OUT / "round_ai.transcript.md").write_text(
        render_transcript(transcript, corpus, "display"), encoding="utf-8"
    )

    transcript, corpus = run("round_human2ac", ["2AC"], {"2AC": SUBMISSION_2AC})
    (OUT / "round_human2ac.transcript.md").write_text(
        render_transcript(transcript, corpus, "display"), encoding="utf-8"
    )
    (OUT / "submission_2ac.json").write_text(
        json.dumps(SUBMISSION_2AC, indent=2) + "\n", encoding="utf-8"
    )

    index = load_index(FIXTURES / "index.json")
    query = "clean technology investment"
    hits = search(index, query, 8)
    payload = {
        "query": query,
        "hits": [
            {
                "card_id": h.card_id,
                "score": h.score,
                "rank": h.rank,
                "tag": corpus.get_card(h.card_id).tag,
                "cite": corpus.get_card(h.card_id).cite,
            }
            for h in hits
        ],
    }
    (OUT / "search_results.json").write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")

    print(f"exported UI fixtures -> {OUT}")


if __name__ == "__main__":
    main()
