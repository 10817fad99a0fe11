"""Per-round event log: gap-free sequences, replay, live subscription.

One writer (the round's pipeline) appends; any number of readers replay
from a sequence position and then follow live.  The full log stays in
memory and is optionally mirrored to an append-only ndjson file so
completed rounds can be reconstructed after the fact.
"""

from __future__ import annotations

import json
import logging
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

logger = logging.getLogger(__name__)

EVENT_SCHEMA_VERSION = 1

EVENT_KINDS = (
    "round_created",
    "item_started",
    "draft",
    "search",
    "retrieve",
    "verdict",
    "speech_committed",
    "cx_committed",
    "awaiting_human",
    "human_committed",
    "decision",
    "audio_ready",
    "failed",
)

# terminal kinds close the stream to late subscribers
_TERMINAL = ("decision", "failed")


@dataclass(frozen=True)
class RoundEvent:
    round_id: str
    sequence: int
    kind: str
    payload: dict
    timestamp: float

    def to_dict(self) -> dict:
        return {
            "v": EVENT_SCHEMA_VERSION,
            "round_id": self.round_id,
            "sequence": self.sequence,
            "kind": self.kind,
            "payload": self.payload,
            "timestamp": self.timestamp,
        }


def event_from_dict(obj: dict) -> RoundEvent:
    return RoundEvent(
        round_id=obj["round_id"],
        sequence=obj["sequence"],
        kind=obj["kind"],
        payload=obj.get("payload", {}),
        timestamp=obj.get("timestamp", 0.0),
    )


class EventLog:
    """Append-only, sequence-numbered event store for one round."""

    def __init__(self, round_id: str, persist_path: str | Path | None = None):
        self.round_id = round_id
        self._events: list[RoundEvent] = []
        self._cond = threading.Condition()
        self._closed = False
        self._persist_path = Path(persist_path) if persist_path else None

    @property
    def closed(self) -> bool:
        return self._closed

    @property
    def last_sequence(self) -> int:
        with self._cond:
            return len(self._events)

    def emit(self, kind: str, payload: dict | None = None) -> RoundEvent | None:
        """Append one event; events after close are dropped with a warning."""
        if kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {kind!r}")
        with self._cond:
            if self._closed:
                logger.warning("event %s dropped: stream for round %s is closed", kind, self.round_id)
                return None
            event = RoundEvent(
                round_id=self.round_id,
                sequence=len(self._events) + 1,
                kind=kind,
                payload=payload or {},
                timestamp=time.time(),
            )
            self._events.append(event)
            if kind in _TERMINAL:
                self._closed = True
            self._cond.notify_all()
        if self._persist_path is not None:
            with self._persist_path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(event.to_dict(), ensure_ascii=False) + "\n")
        return event

    def close(self) -> None:
        with self._cond:
            self._closed = True
            self._cond.notify_all()

    def snapshot(self, from_sequence: int = 0) -> list[RoundEvent]:
        """All events with sequence >= from_sequence, as of now."""
        with self._cond:
            return [e for e in self._events if e.sequence >= from_sequence]

    def follow(self, from_sequence: int = 0, poll_timeout: float = 0.2) -> Iterator[RoundEvent]:
        """Replay from ``from_sequence`` then yield live events until the
        log closes.  Reconnecting with last-seen + 1 loses nothing."""
        cursor = max(from_sequence, 1)
        while True:
            with self._cond:
                while len(self._events) < cursor and not self._closed:
                    self._cond.wait(timeout=poll_timeout)
                batch = self._events[cursor - 1 :]
                closed = self._closed
            for event in batch:
                yield event
            cursor += len(batch)
            if closed and not batch:
                return
            if closed:
                with self._cond:
                    drained = cursor > len(self._events)
                if drained:
                    return


def read_event_file(path: str | Path) -> list[RoundEvent]:
    events = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            events.append(event_from_dict(json.loads(line)))
    return events
