"""Debate card corpus: parsing, validated ingestion, verbatim storage.

A card is one verbatim quotation from a published source plus the
apparatus debaters attach to it: a short abstractive tag (the claim the
card supports), a short cite, the full citation, and highlight spans
marking the extractively emphasized stretches of the body.

The store's core contract is the verbatim guarantee: after ingest, a
card body is immutable and byte-identical to what the ingest file
carried.  Everything downstream (transcript rendering, spoken delivery,
faithfulness checks) leans on that.

Ingest format: UTF-8, one JSON object per line with fields ``id``,
``tag``, ``cite``, ``full_citation``, ``body``, ``highlights`` (array of
``[start, end]`` integer pairs), and optional ``source_topic`` / ``year``.
Highlight offsets count Unicode scalar values, not bytes.
"""

from __future__ import annotations

import io
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

logger = logging.getLogger(__name__)

REQUIRED_FIELDS = ("id", "tag", "cite", "full_citation", "body", "highlights")
NON_EMPTY_FIELDS = ("id", "tag", "cite", "body")


class CorpusError(Exception):
    """Base class for corpus failures."""


class CardParseError(CorpusError):
    """A single record could not be turned into a valid Card.

    ``reason`` is a stable machine-readable code (``MissingField``,
    ``MalformedSpan``, ``EmptyBody``, ``BadJson``, ``BadType``), ``field``
    names the offending field when there is one.
    """

    def __init__(self, reason: str, detail: str, field_name: str | None = None):
        super().__init__(f"{reason}: {detail}")
        self.reason = reason
        self.detail = detail
        self.field = field_name


class UnknownCardId(CorpusError):
    def __init__(self, card_id: str):
        super().__init__(f"unknown card id: {card_id!r}")
        self.card_id = card_id


class CorruptFile(CorpusError):
    """Raised when a non-empty ingest file yields zero parseable records."""


@dataclass(frozen=True)
class Card:
    """One unit of debate evidence.

    Invariants (enforced by :func:`parse_card_record`):
      * tag, cite, body non-empty
      * each highlight satisfies 0 <= start < end <= len(body)
      * highlights sorted ascending by start and non-overlapping
    """

    id: str
    tag: str
    cite: str
    full_citation: str
    body: str
    highlights: tuple[tuple[int, int], ...] = ()
    source_topic: str | None = None
    year: int | None = None

    def highlighted_spans(self) -> list[str]:
        """Texts of the highlighted stretches, in body order."""
        return [self.body[a:b] for a, b in self.highlights]


@dataclass
class IngestReport:
    """Outcome of one ingest pass; accepted + rejected == total_lines."""

    total_lines: int = 0
    accepted: int = 0
    rejected: int = 0
    rejection_reasons: list[tuple[int, str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "total_lines": self.total_lines,
            "accepted": self.accepted,
            "rejected": self.rejected,
            "rejection_reasons": [[n, r] for n, r in self.rejection_reasons],
        }


class CorpusHandle:
    """Immutable-after-load card store keyed by id.

    Single-writer during :func:`load_corpus`; afterwards safe to share
    across concurrent readers.
    """

    def __init__(self) -> None:
        self._cards: dict[str, Card] = {}

    @property
    def card_count(self) -> int:
        return len(self._cards)

    def __contains__(self, card_id: str) -> bool:
        return card_id in self._cards

    def ids(self) -> Iterable[str]:
        return self._cards.keys()

    def cards(self) -> Iterable[Card]:
        return self._cards.values()

    def get_card(self, card_id: str) -> Card:
        try:
            return self._cards[card_id]
        except KeyError:
            raise UnknownCardId(card_id) from None

    def _add(self, card: Card) -> None:
        # load_corpus rejects duplicates before calling this
        self._cards[card.id] = card


def _check_spans(body: str, raw_spans: object) -> tuple[tuple[int, int], ...]:
    if not isinstance(raw_spans, list):
        raise CardParseError("BadType", "highlights must be an array", "highlights")
    spans: list[tuple[int, int]] = []
    for item in raw_spans:
        if (
            not isinstance(item, (list, tuple))
            or len(item) != 2
            or not all(isinstance(x, int) and not isinstance(x, bool) for x in item)
        ):
            raise CardParseError(
                "MalformedSpan", f"span must be a [start, end] integer pair, got {item!r}", "highlights"
            )
        start, end = item
        if not (0 <= start < end <= len(body)):
            raise CardParseError(
                "MalformedSpan",
                f"span ({start}, {end}) out of range for body of length {len(body)}",
                "highlights",
            )
        spans.append((start, end))
    for (a_start, a_end), (b_start, _) in zip(spans, spans[1:]):
        if b_start < a_end:
            raise CardParseError(
                "MalformedSpan",
                f"spans ({a_start}, {a_end}) and starting {b_start} overlap or are unsorted",
                "highlights",
            )
    return tuple(spans)


def parse_card_record(raw: str) -> Card:
    """Parse one ingest line into a Card, enforcing every Card invariant.

    Raises :class:`CardParseError` naming the violated field.
    """
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CardParseError("BadJson", str(exc)) from exc
    if not isinstance(obj, dict):
        raise CardParseError("BadJson", "record is not a JSON object")

    for name in REQUIRED_FIELDS:
        if name not in obj:
            raise CardParseError("MissingField", f"missing field {name!r}", name)
    for name in ("id", "tag", "cite", "full_citation", "body"):
        if not isinstance(obj[name], str):
            raise CardParseError("BadType", f"field {name!r} must be a string", name)
    for name in NON_EMPTY_FIELDS:
        if not obj[name]:
            reason = "EmptyBody" if name == "body" else "MissingField"
            raise CardParseError(reason, f"field {name!r} must be non-empty", name)

    source_topic = obj.get("source_topic")
    if source_topic is not None and not isinstance(source_topic, str):
        raise CardParseError("BadType", "source_topic must be a string", "source_topic")
    year = obj.get("year")
    if year is not None and (not isinstance(year, int) or isinstance(year, bool)):
        raise CardParseError("BadType", "year must be an integer", "year")

    return Card(
        id=obj["id"],
        tag=obj["tag"],
        cite=obj["cite"],
        full_citation=obj["full_citation"],
        body=obj["body"],
        highlights=_check_spans(obj["body"], obj["highlights"]),
        source_topic=source_topic,
        year=year,
    )


def serialize_card(card: Card) -> str:
    """One ingest line for ``card``; inverse of :func:`parse_card_record`."""
    obj: dict = {
        "id": card.id,
        "tag": card.tag,
        "cite": card.cite,
        "full_citation": card.full_citation,
        "body": card.body,
        "highlights": [[a, b] for a, b in card.highlights],
    }
    if card.source_topic is not None:
        obj["source_topic"] = card.source_topic
    if card.year is not None:
        obj["year"] = card.year
    return json.dumps(obj, ensure_ascii=False)


def ingest_lines(lines: Iterator[str]) -> tuple[CorpusHandle, IngestReport]:
    """Single-pass streaming ingest of raw record lines.

    Every unparseable or duplicate-id record is logged to the report,
    never silently dropped.  Duplicate ids reject the *later* record so
    stored evidence is never mutated.
    """
    handle = CorpusHandle()
    report = IngestReport()
    for line_no, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped:
            continue
        report.total_lines += 1
        try:
            card = parse_card_record(stripped)
        except CardParseError as exc:
            report.rejected += 1
            report.rejection_reasons.append((line_no, exc.reason))
            continue
        if card.id in handle:
            report.rejected += 1
            report.rejection_reasons.append((line_no, "DuplicateId"))
            continue
        handle._add(card)
        report.accepted += 1
    return handle, report


def load_corpus(path: str | Path) -> tuple[CorpusHandle, IngestReport]:
    """Load an ndjson card file from disk.

    Raises ``OSError`` for unreadable paths and :class:`CorruptFile`
    when a non-empty file yields zero parseable records.
    """
    path = Path(path)
    with io.open(path, "r", encoding="utf-8") as fh:
        handle, report = ingest_lines(fh)
    if report.total_lines > 0 and report.accepted == 0:
        raise CorruptFile(f"{path}: no record parsed ({report.total_lines} lines)")
    if report.rejected:
        logger.warning("ingest of %s rejected %d/%d records", path, report.rejected, report.total_lines)
    return handle, report


def verify_verbatim(handle: CorpusHandle, card_id: str, quoted: str) -> bool:
    """True iff ``quoted`` is byte-identical to the stored body of ``card_id``."""
    return handle.get_card(card_id).body == quoted


# Converter stub for the public evidence dataset.  The upstream column
# layout is not pinned down anywhere authoritative, so this maps the
# commonly seen column names onto the ingest schema and leaves the rest
# to the operator.
DATASET_COLUMN_MAP = {
    "id": "id",
    "tag": "tag",
    "cite": "cite",
    "fullcite": "full_citation",
    "full_citation": "full_citation",
    "fulltext": "body",
    "body": "body",
    "highlights": "highlights",
    "topic": "source_topic",
    "year": "year",
}


def convert_dataset_row(row: dict, column_map: dict[str, str] | None = None) -> dict:
    """Map an upstream dataset row onto the ingest record schema.

    Unknown columns are dropped; missing highlight data becomes an empty
    span list.  Returns a dict ready for ``json.dumps`` + ingest.
    """
    mapping = column_map or DATASET_COLUMN_MAP
    record: dict = {}
    for src, dst in mapping.items():
        if src in row and row[src] is not None:
            record[dst] = row[src]
    record.setdefault("full_citation", "")
    record.setdefault("highlights", [])
    return record
