"""The structured vocabulary of a policy round and its text realization.

Cases, off-case positions, speeches, cross-examinations, and the
transcript are immutable values referencing evidence by card id; bodies
are never copied out of the corpus, so the verbatim guarantee holds by
construction.  Two renderings exist:

* ``display`` -- markdown for the on-screen transcript.  Each evidence
  block shows ``Argument:`` (the AI-authored claim), then ``Evidence:``
  with the bold original tag, the citation, the body verbatim on its own
  lines, and one ``Highlight:`` line per emphasized span.
* ``spoken`` -- plain text as it would be voiced.  The original tag is
  never spoken; a card is read as argument, cite, then its highlighted
  spans (the full body when a card has no highlights).

Both renderings are pure functions of (value, corpus), so identical
inputs produce byte-identical text.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .corpus import CorpusHandle, UnknownCardId
from .slots import SpeechSlot, CX_QUESTIONER, canonical_order

TRANSCRIPT_FORMAT_VERSION = 1

OFFCASE_KINDS = ("topicality", "disadvantage", "counterplan", "kritik")
AUTHORS = ("ai", "human")


class RenderError(Exception):
    pass


# ---------------------------------------------------------------------------
# Values
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ArgumentBlock:
    """A rewritten claim backed by one card; ``block_id`` is the stable
    address rebuttals use to target it."""

    argument: str
    card_id: str
    original_tag: str = ""
    block_id: str | None = None

    def __post_init__(self) -> None:
        if not self.argument:
            raise ValueError("argument must be non-empty")
        if not self.card_id:
            raise ValueError("card_id must be non-empty")


@dataclass(frozen=True)
class AdvantageChain:
    """Uniqueness -> Link -> Internal Link -> Impact causal scaffold;
    also the shape of a disadvantage."""

    title: str
    uniqueness: ArgumentBlock
    link: ArgumentBlock
    internal_link: ArgumentBlock
    impact: ArgumentBlock

    def blocks(self) -> list[tuple[str, ArgumentBlock]]:
        return [
            ("uniqueness", self.uniqueness),
            ("link", self.link),
            ("internal_link", self.internal_link),
            ("impact", self.impact),
        ]


@dataclass(frozen=True)
class AffCase:
    resolution: str
    plantext: str
    harms: tuple[ArgumentBlock, ...]
    inherency: tuple[ArgumentBlock, ...]
    solvency: tuple[ArgumentBlock, ...]
    advantages: tuple[AdvantageChain, ...]


@dataclass(frozen=True)
class TopicalityPayload:
    interpretation: ArgumentBlock
    violation: ArgumentBlock
    standards: ArgumentBlock


@dataclass(frozen=True)
class DisadvantagePayload:
    chain: AdvantageChain


@dataclass(frozen=True)
class CounterplanPayload:
    counterplan_text: str
    solvency: tuple[ArgumentBlock, ...]

    def __post_init__(self) -> None:
        if not self.counterplan_text:
            raise ValueError("counterplan_text must be non-empty")


@dataclass(frozen=True)
class KritikPayload:
    link: ArgumentBlock
    alternative_text: str
    alternative_support: ArgumentBlock

    def __post_init__(self) -> None:
        if not self.alternative_text:
            raise ValueError("kritik alternative must be non-empty")


_PAYLOAD_TYPES = {
    "topicality": TopicalityPayload,
    "disadvantage": DisadvantagePayload,
    "counterplan": CounterplanPayload,
    "kritik": KritikPayload,
}


@dataclass(frozen=True)
class OffCasePosition:
    kind: str
    payload: object
    title: str = ""

    def __post_init__(self) -> None:
        if self.kind not in OFFCASE_KINDS:
            raise ValueError(f"unknown off-case kind {self.kind!r}")
        expected = _PAYLOAD_TYPES[self.kind]
        if not isinstance(self.payload, expected):
            raise ValueError(f"{self.kind} payload must be {expected.__name__}")


@dataclass(frozen=True)
class OnCaseAttack:
    target_block_id: str
    block: ArgumentBlock


@dataclass(frozen=True)
class NegStrategy:
    positions: tuple[OffCasePosition, ...]
    on_case: tuple[OnCaseAttack, ...]

    def __post_init__(self) -> None:
        if not self.positions:
            raise ValueError("negative strategy needs at least one off-case position")


@dataclass(frozen=True)
class AnalyticSegment:
    text: str


@dataclass(frozen=True)
class EvidenceSegment:
    block: ArgumentBlock


@dataclass(frozen=True)
class ResponseSegment:
    """A reply to a prior argument, addressed by its block id; may carry
    its own evidence."""

    target_block_id: str
    text: str
    block: ArgumentBlock | None = None


Segment = AnalyticSegment | EvidenceSegment | ResponseSegment


@dataclass(frozen=True)
class Speech:
    slot: SpeechSlot
    author: str
    segments: tuple[Segment, ...]

    def __post_init__(self) -> None:
        if self.author not in AUTHORS:
            raise ValueError(f"author must be one of {AUTHORS}")

    def blocks(self) -> list[ArgumentBlock]:
        out = []
        for seg in self.segments:
            if isinstance(seg, EvidenceSegment):
                out.append(seg.block)
            elif isinstance(seg, ResponseSegment) and seg.block is not None:
                out.append(seg.block)
        return out


@dataclass(frozen=True)
class CrossEx:
    questioner_slot: SpeechSlot
    answerer_slot: SpeechSlot
    exchanges: tuple[tuple[str, str], ...]

    def __post_init__(self) -> None:
        if not self.exchanges:
            raise ValueError("cross-examination needs at least one exchange")


@dataclass(frozen=True)
class JudgeDecision:
    judge_id: str
    winner: str
    rfd: str

    def __post_init__(self) -> None:
        if self.winner not in ("AFF", "NEG"):
            raise ValueError("winner must be AFF or NEG")
        if not self.rfd:
            raise ValueError("rfd must be non-empty")


@dataclass
class Transcript:
    resolution: str
    entries: list = field(default_factory=list)
    decision: JudgeDecision | None = None

    def speeches(self) -> list[Speech]:
        return [e for e in self.entries if isinstance(e, Speech)]


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def _check_block(name: str, block: ArgumentBlock, corpus: CorpusHandle, violations: list[str]) -> None:
    if block.card_id not in corpus:
        violations.append(f"{name}: unknown card id {block.card_id!r}")


def validate_case(case: AffCase, corpus: CorpusHandle) -> list[str]:
    """Every violated structural invariant of an affirmative case, not
    just the first; an empty list means the case is well-formed."""
    violations: list[str] = []
    if not case.plantext:
        violations.append("plantext: must be non-empty")
    for issue in ("harms", "inherency", "solvency"):
        blocks = getattr(case, issue)
        if not blocks:
            violations.append(f"{issue}: at least one block required")
        for i, block in enumerate(blocks, start=1):
            _check_block(f"{issue}[{i}]", block, corpus, violations)
    if not case.advantages:
        violations.append("advantages: at least one advantage required")
    for i, adv in enumerate(case.advantages, start=1):
        for part, block in adv.blocks():
            _check_block(f"advantage[{i}].{part}", block, corpus, violations)
    return violations


def validate_speech(speech: Speech, corpus: CorpusHandle, known_targets: set[str] | None = None) -> tuple[list[str], list[str]]:
    """Returns (violations, warnings).  Unresolvable evidence is a
    violation; a response target that matches no known block id is only
    a warning (line-by-line coverage is advisory)."""
    violations: list[str] = []
    warnings: list[str] = []
    if not speech.segments:
        violations.append("speech has no segments")
    for i, seg in enumerate(speech.segments, start=1):
        if isinstance(seg, AnalyticSegment):
            if not seg.text:
                violations.append(f"segment[{i}]: analytic text empty")
        elif isinstance(seg, EvidenceSegment):
            _check_block(f"segment[{i}]", seg.block, corpus, violations)
        elif isinstance(seg, ResponseSegment):
            if not seg.text:
                violations.append(f"segment[{i}]: response text empty")
            if seg.block is not None:
                _check_block(f"segment[{i}]", seg.block, corpus, violations)
            if known_targets is not None and seg.target_block_id not in known_targets:
                warnings.append(f"segment[{i}]: target {seg.target_block_id!r} matches no prior block")
    return violations, warnings


def validate_entry_order(entries: list) -> list[str]:
    """Check that transcript entries are a prefix of the canonical order."""
    violations = []
    order = canonical_order()
    if len(entries) > len(order):
        violations.append(f"too many entries: {len(entries)} > {len(order)}")
        return violations
    for i, entry in enumerate(entries):
        item = order[i]
        if isinstance(entry, Speech):
            ok = item.kind == "speech" and entry.slot == item.slot
        elif isinstance(entry, CrossEx):
            ok = item.kind == "cx" and entry.answerer_slot == item.slot
        else:
            violations.append(f"entry[{i}]: unknown entry type {type(entry).__name__}")
            continue
        if not ok:
            violations.append(f"entry[{i}]: expected {item.code}")
    return violations


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def _evidence_display(block: ArgumentBlock, corpus: CorpusHandle) -> str:
    try:
        card = corpus.get_card(block.card_id)
    except UnknownCardId as exc:
        raise RenderError(str(exc)) from exc
    cite_line = card.cite if not card.full_citation else f"{card.cite} | {card.full_citation}"
    lines = [
        f"Argument: {block.argument}",
        "",
        "Evidence:",
        f"**{card.tag}**",
        cite_line,
        card.body,
    ]
    lines.extend(f"Highlight: {span}" for span in card.highlighted_spans())
    return "\n".join(lines)


def _evidence_spoken(block: ArgumentBlock, corpus: CorpusHandle) -> str:
    try:
        card = corpus.get_card(block.card_id)
    except UnknownCardId as exc:
        raise RenderError(str(exc)) from exc
    spans = card.highlighted_spans()
    read = " ".join(spans) if spans else card.body  # unhighlighted cards are voiced in full
    return "\n".join([block.argument, card.cite, read])


def _segment_display(seg: Segment, corpus: CorpusHandle) -> str:
    if isinstance(seg, AnalyticSegment):
        return seg.text
    if isinstance(seg, EvidenceSegment):
        return _evidence_display(seg.block, corpus)
    parts = [f"Response to [{seg.target_block_id}]: {seg.text}"]
    if seg.block is not None:
        parts.append(_evidence_display(seg.block, corpus))
    return "\n\n".join(parts)


def _segment_spoken(seg: Segment, corpus: CorpusHandle) -> str:
    if isinstance(seg, AnalyticSegment):
        return seg.text
    if isinstance(seg, EvidenceSegment):
        return _evidence_spoken(seg.block, corpus)
    parts = [seg.text]
    if seg.block is not None:
        parts.append(_evidence_spoken(seg.block, corpus))
    return "\n".join(parts)


def render_speech(speech: Speech, corpus: CorpusHandle, mode: str = "display") -> str:
    if mode == "display":
        return "\n\n".join(_segment_display(seg, corpus) for seg in speech.segments)
    if mode == "spoken":
        return "\n\n".join(_segment_spoken(seg, corpus) for seg in speech.segments)
    raise ValueError(f"unknown mode {mode!r}")


def render_cx(cx: CrossEx, mode: str = "display") -> str:
    if mode == "display":
        pairs = [
            f"Q ({cx.questioner_slot.code}): {q}\nA ({cx.answerer_slot.code}): {a}"
            for q, a in cx.exchanges
        ]
    else:
        pairs = [f"{q}\n{a}" for q, a in cx.exchanges]
    return "\n\n".join(pairs)


def speech_heading(slot: SpeechSlot, author: str) -> str:
    return f"## Speech {slot.code} ({author})"


def cx_heading(answerer: SpeechSlot) -> str:
    return f"## Cross-Examination after {answerer.code}"


def render_transcript(transcript: Transcript, corpus: CorpusHandle, mode: str = "display") -> str:
    """Realize the whole round; display is markdown, spoken is plain text."""
    if mode not in ("display", "spoken"):
        raise ValueError(f"unknown mode {mode!r}")
    chunks: list[str] = []
    if mode == "display":
        chunks.append(f"# Round: {transcript.resolution}")
    for entry in transcript.entries:
        if isinstance(entry, Speech):
            if mode == "display":
                chunks.append(speech_heading(entry.slot, entry.author))
            chunks.append(render_speech(entry, corpus, mode))
        elif isinstance(entry, CrossEx):
            if mode == "display":
                chunks.append(cx_heading(entry.answerer_slot))
            chunks.append(render_cx(entry, mode))
        else:
            raise RenderError(f"unknown entry type {type(entry).__name__}")
    if transcript.decision is not None:
        if mode == "display":
            chunks.append("## Decision")
            chunks.append(f"Winner: {transcript.decision.winner}")
            chunks.append(transcript.decision.rfd)
        else:
            chunks.append(f"The decision goes to the {transcript.decision.winner}.")
            chunks.append(transcript.decision.rfd)
    return "\n\n".join(chunks) + "\n"


# ---------------------------------------------------------------------------
# Serialization (versioned JSON mirroring the type structure)
# ---------------------------------------------------------------------------


def _block_to_dict(block: ArgumentBlock) -> dict:
    out = {"argument": block.argument, "card_id": block.card_id, "original_tag": block.original_tag}
    if block.block_id is not None:
        out["block_id"] = block.block_id
    return out


def _block_from_dict(obj: dict) -> ArgumentBlock:
    return ArgumentBlock(
        argument=obj["argument"],
        card_id=obj["card_id"],
        original_tag=obj.get("original_tag", ""),
        block_id=obj.get("block_id"),
    )


def _segment_to_dict(seg: Segment) -> dict:
    if isinstance(seg, AnalyticSegment):
        return {"kind": "analytic", "text": seg.text}
    if isinstance(seg, EvidenceSegment):
        return {"kind": "evidence", "block": _block_to_dict(seg.block)}
    out = {"kind": "response", "target": seg.target_block_id, "text": seg.text}
    if seg.block is not None:
        out["block"] = _block_to_dict(seg.block)
    return out


def _segment_from_dict(obj: dict) -> Segment:
    kind = obj.get("kind")
    if kind == "analytic":
        return AnalyticSegment(text=obj["text"])
    if kind == "evidence":
        return EvidenceSegment(block=_block_from_dict(obj["block"]))
    if kind == "response":
        block = _block_from_dict(obj["block"]) if "block" in obj else None
        return ResponseSegment(target_block_id=obj["target"], text=obj["text"], block=block)
    raise ValueError(f"unknown segment kind {kind!r}")


def speech_to_dict(speech: Speech) -> dict:
    return {
        "type": "speech",
        "slot": speech.slot.code,
        "author": speech.author,
        "segments": [_segment_to_dict(s) for s in speech.segments],
    }


def speech_from_dict(obj: dict) -> Speech:
    return Speech(
        slot=SpeechSlot(obj["slot"]),
        author=obj["author"],
        segments=tuple(_segment_from_dict(s) for s in obj["segments"]),
    )


def cx_to_dict(cx: CrossEx) -> dict:
    return {
        "type": "cx",
        "questioner_slot": cx.questioner_slot.code,
        "answerer_slot": cx.answerer_slot.code,
        "exchanges": [[q, a] for q, a in cx.exchanges],
    }


def cx_from_dict(obj: dict) -> CrossEx:
    return CrossEx(
        questioner_slot=SpeechSlot(obj["questioner_slot"]),
        answerer_slot=SpeechSlot(obj["answerer_slot"]),
        exchanges=tuple((q, a) for q, a in obj["exchanges"]),
    )


def entry_to_dict(entry) -> dict:
    if isinstance(entry, Speech):
        return speech_to_dict(entry)
    if isinstance(entry, CrossEx):
        return cx_to_dict(entry)
    raise ValueError(f"unknown entry type {type(entry).__name__}")


def entry_from_dict(obj: dict):
    if obj.get("type") == "speech":
        return speech_from_dict(obj)
    if obj.get("type") == "cx":
        return cx_from_dict(obj)
    raise ValueError(f"unknown entry type {obj.get('type')!r}")


def decision_to_dict(decision: JudgeDecision) -> dict:
    return {"judge_id": decision.judge_id, "winner": decision.winner, "rfd": decision.rfd}


def decision_from_dict(obj: dict) -> JudgeDecision:
    return JudgeDecision(judge_id=obj["judge_id"], winner=obj["winner"], rfd=obj["rfd"])


def transcript_to_dict(transcript: Transcript) -> dict:
    return {
        "v": TRANSCRIPT_FORMAT_VERSION,
        "resolution": transcript.resolution,
        "entries": [entry_to_dict(e) for e in transcript.entries],
        "decision": decision_to_dict(transcript.decision) if transcript.decision else None,
    }


def transcript_from_dict(obj: dict) -> Transcript:
    version = obj.get("v")
    if version != TRANSCRIPT_FORMAT_VERSION:
        raise ValueError(f"unsupported transcript version {version!r}")
    return Transcript(
        resolution=obj["resolution"],
        entries=[entry_from_dict(e) for e in obj["entries"]],
        decision=decision_from_dict(obj["decision"]) if obj.get("decision") else None,
    )


def canonical_json(obj: dict) -> str:
    """Stable serialization used wherever byte-identity matters."""
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":")) + "\n"


def make_cx_slots(constructive: SpeechSlot) -> tuple[SpeechSlot, SpeechSlot]:
    """(questioner, answerer) slots of the CX after a constructive."""
    return SpeechSlot(CX_QUESTIONER[constructive.code]), constructive
