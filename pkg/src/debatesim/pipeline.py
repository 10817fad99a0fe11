"""The round state machine.

Walks the canonical twelve-item order, assembling context from the
transcript so far, dispatching the stage's workflows for AI
participants, or parking in ``awaiting_human`` until a submission
arrives for human participants.  Exactly one thread (the engine's
owner) mutates round state; human submissions from other threads are
staged under a lock and committed by the owner, which is what makes
out-of-order commits impossible by construction.

Stage structure (defaults config-overridable):

* 1AC: plantext workflow, then harms / inherency / solvency, then one
  workflow per advantage.
* 1NC: strategy selection, then one workflow per chosen off-case
  position, then on-case attacks targeting 1AC block ids.
* Rebuttals: one responsive workflow over the full prior transcript.
* CX: an alternating two-agent question/answer exchange.

After 2AR the round is judged and the decision appended.  Every commit
checkpoints to disk, so a failed round resumes without altering any
committed entry.
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass, field
from pathlib import Path

from .arguments import (
    AdvantageChain,
    AffCase,
    AnalyticSegment,
    ArgumentBlock,
    CounterplanPayload,
    CrossEx,
    DisadvantagePayload,
    EvidenceSegment,
    JudgeDecision,
    KritikPayload,
    NegStrategy,
    OffCasePosition,
    OnCaseAttack,
    ResponseSegment,
    Speech,
    TopicalityPayload,
    Transcript,
    canonical_json,
    cx_to_dict,
    decision_to_dict,
    entry_from_dict,
    make_cx_slots,
    render_cx,
    render_speech,
    render_transcript,
    speech_from_dict,
    speech_to_dict,
    transcript_from_dict,
    transcript_to_dict,
    validate_case,
    validate_speech,
)
from .corpus import CorpusHandle
from .events import EVENT_KINDS, EventLog
from .gateway import ChatMessage, Gateway, GatewayError, ModelProfile
from .indexing import Index
from .prompts import cx_answer_schema, cx_prompt, cx_question_schema
from .slots import RoundItem, SpeechSlot, canonical_order
from .workflow import WorkflowConfig, WorkflowFailure, run_workflow

logger = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1

STATUSES = ("running", "awaiting_human", "judging", "complete", "failed")


class PipelineError(Exception):
    pass


class WrongSlot(PipelineError):
    def __init__(self, submitted: str, expected: str):
        super().__init__(f"submitted {submitted!r} while round awaits {expected!r}")
        self.expected = expected


class NotAwaitingHuman(PipelineError):
    pass


class InvalidHumanSubmission(PipelineError):
    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations) or "invalid submission")
        self.violations = violations


class RoundFailed(PipelineError):
    def __init__(self, message: str, checkpoint_path: Path | None):
        super().__init__(message)
        self.checkpoint_path = checkpoint_path


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParticipantAssignment:
    """Who takes each item; CX items take two participants."""

    speeches: dict = field(default_factory=dict)  # slot code -> "ai" | "human"
    cx: dict = field(default_factory=dict)  # CX code -> {"questioner": ..., "answerer": ...}

    def __post_init__(self) -> None:
        for item in canonical_order():
            if item.kind == "speech":
                actor = self.speeches.get(item.code, "ai")
                if actor not in ("ai", "human"):
                    raise ValueError(f"bad actor {actor!r} for {item.code}")
            else:
                pair = self.cx.get(item.code, {})
                for side in ("questioner", "answerer"):
                    if pair.get(side, "ai") not in ("ai", "human"):
                        raise ValueError(f"bad actor for {item.code} {side}")

    def actor_for(self, item: RoundItem) -> str:
        """"human" when any participant of the item is human."""
        if item.kind == "speech":
            return self.speeches.get(item.code, "ai")
        pair = self.cx.get(item.code, {})
        if "human" in (pair.get("questioner", "ai"), pair.get("answerer", "ai")):
            return "human"
        return "ai"

    @classmethod
    def all_ai(cls) -> "ParticipantAssignment":
        return cls()

    @classmethod
    def with_humans(cls, codes: list[str]) -> "ParticipantAssignment":
        speeches = {}
        cx = {}
        for code in codes:
            if code.startswith("CX-"):
                cx[code] = {"questioner": "human", "answerer": "human"}
            else:
                speeches[code] = "human"
        return cls(speeches=speeches, cx=cx)

    def to_dict(self) -> dict:
        return {"speeches": dict(self.speeches), "cx": {k: dict(v) for k, v in self.cx.items()}}


def _profile_to_dict(profile: ModelProfile) -> dict:
    return {
        "provider": profile.provider,
        "model_name": profile.model_name,
        "temperature": profile.temperature,
        "max_output_tokens": profile.max_output_tokens,
        "request_timeout": profile.request_timeout,
        "rate_limit": profile.rate_limit,
    }


def _profile_from_dict(obj: dict) -> ModelProfile:
    return ModelProfile(**obj)


@dataclass(frozen=True)
class RoundConfig:
    resolution: str
    assignment: ParticipantAssignment = field(default_factory=ParticipantAssignment.all_ai)
    speech_profile: ModelProfile = ModelProfile(provider="script", model_name="scripted")
    judges: tuple[ModelProfile, ...] = (ModelProfile(provider="script", model_name="scripted"),)
    seed: int = 0
    year_pin: int = 2022
    max_iterations: int = 3
    evidence_k: int = 25
    advantage_count: int = 2
    cx_pairs: int = 4
    repair_budget: int = 2

    def __post_init__(self) -> None:
        if not self.resolution:
            raise ValueError("resolution must be non-empty")
        if not self.judges:
            raise ValueError("at least one judge profile is required")
        if self.cx_pairs < 1 or self.advantage_count < 1:
            raise ValueError("cx_pairs and advantage_count must be >= 1")

    def to_dict(self) -> dict:
        return {
            "resolution": self.resolution,
            "assignment": self.assignment.to_dict(),
            "speech_profile": _profile_to_dict(self.speech_profile),
            "judges": [_profile_to_dict(j) for j in self.judges],
            "seed": self.seed,
            "year_pin": self.year_pin,
            "max_iterations": self.max_iterations,
            "evidence_k": self.evidence_k,
            "advantage_count": self.advantage_count,
            "cx_pairs": self.cx_pairs,
            "repair_budget": self.repair_budget,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "RoundConfig":
        return cls(
            resolution=obj["resolution"],
            assignment=ParticipantAssignment(
                speeches=obj.get("assignment", {}).get("speeches", {}),
                cx=obj.get("assignment", {}).get("cx", {}),
            ),
            speech_profile=_profile_from_dict(obj["speech_profile"]),
            judges=tuple(_profile_from_dict(j) for j in obj["judges"]),
            seed=obj.get("seed", 0),
            year_pin=obj.get("year_pin", 2022),
            max_iterations=obj.get("max_iterations", 3),
            evidence_k=obj.get("evidence_k", 25),
            advantage_count=obj.get("advantage_count", 2),
            cx_pairs=obj.get("cx_pairs", 4),
            repair_budget=obj.get("repair_budget", 2),
        )


@dataclass
class Engines:
    """Everything a round needs besides its own config."""

    corpus: CorpusHandle
    index: Index
    gateway: Gateway


# ---------------------------------------------------------------------------
# Context assembly
# ---------------------------------------------------------------------------


def assemble_context(resolution: str, entries: list, corpus: CorpusHandle) -> str:
    """Resolution plus the display rendering of everything said so far.
    At the 1AC this is the resolution alone.  Contexts grow strictly:
    the context at item i is a prefix of the context at item i+1."""
    transcript = Transcript(resolution=resolution, entries=list(entries))
    return render_transcript(transcript, corpus, "display").rstrip("\n")


def known_block_ids(entries: list) -> set[str]:
    ids = set()
    for entry in entries:
        if isinstance(entry, Speech):
            for block in entry.blocks():
                if block.block_id:
                    ids.add(block.block_id)
    return ids


# ---------------------------------------------------------------------------
# Engine
# ---------------------------------------------------------------------------


class RoundEngine:
    """Single-writer driver of one round from 1AC through decision."""

    def __init__(
        self,
        config: RoundConfig,
        engines: Engines,
        round_id: str = "round",
        event_log: EventLog | None = None,
        checkpoint_path: str | Path | None = None,
        transcript: Transcript | None = None,
        cursor: int = 0,
        on_commit=None,
    ):
        self.config = config
        self.engines = engines
        self.round_id = round_id
        self.event_log = event_log
        self.checkpoint_path = Path(checkpoint_path) if checkpoint_path else None
        self.transcript = transcript or Transcript(resolution=config.resolution)
        self.order = canonical_order()
        self.cursor = cursor
        self.status = "running"
        self.on_commit = on_commit  # callback(item, entry): side effects only
        self._cond = threading.Condition()
        self._pending_entry = None

    # -- events ------------------------------------------------------------

    def _emit(self, kind: str, payload: dict | None = None) -> None:
        if self.event_log is not None:
            self.event_log.emit(kind, payload or {})

    def _workflow_emit(self, item_code: str):
        def emit(kind: str, payload: dict) -> None:
            if kind not in EVENT_KINDS:  # the workflow's "final" stays in its trace
                return
            merged = {"item": item_code}
            merged.update(payload)
            if kind == "retrieve":
                # attach tag + cite so stream consumers can show evidence
                merged["results"] = [
                    {
                        "query": result["query"],
                        "card_ids": result["card_ids"],
                        "cards": [
                            {
                                "card_id": cid,
                                "tag": self.engines.corpus.get_card(cid).tag,
                                "cite": self.engines.corpus.get_card(cid).cite,
                            }
                            for cid in result["card_ids"]
                        ],
                    }
                    for result in payload["results"]
                ]
            self._emit(kind, merged)

        return emit

    # -- checkpointing -------------------------------------------------------

    def checkpoint_dict(self) -> dict:
        return {
            "v": CHECKPOINT_VERSION,
            "round_id": self.round_id,
            "status": self.status,
            "cursor": self.cursor,
            "config": self.config.to_dict(),
            "transcript": transcript_to_dict(self.transcript),
        }

    def save_checkpoint(self) -> None:
        if self.checkpoint_path is None:
            return
        tmp = self.checkpoint_path.with_suffix(".tmp")
        tmp.write_text(canonical_json(self.checkpoint_dict()), encoding="utf-8")
        tmp.replace(self.checkpoint_path)

    # -- workflow plumbing ---------------------------------------------------

    def _run_task(self, item_code: str, task_name: str, context: str) -> dict:
        config = WorkflowConfig.for_task(
            task_name,
            max_iterations=self.config.max_iterations,
            evidence_k=self.config.evidence_k,
            year_pin=self.config.year_pin,
        )
        final, _trace = run_workflow(
            config,
            context,
            self.engines.index,
            self.engines.corpus,
            self.engines.gateway,
            self.config.speech_profile,
            emit=self._workflow_emit(item_code),
            route_prefix=item_code,
            repair_budget=self.config.repair_budget,
        )
        return final

    def _block(self, obj: dict, block_id: str) -> ArgumentBlock:
        card = self.engines.corpus.get_card(obj["card_id"])
        return ArgumentBlock(
            argument=obj["argument"],
            card_id=obj["card_id"],
            original_tag=card.tag,
            block_id=block_id,
        )

    # -- stages ----------------------------------------------------------------

    def _section(self, context: str, title: str, body: str) -> str:
        return f"{context}\n\nDraft case so far: {title}\n{body}"

    def _run_1ac(self, item: RoundItem, context: str) -> Speech:
        plantext = self._run_task(item.code, "plantext", context)["plantext"]
        context = self._section(context, "plan", plantext)

        stock: dict[str, tuple[ArgumentBlock, ...]] = {}
        for issue in ("harms", "inherency", "solvency"):
            draft = self._run_task(item.code, issue, context)
            blocks = tuple(
                self._block(b, f"1AC.{issue}.{n}") for n, b in enumerate(draft["blocks"], start=1)
            )
            stock[issue] = blocks
            context = self._section(context, issue, json.dumps(draft["blocks"], ensure_ascii=False))

        advantages = []
        for i in range(1, self.config.advantage_count + 1):
            draft = self._run_task(item.code, f"advantage-{i}", context)
            advantages.append(
                AdvantageChain(
                    title=draft["title"],
                    uniqueness=self._block(draft["uniqueness"], f"1AC.advantage{i}.uniqueness"),
                    link=self._block(draft["link"], f"1AC.advantage{i}.link"),
                    internal_link=self._block(draft["internal_link"], f"1AC.advantage{i}.internal_link"),
                    impact=self._block(draft["impact"], f"1AC.advantage{i}.impact"),
                )
            )

        case = AffCase(
            resolution=self.config.resolution,
            plantext=plantext,
            harms=stock["harms"],
            inherency=stock["inherency"],
            solvency=stock["solvency"],
            advantages=tuple(advantages),
        )
        violations = validate_case(case, self.engines.corpus)
        if violations:
            raise PipelineError(f"1AC case invalid: {violations}")

        segments: list = [AnalyticSegment(f"Plan: {case.plantext}")]
        for issue in ("harms", "inherency", "solvency"):
            segments.append(AnalyticSegment(f"{issue.capitalize()}:"))
            segments.extend(EvidenceSegment(b) for b in stock[issue])
        for i, adv in enumerate(case.advantages, start=1):
            segments.append(AnalyticSegment(f"Advantage {i}: {adv.title}"))
            segments.extend(EvidenceSegment(b) for _, b in adv.blocks())
        return Speech(slot=item.slot, author="ai", segments=tuple(segments))

    def _run_1nc(self, item: RoundItem, context: str) -> Speech:
        targets = sorted(known_block_ids(self.transcript.entries))
        context = f"{context}\n\nTargetable 1AC block ids: {', '.join(targets)}"

        strategy = self._run_task(item.code, "strategy", context)
        kinds: list[str] = strategy["positions"]

        positions: list[OffCasePosition] = []
        segments: list = []
        counts: dict[str, int] = {}
        for kind in kinds:
            counts[kind] = counts.get(kind, 0) + 1
            n = counts[kind]
            task = f"{kind}-{n}"
            draft = self._run_task(item.code, task, context)
            prefix = f"1NC.{kind}{n}"
            if kind == "topicality":
                payload = TopicalityPayload(
                    interpretation=self._block(draft["interpretation"], f"{prefix}.interpretation"),
                    violation=self._block(draft["violation"], f"{prefix}.violation"),
                    standards=self._block(draft["standards"], f"{prefix}.standards"),
                )
                title = "Topicality"
                blocks = [payload.interpretation, payload.violation, payload.standards]
                segments.append(AnalyticSegment(f"Off-case: {title}"))
                segments.extend(EvidenceSegment(b) for b in blocks)
            elif kind == "disadvantage":
                chain = AdvantageChain(
                    title=draft["title"],
                    uniqueness=self._block(draft["uniqueness"], f"{prefix}.uniqueness"),
                    link=self._block(draft["link"], f"{prefix}.link"),
                    internal_link=self._block(draft["internal_link"], f"{prefix}.internal_link"),
                    impact=self._block(draft["impact"], f"{prefix}.impact"),
                )
                payload = DisadvantagePayload(chain=chain)
                title = f"Disadvantage: {chain.title}"
                segments.append(AnalyticSegment(f"Off-case: {title}"))
                segments.extend(EvidenceSegment(b) for _, b in chain.blocks())
            elif kind == "counterplan":
                payload = CounterplanPayload(
                    counterplan_text=draft["counterplan_text"],
                    solvency=tuple(
                        self._block(b, f"{prefix}.solvency.{j}")
                        for j, b in enumerate(draft["solvency"], start=1)
                    ),
                )
                title = "Counterplan"
                segments.append(AnalyticSegment(f"Off-case: Counterplan. Text: {payload.counterplan_text}"))
                segments.extend(EvidenceSegment(b) for b in payload.solvency)
            else:  # kritik
                payload = KritikPayload(
                    link=self._block(draft["link"], f"{prefix}.link"),
                    alternative_text=draft["alternative"],
                    alternative_support=self._block(draft["alternative_support"], f"{prefix}.alternative_support"),
                )
                title = "Kritik"
                segments.append(AnalyticSegment(f"Off-case: Kritik. Alternative: {payload.alternative_text}"))
                segments.append(EvidenceSegment(payload.link))
                segments.append(EvidenceSegment(payload.alternative_support))
            positions.append(OffCasePosition(kind=kind, payload=payload, title=title))

        oncase = self._run_task(item.code, "oncase", context)
        attacks = []
        segments.append(AnalyticSegment("On-case:"))
        for j, attack in enumerate(oncase["attacks"], start=1):
            block = self._block(
                {"argument": attack["argument"], "card_id": attack["card_id"]}, f"1NC.oncase.{j}"
            )
            attacks.append(OnCaseAttack(target_block_id=attack["target_block_id"], block=block))
            segments.append(
                ResponseSegment(target_block_id=attack["target_block_id"], text=attack["argument"], block=block)
            )

        NegStrategy(positions=tuple(positions), on_case=tuple(attacks))  # invariant check
        return Speech(slot=item.slot, author="ai", segments=tuple(segments))

    def _run_rebuttal(self, item: RoundItem, context: str) -> Speech:
        targets = sorted(known_block_ids(self.transcript.entries))
        context = f"{context}\n\nTargetable block ids: {', '.join(targets)}"
        draft = self._run_task(item.code, f"rebuttal-{item.code}", context)
        segments: list = [AnalyticSegment(draft["overview"])]
        for j, resp in enumerate(draft["responses"], start=1):
            block = None
            if "card_id" in resp and "argument" in resp:
                block = self._block(
                    {"argument": resp["argument"], "card_id": resp["card_id"]},
                    f"{item.code}.response.{j}",
                )
            segments.append(
                ResponseSegment(target_block_id=resp["target_block_id"], text=resp["text"], block=block)
            )
        return Speech(slot=item.slot, author="ai", segments=tuple(segments))

    def _run_cx(self, item: RoundItem, context: str) -> CrossEx:
        questioner, answerer = make_cx_slots(item.slot)
        exchanges: list[tuple[str, str]] = []
        history = ""
        for n in range(1, self.config.cx_pairs + 1):
            q_messages = [
                ChatMessage("system", f"{cx_prompt('questioner')}\nThe current year is {self.config.year_pin}."),
                ChatMessage("user", f"{context}\n\nExchange so far:\n{history or '(none)'}\n\nAsk question {n}."),
            ]
            question = self._structured(q_messages, cx_question_schema(), f"{item.code}/cx/{n}/questioner")["question"]
            a_messages = [
                ChatMessage("system", f"{cx_prompt('answerer')}\nThe current year is {self.config.year_pin}."),
                ChatMessage("user", f"{context}\n\nExchange so far:\n{history or '(none)'}\n\nQuestion: {question}"),
            ]
            answer = self._structured(a_messages, cx_answer_schema(), f"{item.code}/cx/{n}/answerer")["answer"]
            exchanges.append((question, answer))
            history += f"Q: {question}\nA: {answer}\n"
        return CrossEx(questioner_slot=questioner, answerer_slot=answerer, exchanges=tuple(exchanges))

    def _structured(self, messages, schema, route: str) -> dict:
        result = self.engines.gateway.complete_structured(
            self.config.speech_profile, messages, schema,
            repair_budget=self.config.repair_budget, route=route,
        )
        return result.value

    # -- human submissions -------------------------------------------------

    def parse_human_entry(self, item: RoundItem, content: dict | str):
        """Validate and build the entry for a human submission.

        Speeches accept ``{"text": ...}`` (one analytic segment) or
        ``{"segments": [...]}``; CX items accept ``{"exchanges": [[q, a], ...]}``.
        """
        if isinstance(content, str):
            content = {"text": content}
        if item.kind == "speech":
            if "segments" in content:
                try:
                    speech = speech_from_dict(
                        {"slot": item.slot.code, "author": "human", "segments": content["segments"]}
                    )
                except (KeyError, ValueError, TypeError) as exc:
                    raise InvalidHumanSubmission([f"malformed segments: {exc}"]) from exc
            else:
                text = (content.get("text") or "").strip()
                if not text:
                    raise InvalidHumanSubmission(["speech text must be non-empty"])
                speech = Speech(slot=item.slot, author="human", segments=(AnalyticSegment(text),))
            violations, warnings = validate_speech(
                speech, self.engines.corpus, known_targets=known_block_ids(self.transcript.entries)
            )
            if violations:
                raise InvalidHumanSubmission(violations)
            for warning in warnings:
                logger.warning("human %s: %s", item.code, warning)
            return speech
        exchanges = content.get("exchanges") or []
        pairs = []
        for pair in exchanges:
            if not (isinstance(pair, (list, tuple)) and len(pair) == 2 and all(isinstance(x, str) and x for x in pair)):
                raise InvalidHumanSubmission([f"malformed exchange: {pair!r}"])
            pairs.append((pair[0], pair[1]))
        if not pairs:
            raise InvalidHumanSubmission(["cross-examination needs at least one [question, answer] pair"])
        questioner, answerer = make_cx_slots(item.slot)
        return CrossEx(questioner_slot=questioner, answerer_slot=answerer, exchanges=tuple(pairs))

    def submit_human(self, item_code: str, content: dict | str) -> None:
        """Stage a human submission for the owner thread to commit."""
        with self._cond:
            if self.status != "awaiting_human":
                raise NotAwaitingHuman(f"round is {self.status}, not awaiting a submission")
            expected = self.order[self.cursor]
            if item_code != expected.code:
                raise WrongSlot(item_code, expected.code)
            entry = self.parse_human_entry(expected, content)
            self._pending_entry = entry
            self._cond.notify_all()

    # -- main loop ----------------------------------------------------------

    def _commit(self, item: RoundItem, entry) -> None:
        with self._cond:
            self.transcript.entries.append(entry)
            self.cursor += 1
            self.status = "running"
        self.save_checkpoint()
        if isinstance(entry, Speech):
            self._emit(
                "speech_committed",
                {
                    "item": item.code,
                    "speech": speech_to_dict(entry),
                    "display": render_speech(entry, self.engines.corpus, "display"),
                },
            )
        else:
            self._emit(
                "cx_committed",
                {"item": item.code, "cx": cx_to_dict(entry), "display": render_cx(entry, "display")},
            )
        if self.on_commit is not None:
            try:
                self.on_commit(item, entry)
            except Exception:
                logger.exception("on_commit hook failed for %s", item.code)

    def run_next_item(self) -> str:
        """Advance one item; returns the engine status afterwards."""
        if self.cursor >= len(self.order):
            return self._judge()
        item = self.order[self.cursor]
        actor = self.config.assignment.actor_for(item)
        if actor == "human":
            with self._cond:
                has_pending = self._pending_entry is not None
            if has_pending:
                return self._commit_pending(item)
            if self.status != "awaiting_human":
                self._emit("item_started", {"item": item.code, "actor": actor})
                with self._cond:
                    self.status = "awaiting_human"
                self._emit("awaiting_human", {"item": item.code})
            return self.status
        self._emit("item_started", {"item": item.code, "actor": actor})
        context = assemble_context(self.config.resolution, self.transcript.entries, self.engines.corpus)
        try:
            if item.kind == "cx":
                entry = self._run_cx(item, context)
            elif item.code == "1AC":
                entry = self._run_1ac(item, context)
            elif item.code == "1NC":
                entry = self._run_1nc(item, context)
            else:
                entry = self._run_rebuttal(item, context)
        except (WorkflowFailure, GatewayError, PipelineError) as exc:
            with self._cond:
                self.status = "failed"
            self.save_checkpoint()
            self._emit("failed", {"item": item.code, "error": str(exc)})
            raise RoundFailed(f"{item.code}: {exc}", self.checkpoint_path) from exc
        self._commit(item, entry)
        return self.status

    def _commit_pending(self, item: RoundItem) -> str:
        with self._cond:
            entry = self._pending_entry
            self._pending_entry = None
        self._emit("human_committed", {"item": item.code})
        self._commit(item, entry)
        return self.status

    def _wait_for_human(self, timeout: float | None) -> bool:
        with self._cond:
            if self._pending_entry is None:
                self._cond.wait(timeout=timeout)
            return self._pending_entry is not None

    def _judge(self) -> str:
        from .adjudicate import judge_round  # local import: adjudicate renders transcripts

        self.status = "judging"
        self.save_checkpoint()
        try:
            decision = judge_round(
                self.transcript,
                self.config.judges[0],
                self.engines.gateway,
                self.engines.corpus,
                repair_budget=self.config.repair_budget,
            )
        except GatewayError as exc:
            self.status = "failed"
            self.save_checkpoint()
            self._emit("failed", {"item": "judge", "error": str(exc)})
            raise RoundFailed(f"judging: {exc}", self.checkpoint_path) from exc
        self.transcript.decision = decision
        self.status = "complete"
        self.save_checkpoint()
        self._emit("decision", {"decision": decision_to_dict(decision)})
        return self.status

    def run(self, block_on_human: bool = False, human_timeout: float | None = None) -> str:
        """Drive the round forward until complete, failed, or (when not
        blocking) a human slot is reached."""
        while self.status not in ("complete", "failed"):
            status = self.run_next_item()
            if status == "awaiting_human":
                if not block_on_human:
                    return self.status
                if not self._wait_for_human(human_timeout):
                    return self.status  # timed out; caller re-enters or gives up
                # loop re-enters run_next_item, which commits the staged entry
        return self.status


def run_round(config: RoundConfig, engines: Engines, round_id: str = "round",
              event_log: EventLog | None = None, checkpoint_path: str | Path | None = None) -> Transcript:
    """Run a fully-AI round start to finish and return the judged transcript."""
    engine = RoundEngine(config, engines, round_id=round_id, event_log=event_log,
                         checkpoint_path=checkpoint_path)
    if event_log is not None:
        event_log.emit("round_created", {"resolution": config.resolution, "round_id": round_id})
    status = engine.run(block_on_human=False)
    if status == "awaiting_human":
        raise PipelineError(
            f"round reached human item {engine.order[engine.cursor].code}; "
            "drive it through RoundEngine with submissions instead"
        )
    return engine.transcript


def load_checkpoint(path: str | Path) -> dict:
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    if obj.get("v") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {obj.get('v')!r}")
    return obj


def engine_from_checkpoint(path: str | Path, engines: Engines,
                           event_log: EventLog | None = None) -> RoundEngine:
    obj = load_checkpoint(path)
    config = RoundConfig.from_dict(obj["config"])
    transcript = transcript_from_dict(obj["transcript"])
    engine = RoundEngine(
        config,
        engines,
        round_id=obj["round_id"],
        event_log=event_log,
        checkpoint_path=path,
        transcript=transcript,
        cursor=obj["cursor"],
    )
    return engine
