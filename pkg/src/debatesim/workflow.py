"""The three-role workflow loop that produces every argumentative artifact.

Each iteration: the drafter emits a structured draft that includes
retrieval queries, the (deterministic) searcher runs those queries
against the index and attaches the candidate cards, and the reviewer
either approves or sends the draft back with a critique.  The loop ends
on approval or after ``max_iterations``; on a cap exit the last draft
is used anyway and flagged, because the round must always get a speech.

No hallucinated evidence: a final draft may only cite card ids that the
searcher actually retrieved at some point in the loop.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

from .corpus import CorpusHandle
from .gateway import ChatMessage, Gateway, GatewayError, ModelProfile, SchemaSpec
from .indexing import Index, search
from .prompts import TaskAssets, load_task

logger = logging.getLogger(__name__)

EVIDENCE_PREVIEW_CHARS = 1200


class WorkflowFailure(Exception):
    """Gateway failure inside a workflow; carries the trace so far."""

    def __init__(self, message: str, trace: "WorkflowTrace", cause: Exception | None = None):
        super().__init__(message)
        self.trace = trace
        self.cause = cause


class EvidenceNotFound(WorkflowFailure):
    """The final draft cites a card id the searcher never retrieved."""


@dataclass(frozen=True)
class AgentRole:
    name: str
    system_prompt: str
    schema: SchemaSpec | None = None

    def __post_init__(self) -> None:
        if self.name not in ("drafter", "searcher", "reviewer"):
            raise ValueError(f"unknown role {self.name!r}")


@dataclass(frozen=True)
class ReviewVerdict:
    approved: bool
    critique: str = ""

    def __post_init__(self) -> None:
        if not self.approved and not self.critique:
            raise ValueError("a rejection requires a critique")


@dataclass(frozen=True)
class WorkflowConfig:
    task_name: str
    drafter: AgentRole
    searcher: AgentRole
    reviewer: AgentRole
    max_iterations: int = 3
    evidence_k: int = 25
    year_pin: int = 2022

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.evidence_k < 1:
            raise ValueError("evidence_k must be >= 1")

    @classmethod
    def for_task(cls, task_name: str, max_iterations: int = 3, evidence_k: int = 25, year_pin: int = 2022) -> "WorkflowConfig":
        assets: TaskAssets = load_task(task_name)
        return cls(
            task_name=task_name,
            drafter=AgentRole("drafter", assets.drafter_prompt, assets.draft_schema),
            searcher=AgentRole("searcher", assets.searcher_prompt),
            reviewer=AgentRole("reviewer", assets.reviewer_prompt, assets.verdict_schema),
            max_iterations=max_iterations,
            evidence_k=evidence_k,
            year_pin=year_pin,
        )


@dataclass
class IterationRecord:
    draft: dict
    queries: list[str]
    retrieved_ids: list[str]
    verdict: ReviewVerdict


@dataclass
class WorkflowTrace:
    task_name: str
    iterations: list[IterationRecord] = field(default_factory=list)
    final_output: dict | None = None
    terminated_by: str = ""  # "approval" | "iteration_cap"

    def retrieved_union(self) -> set[str]:
        out: set[str] = set()
        for rec in self.iterations:
            out.update(rec.retrieved_ids)
        return out

    def to_dict(self) -> dict:
        return {
            "task_name": self.task_name,
            "iterations": [
                {
                    "draft": rec.draft,
                    "queries": rec.queries,
                    "retrieved_ids": rec.retrieved_ids,
                    "verdict": {"approved": rec.verdict.approved, "critique": rec.verdict.critique},
                }
                for rec in self.iterations
            ],
            "final_output": self.final_output,
            "terminated_by": self.terminated_by,
        }


def extract_card_ids(value) -> list[str]:
    """Every ``card_id`` mentioned anywhere in a structured draft."""
    found: list[str] = []
    if isinstance(value, dict):
        for key, sub in value.items():
            if key == "card_id" and isinstance(sub, str):
                found.append(sub)
            else:
                found.extend(extract_card_ids(sub))
    elif isinstance(value, list):
        for sub in value:
            found.extend(extract_card_ids(sub))
    return found


def _evidence_digest(card_ids: list[str], corpus: CorpusHandle) -> str:
    """Compact rendering of retrieved cards for an agent's context."""
    if not card_ids:
        return "(no evidence retrieved yet)"
    parts = []
    for cid in card_ids:
        card = corpus.get_card(cid)
        body = card.body
        if len(body) > EVIDENCE_PREVIEW_CHARS:
            body = body[:EVIDENCE_PREVIEW_CHARS] + " [...]"
        parts.append(f"[{cid}] tag: {card.tag}\n    cite: {card.cite}\n    body: {body}")
    return "\n".join(parts)


def run_workflow(
    config: WorkflowConfig,
    context: str,
    index: Index,
    corpus: CorpusHandle,
    gateway: Gateway,
    profile: ModelProfile,
    emit=None,
    route_prefix: str = "",
    repair_budget: int = 2,
) -> tuple[dict, WorkflowTrace]:
    """Run one drafter/searcher/reviewer loop to an approved (or capped)
    structured output.  ``emit(kind, payload)`` receives the ordered
    event stream: per iteration draft, search, retrieve, verdict, then
    one final event."""

    def send(kind: str, payload: dict) -> None:
        if emit is not None:
            emit(kind, payload)

    trace = WorkflowTrace(task_name=config.task_name)
    year_line = f"The current year is {config.year_pin}. Treat it as now."
    retrieved_order: list[str] = []  # union of retrievals, first-seen order
    critique = ""

    for iteration in range(1, config.max_iterations + 1):
        route = f"{route_prefix}/{config.task_name}/{iteration}/"
        user_parts = [
            f"Task: {config.task_name}",
            "Round so far:\n" + (context if context else "(nothing yet; this opens the round)"),
            "Evidence retrieved so far:\n" + _evidence_digest(retrieved_order, corpus),
        ]
        if critique:
            user_parts.append(f"Reviewer critique of your previous draft:\n{critique}")
        draft_messages = [
            ChatMessage("system", f"{config.drafter.system_prompt}\n{year_line}"),
            ChatMessage("user", "\n\n".join(user_parts)),
        ]
        try:
            draft_result = gateway.complete_structured(
                profile, draft_messages, config.drafter.schema, repair_budget=repair_budget,
                route=route + "drafter",
            )
        except GatewayError as exc:
            raise WorkflowFailure(f"{config.task_name}: drafter failed: {exc}", trace, exc) from exc
        draft = draft_result.value
        send("draft", {"task": config.task_name, "iteration": iteration, "draft": draft})

        queries = [q for q in draft.get("queries", []) if q]
        send("search", {"task": config.task_name, "iteration": iteration, "queries": queries})
        batch: list[dict] = []
        iteration_ids: list[str] = []
        for query in queries:
            hits = search(index, query, config.evidence_k)
            hit_ids = [h.card_id for h in hits]
            batch.append({"query": query, "card_ids": hit_ids})
            for cid in hit_ids:
                if cid not in retrieved_order:
                    retrieved_order.append(cid)
                if cid not in iteration_ids:
                    iteration_ids.append(cid)
        send("retrieve", {"task": config.task_name, "iteration": iteration, "results": batch})

        review_messages = [
            ChatMessage("system", f"{config.reviewer.system_prompt}\n{year_line}"),
            ChatMessage(
                "user",
                "\n\n".join(
                    [
                        f"Task: {config.task_name}",
                        "Draft under review:\n" + json.dumps(draft, ensure_ascii=False, sort_keys=True),
                        "Evidence available:\n" + _evidence_digest(retrieved_order, corpus),
                    ]
                ),
            ),
        ]
        try:
            verdict_result = gateway.complete_structured(
                profile, review_messages, config.reviewer.schema, repair_budget=repair_budget,
                route=route + "reviewer",
            )
        except GatewayError as exc:
            trace.iterations.append(IterationRecord(draft, queries, iteration_ids, ReviewVerdict(False, "(review failed)")))
            raise WorkflowFailure(f"{config.task_name}: reviewer failed: {exc}", trace, exc) from exc
        verdict = ReviewVerdict(
            approved=bool(verdict_result.value["approved"]),
            critique=verdict_result.value.get("critique", ""),
        )
        send("verdict", {"task": config.task_name, "iteration": iteration,
                         "approved": verdict.approved, "critique": verdict.critique})
        trace.iterations.append(IterationRecord(draft, queries, iteration_ids, verdict))

        if verdict.approved:
            trace.terminated_by = "approval"
            break
        critique = verdict.critique
    else:
        trace.terminated_by = "iteration_cap"
        logger.warning("workflow %s hit its iteration cap; using the last draft unapproved", config.task_name)

    final = trace.iterations[-1].draft
    cited = set(extract_card_ids(final))
    missing = cited - trace.retrieved_union()
    if missing:
        raise EvidenceNotFound(
            f"{config.task_name}: draft cites card ids never retrieved: {sorted(missing)}", trace
        )
    trace.final_output = final
    send("final", {"task": config.task_name, "final_output": final, "terminated_by": trace.terminated_by})
    return final, trace
