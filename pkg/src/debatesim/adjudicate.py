"""Round adjudication and the evaluation statistics built on ballots.

A judge model reads the display rendering of a complete transcript and
returns a structured ballot (winner + reason for decision).  Decision
matrices over (round, judge) feed the three summary statistics: win
rate, delta versus a baseline judge in percentage points, and Cohen's
kappa agreement versus that baseline.

Kappa convention for the one degenerate case (both raters use a single
identical label, so chance agreement is 1): report kappa = 1.0 and set
the degeneracy flag instead of dividing by zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from collections import Counter

from .arguments import JudgeDecision, Transcript, render_transcript
from .corpus import CorpusHandle
from .gateway import ChatMessage, Gateway, ModelProfile
from .prompts import ballot_schema, judge_prompt

WINNERS = ("AFF", "NEG")


class StatsError(ValueError):
    pass


class EmptyInput(StatsError):
    pass


class LengthMismatch(StatsError):
    pass


class IncompleteMatrix(StatsError):
    pass


def judge_id_for(profile: ModelProfile) -> str:
    return f"{profile.provider}:{profile.model_name}"


def judge_round(
    transcript: Transcript,
    profile: ModelProfile,
    gateway: Gateway,
    corpus: CorpusHandle,
    repair_budget: int = 2,
    route: str = "judge/ballot/1/judge",
) -> JudgeDecision:
    """Obtain a structured ballot for a completed round."""
    rendered = render_transcript(transcript, corpus, "display")
    messages = [
        ChatMessage("system", judge_prompt()),
        ChatMessage("user", f"Transcript of the round:\n\n{rendered}"),
    ]
    result = gateway.complete_structured(
        profile, messages, ballot_schema(), repair_budget=repair_budget, route=route
    )
    return JudgeDecision(judge_id=judge_id_for(profile), winner=result.value["winner"], rfd=result.value["rfd"])


# ---------------------------------------------------------------------------
# Statistics
# ---------------------------------------------------------------------------


def win_rate(decisions: list[JudgeDecision], system_sides: list[str]) -> float:
    """Fraction of rounds where the ballot went to the system's side."""
    if not decisions:
        raise EmptyInput("no decisions")
    if len(decisions) != len(system_sides):
        raise LengthMismatch(f"{len(decisions)} decisions vs {len(system_sides)} sides")
    wins = sum(1 for d, side in zip(decisions, system_sides) if d.winner == side)
    return wins / len(decisions)


def _kappa(a: list[str], b: list[str]) -> tuple[float, bool]:
    if len(a) != len(b):
        raise LengthMismatch(f"{len(a)} vs {len(b)}")
    if not a:
        raise EmptyInput("empty label vectors")
    n = len(a)
    observed = sum(1 for x, y in zip(a, b) if x == y) / n
    counts_a = Counter(a)
    counts_b = Counter(b)
    expected = sum(counts_a[label] * counts_b[label] for label in set(a) | set(b)) / (n * n)
    if expected == 1.0:
        # both raters constant on the same label; perfect trivial agreement
        return 1.0, True
    return (observed - expected) / (1.0 - expected), False


def cohen_kappa(a: list[str], b: list[str]) -> float:
    """Cohen's kappa between two label vectors, in [-1, 1]."""
    value, _ = _kappa(a, b)
    return value


def cohen_kappa_detail(a: list[str], b: list[str]) -> tuple[float, bool]:
    """(kappa, degenerate) where degenerate marks the chance-agreement-1 case."""
    return _kappa(a, b)


@dataclass
class DecisionMatrix:
    """Winner per (round, judge); must be complete before statistics run."""

    rounds: list[str]
    judges: list[str]
    cells: dict  # (round_id, judge_id) -> "AFF" | "NEG"

    def check_complete(self) -> None:
        missing = [
            (r, j) for r in self.rounds for j in self.judges if (r, j) not in self.cells
        ]
        if missing:
            raise IncompleteMatrix(f"missing {len(missing)} cells, first: {missing[0]}")

    def column(self, judge: str) -> list[str]:
        return [self.cells[(r, judge)] for r in self.rounds]


@dataclass
class JudgeSummary:
    win_rate: float
    delta_pp: float
    kappa_vs_baseline: float | None  # None for the baseline itself
    kappa_degenerate: bool = False


@dataclass
class PanelResult:
    baseline: str
    per_judge: dict  # judge_id -> JudgeSummary

    def rows(self) -> list[tuple[str, JudgeSummary]]:
        return list(self.per_judge.items())


def panel_report(matrix: DecisionMatrix, system_sides: list[str], baseline: str) -> PanelResult:
    """Win rate / delta / kappa per judge, everything relative to ``baseline``."""
    matrix.check_complete()
    if baseline not in matrix.judges:
        raise StatsError(f"baseline {baseline!r} is not one of the judges")
    if len(system_sides) != len(matrix.rounds):
        raise LengthMismatch(f"{len(matrix.rounds)} rounds vs {len(system_sides)} sides")

    rates = {}
    for judge in matrix.judges:
        wins = sum(
            1 for r, side in zip(matrix.rounds, system_sides) if matrix.cells[(r, judge)] == side
        )
        rates[judge] = wins / len(matrix.rounds)

    baseline_column = matrix.column(baseline)
    per_judge = {}
    for judge in matrix.judges:
        if judge == baseline:
            kappa, degenerate = None, False
        else:
            kappa, degenerate = cohen_kappa_detail(matrix.column(judge), baseline_column)
        per_judge[judge] = JudgeSummary(
            win_rate=rates[judge],
            delta_pp=(rates[judge] - rates[baseline]) * 100.0,
            kappa_vs_baseline=kappa,
            kappa_degenerate=degenerate,
        )
    return PanelResult(baseline=baseline, per_judge=per_judge)


def panel_text(result: PanelResult) -> str:
    """Fixed-width table with the three statistic columns."""
    header = f"{'Judge':<24}{'Win Rate (%)':>14}{'Delta vs base (pp)':>20}{'Kappa vs base':>15}"
    lines = [header, "-" * len(header)]
    for judge, summary in result.rows():
        kappa = "---" if summary.kappa_vs_baseline is None else f"{summary.kappa_vs_baseline:.2f}"
        if summary.kappa_degenerate:
            kappa += "*"
        lines.append(
            f"{judge:<24}{summary.win_rate * 100:>14.1f}{summary.delta_pp:>20.1f}{kappa:>15}"
        )
    lines.append(f"(baseline: {result.baseline}; * = degenerate marginals)")
    return "\n".join(lines)


def panel_csv(result: PanelResult) -> str:
    lines = ["judge,win_rate_pct,delta_vs_baseline_pp,kappa_vs_baseline,kappa_degenerate"]
    for judge, summary in result.rows():
        kappa = "" if summary.kappa_vs_baseline is None else f"{summary.kappa_vs_baseline:.6f}"
        lines.append(
            f"{judge},{summary.win_rate * 100:.4f},{summary.delta_pp:.4f},{kappa},{str(summary.kappa_degenerate).lower()}"
        )
    return "\n".join(lines) + "\n"
