"""Adjudication statistics against hand-computed values and a
Fraction-arithmetic contingency-table oracle."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from debatesim.adjudicate import (
    DecisionMatrix,
    EmptyInput,
    IncompleteMatrix,
    LengthMismatch,
    cohen_kappa,
    cohen_kappa_detail,
    judge_round,
    panel_csv,
    panel_report,
    panel_text,
    win_rate,
)
from debatesim.arguments import JudgeDecision, Transcript, AnalyticSegment, Speech
from debatesim.gateway import Gateway, MockProvider, ModelProfile
from debatesim.slots import SpeechSlot


def kappa_oracle(a, b):
    """Contingency-table kappa in exact rational arithmetic."""
    n = len(a)
    labels = sorted(set(a) | set(b))
    table = {(x, y): 0 for x in labels for y in labels}
    for x, y in zip(a, b):
        table[(x, y)] += 1
    p_o = Fraction(sum(table[(l, l)] for l in labels), n)
    p_e = Fraction(0)
    for l in labels:
        row = sum(table[(l, y)] for y in labels)
        col = sum(table[(x, l)] for x in labels)
        p_e += Fraction(row, n) * Fraction(col, n)
    if p_e == 1:
        return 1.0, True
    return float((p_o - p_e) / (1 - p_e)), False


def decisions(winners, judge="j"):
    return [JudgeDecision(judge_id=judge, winner=w, rfd="reasoned") for w in winners]


class TestWinRate:
    def test_nine_of_ten_as_negative(self):
        ballots = decisions(["NEG"] * 9 + ["AFF"])
        assert win_rate(ballots, ["NEG"] * 10) == pytest.approx(0.90)

    def test_eight_of_ten_as_affirmative(self):
        ballots = decisions(["AFF"] * 8 + ["NEG"] * 2)
        assert win_rate(ballots, ["AFF"] * 10) == pytest.approx(0.80)

    def test_pooled_seventeen_of_twenty(self):
        ballots = decisions(["NEG"] * 9 + ["AFF"] + ["AFF"] * 8 + ["NEG"] * 2)
        sides = ["NEG"] * 10 + ["AFF"] * 10
        assert win_rate(ballots, sides) == pytest.approx(0.85)

    def test_empty_raises(self):
        with pytest.raises(EmptyInput):
            win_rate([], [])

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            win_rate(decisions(["AFF"]), ["AFF", "NEG"])


class TestCohenKappa:
    def test_identical_vectors_with_both_labels(self):
        v = ["AFF", "NEG", "AFF", "NEG"]
        assert cohen_kappa(v, v) == pytest.approx(1.0)

    def test_hand_computed_half(self):
        a = ["AFF", "AFF", "AFF", "NEG"]
        b = ["AFF", "AFF", "NEG", "NEG"]
        # p_o = 0.75, p_e = 0.5 -> kappa = 0.5
        assert cohen_kappa(a, b) == pytest.approx(0.5)

    def test_hand_computed_minus_one(self):
        a = ["AFF", "NEG"]
        b = ["NEG", "AFF"]
        # p_o = 0, p_e = 0.5 -> kappa = -1
        assert cohen_kappa(a, b) == pytest.approx(-1.0)

    def test_degenerate_same_constant_label(self):
        value, degenerate = cohen_kappa_detail(["AFF"] * 5, ["AFF"] * 5)
        assert value == 1.0
        assert degenerate is True

    def test_opposite_constant_labels_not_degenerate(self):
        value, degenerate = cohen_kappa_detail(["AFF"] * 4, ["NEG"] * 4)
        assert degenerate is False
        assert value == pytest.approx(0.0)

    def test_errors(self):
        with pytest.raises(EmptyInput):
            cohen_kappa([], [])
        with pytest.raises(LengthMismatch):
            cohen_kappa(["AFF"], ["AFF", "NEG"])

    def test_oracle_equivalence_on_seeded_random_vectors(self):
        rng = random.Random(99)
        for _ in range(300):
            n = rng.randint(1, 50)
            a = [rng.choice(["AFF", "NEG"]) for _ in range(n)]
            b = [rng.choice(["AFF", "NEG"]) for _ in range(n)]
            want, want_degenerate = kappa_oracle(a, b)
            got, got_degenerate = cohen_kappa_detail(a, b)
            assert got_degenerate == want_degenerate
            assert abs(got - want) < 1e-12


@settings(max_examples=150, deadline=None)
@given(st.lists(st.sampled_from(["AFF", "NEG"]), min_size=1, max_size=50).flatmap(
    lambda a: st.tuples(st.just(a), st.lists(st.sampled_from(["AFF", "NEG"]), min_size=len(a), max_size=len(a))),
))
def test_kappa_symmetry_and_label_permutation(pair):
    a, b = pair
    assert cohen_kappa(a, b) == pytest.approx(cohen_kappa(b, a), abs=1e-12)
    flip = {"AFF": "NEG", "NEG": "AFF"}
    flipped = cohen_kappa([flip[x] for x in a], [flip[x] for x in b])
    assert flipped == pytest.approx(cohen_kappa(a, b), abs=1e-12)
    assert -1.0 - 1e-9 <= cohen_kappa(a, b) <= 1.0 + 1e-9


def build_matrix(columns: dict, rounds=None):
    judges = list(columns)
    rounds = rounds or [f"r{i:02d}" for i in range(len(next(iter(columns.values()))))]
    cells = {}
    for judge, winners in columns.items():
        for r, w in zip(rounds, winners):
            cells[(r, judge)] = w
    return DecisionMatrix(rounds=rounds, judges=judges, cells=cells)


class TestPanelReport:
    def test_baseline_delta_zero(self):
        matrix = build_matrix({"a": ["AFF", "NEG"], "b": ["AFF", "AFF"]})
        result = panel_report(matrix, ["AFF", "NEG"], baseline="a")
        assert result.per_judge["a"].delta_pp == 0.0
        assert result.per_judge["a"].kappa_vs_baseline is None

    def test_identical_columns_kappa_one(self):
        col = ["AFF", "NEG", "AFF", "NEG"]
        matrix = build_matrix({"a": col, "b": list(col)})
        result = panel_report(matrix, ["AFF"] * 4, baseline="a")
        assert result.per_judge["b"].kappa_vs_baseline == pytest.approx(1.0)

    def test_exact_marginals_yield_deltas(self):
        # 100 rounds, system always AFF: rates 85/80/83 -> deltas 0/-5/-2
        base = ["AFF"] * 85 + ["NEG"] * 15
        second = ["AFF"] * 80 + ["NEG"] * 20
        third = ["AFF"] * 83 + ["NEG"] * 17
        matrix = build_matrix({"gem": base, "cla": second, "gpt": third})
        result = panel_report(matrix, ["AFF"] * 100, baseline="gem")
        assert result.per_judge["gem"].win_rate == pytest.approx(0.85)
        assert result.per_judge["cla"].delta_pp == pytest.approx(-5.0)
        assert result.per_judge["gpt"].delta_pp == pytest.approx(-2.0)

    def test_incomplete_matrix_rejected(self):
        matrix = build_matrix({"a": ["AFF", "NEG"], "b": ["AFF", "AFF"]})
        del matrix.cells[("r01", "b")]
        with pytest.raises(IncompleteMatrix):
            panel_report(matrix, ["AFF", "NEG"], baseline="a")

    def test_text_and_csv_render(self):
        matrix = build_matrix({"a": ["AFF", "NEG"], "b": ["NEG", "NEG"]})
        result = panel_report(matrix, ["AFF", "NEG"], baseline="a")
        text = panel_text(result)
        assert "Win Rate" in text and "a" in text
        csv = panel_csv(result)
        assert csv.splitlines()[0].startswith("judge,")
        assert len(csv.strip().splitlines()) == 3


class TestJudgeRound:
    def _transcript(self):
        return Transcript(
            resolution="r",
            entries=[Speech(SpeechSlot("1AC"), "ai", (AnalyticSegment("case"),))],
        )

    def test_scripted_winner(self, round_corpus):
        gw = Gateway(providers={"mock": MockProvider(['{"winner": "AFF", "rfd": "clear"}'])}, sleep=lambda _: None)
        profile = ModelProfile(provider="mock", model_name="judge")
        decision = judge_round(self._transcript(), profile, gw, round_corpus)
        assert decision.winner == "AFF"
        assert decision.judge_id == "mock:judge"

    def test_invalid_then_valid_uses_repair(self, round_corpus):
        gw = Gateway(
            providers={"mock": MockProvider(['{"winner": "BOTH"}', '{"winner": "NEG", "rfd": "flow"}'])},
            sleep=lambda _: None,
        )
        profile = ModelProfile(provider="mock", model_name="judge")
        decision = judge_round(self._transcript(), profile, gw, round_corpus, repair_budget=1)
        assert decision.winner == "NEG"
