#!/usr/bin/env python3
"""Regenerate the shipped fixtures: curated corpus, index, mock-round
script, and CLI config.

The mock script maps workflow routes (item/task/iteration/role) to the
structured responses that drive a deterministic full round.  Every card
the script cites is verified to be retrievable by that draft's own
queries, so the no-hallucinated-evidence contract holds when the round
actually runs.

Usage: python3 scripts/make_fixtures.py [--out fixtures/]
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from debatesim.corpus import ingest_lines
from debatesim.indexing import build_index, save_index, search
from debatesim.synth import _TAG_TEMPLATES, curated_cards, write_ndjson

RESOLUTION = (
    "Resolved: The United States federal government should substantially "
    "increase its regulation of carbon emissions by enacting a national carbon levy."
)

APPROVE = {"approved": True, "critique": ""}


def q(group: str) -> str:
    """Query that reliably retrieves a card group: its shared tag template."""
    return _TAG_TEMPLATES[group]


def block(group: str, n: int, argument: str) -> dict:
    return {"argument": argument, "card_id": f"{group}-{n:02d}"}


def build_routes() -> dict:
    routes: dict[str, object] = {}

    # ---- 1AC -------------------------------------------------------------
    routes["1AC/plantext/1/drafter"] = {
        "plantext": (
            "The United States federal government should enact an economy wide "
            "national carbon levy with full revenue recycling."
        ),
        "queries": [q("levy")],
    }
    # the harms workflow takes two iterations: first draft under-covers
    routes["1AC/harms/1/drafter"] = {
        "blocks": [block("warming", 1, "Climate damage is mounting in the status quo")],
        "queries": [q("warming")],
    }
    routes["1AC/harms/1/reviewer"] = {
        "approved": False,
        "critique": "One card is thin for a harms contention; add magnitude evidence.",
    }
    routes["1AC/harms/2/drafter"] = {
        "blocks": [
            block("warming", 1, "Climate damage is mounting in the status quo"),
            block("warming", 2, "Two degrees of warming locks in mass displacement"),
        ],
        "queries": [q("warming")],
    }
    routes["1AC/inherency/1/drafter"] = {
        "blocks": [block("gridlock", 1, "Congress will not pass emissions legislation on its own")],
        "queries": [q("gridlock")],
    }
    routes["1AC/solvency/1/drafter"] = {
        "blocks": [block("levy", 1, "A national levy cuts emissions about forty percent in a decade")],
        "queries": [q("levy")],
    }
    routes["1AC/advantage-1/1/drafter"] = {
        "title": "Clean technology leadership",
        "uniqueness": block("innovation", 1, "Clean technology investment is stalling now"),
        "link": block("innovation", 2, "A stable price signal triples private research"),
        "internal_link": block("innovation", 3, "Research leadership decides who captures the next industrial base"),
        "impact": block("innovation", 4, "Losing the innovation race ends in prolonged unemployment crises"),
        "queries": [q("innovation")],
    }
    routes["1AC/advantage-2/1/drafter"] = {
        "title": "Warming mitigation",
        "uniqueness": block("warming", 3, "Climate costs rise faster than output absent action"),
        "link": block("levy", 3, "Border adjusted levies turn domestic cuts into global cuts"),
        "internal_link": block("levy", 2, "Price certainty retires coal early and scales storage"),
        "impact": block("warming", 4, "Heat mortality already outpaces historic disasters"),
        "queries": [q("warming"), q("levy")],
    }

    # ---- 1NC -------------------------------------------------------------
    routes["1NC/strategy/1/drafter"] = {
        "positions": ["topicality", "disadvantage", "counterplan", "kritik"],
        "queries": [],
    }
    routes["1NC/topicality-1/1/drafter"] = {
        "interpretation": block("definition", 1, "A tax is a compulsory exaction for revenue"),
        "violation": block("definition", 2, "A behavior steering levy is a regulatory fee, not revenue policy"),
        "standards": block("definition", 3, "Predictable limits preserve preparation equity"),
        "queries": [q("definition")],
    }
    routes["1NC/disadvantage-1/1/drafter"] = {
        "title": "Recession",
        "uniqueness": block("recession", 1, "The recovery holds on the current trajectory"),
        "link": block("recession", 2, "An energy cost shock hits manufacturing payrolls first"),
        "internal_link": block("recession", 3, "Manufacturing contractions of that scale precede recessions"),
        "impact": block("recession", 4, "Recessions kill through unemployment and collapsing budgets"),
        "queries": [q("recession")],
    }
    routes["1NC/counterplan-1/1/drafter"] = {
        "counterplan_text": (
            "The fifty United States should establish a binding emissions cap "
            "with tradable permits auctioned annually."
        ),
        "solvency": [
            block("permits", 1, "A cap delivers identical emissions certainty"),
            block("permits", 4, "State registries let a cap launch within eighteen months"),
        ],
        "queries": [q("permits")],
    }
    routes["1NC/kritik-1/1/drafter"] = {
        "link": block("managerial", 1, "Pricing nature entrenches the managerial mindset behind the crisis"),
        "alternative": "Reject market environmentalism and organize politics around sufficiency instead of throughput.",
        "alternative_support": block("managerial", 3, "Refusing commodification opens space for degrowth politics"),
        "queries": [q("managerial")],
    }
    routes["1NC/oncase/1/drafter"] = {
        "attacks": [
            {
                "target_block_id": "1AC.solvency.1",
                "argument": "Tax politics sink price instruments before they deliver",
                "card_id": "permits-03",
            },
            {
                "target_block_id": "1AC.advantage1.uniqueness",
                "argument": "Their own authors concede movements beat technocratic bargains",
                "card_id": "managerial-04",
            },
        ],
        "queries": [q("permits"), q("managerial")],
    }

    # ---- rebuttals ---------------------------------------------------------
    routes["2AC/rebuttal-2AC/1/drafter"] = {
        "overview": "The case is ahead on every sheet; start with the disadvantage.",
        "responses": [
            {
                "target_block_id": "1NC.disadvantage1.link",
                "text": "No link: revenue recycling cushions energy costs for households",
                "argument": "Dividends more than offset energy costs for most deciles",
                "card_id": "levy-04",
            },
            {
                "target_block_id": "1NC.topicality1.interpretation",
                "text": "We meet: a levy raises revenue on its face, and their interpretation over-limits",
            },
            {
                "target_block_id": "1NC.kritik1.link",
                "text": "Permutation: do the plan and reject managerialism everywhere else",
            },
            {
                "target_block_id": "1NC.counterplan1.solvency.1",
                "text": "The counterplan cannot enforce interstate leakage, so certainty is illusory",
            },
        ],
        "queries": [q("levy")],
    }
    routes["2NC/rebuttal-2NC/1/drafter"] = {
        "overview": "Take the kritik and topicality; the block answers the permutation.",
        "responses": [
            {
                "target_block_id": "1NC.kritik1.link",
                "text": "Extend the link: a fee teaches that pollution is purchasable",
                "argument": "Market instruments corrode the ethics survival requires",
                "card_id": "managerial-02",
            },
            {
                "target_block_id": "2AC.response.1",
                "text": "Dividends arrive after the shock; payroll losses come first",
            },
            {
                "target_block_id": "1NC.topicality1.standards",
                "text": "Our interpretation is the only brake on limitless plans",
            },
        ],
        "queries": [q("managerial")],
    }
    routes["1NR/rebuttal-1NR/1/drafter"] = {
        "overview": "The counterplan plus the disadvantage is a clean ballot.",
        "responses": [
            {
                "target_block_id": "1AC.solvency.1",
                "text": "Permit auctions raise revenue without tax politics",
                "argument": "Auctions funded adaptation in every regional compact",
                "card_id": "permits-02",
            },
            {
                "target_block_id": "1NC.disadvantage1.uniqueness",
                "text": "Extend uniqueness: forecasters see no recession absent the plan",
            },
        ],
        "queries": [q("permits")],
    }
    routes["1AR/rebuttal-1AR/1/drafter"] = {
        "overview": "Cover the block fast; the aff story is intact everywhere.",
        "responses": [
            {
                "target_block_id": "1NC.disadvantage1.uniqueness",
                "text": "Their uniqueness evidence predates the latest payroll revisions",
            },
            {
                "target_block_id": "1NC.counterplan1.solvency.2",
                "text": "Eighteen months of state rulemaking is eighteen months of warming",
            },
            {
                "target_block_id": "1NC.kritik1.alternative_support",
                "text": "Degrowth has no mechanism for emissions in the interim",
            },
        ],
        "queries": [],
    }
    routes["2NR/rebuttal-2NR/1/drafter"] = {
        "overview": "Collapse to the disadvantage and the counterplan; weigh timeframe.",
        "responses": [
            {
                "target_block_id": "1AC.advantage1.impact",
                "text": "Recession turns the innovation advantage: investment dies in a downturn",
            },
            {
                "target_block_id": "2AC.response.1",
                "text": "Cross apply the block: the shock precedes any dividend",
            },
        ],
        "queries": [],
    }
    routes["2AR/rebuttal-2AR/1/drafter"] = {
        "overview": "Magnitude and reversibility decide this: warming outweighs a recession risk.",
        "responses": [
            {
                "target_block_id": "1NC.disadvantage1.impact",
                "text": "Their impact is cyclical and recoverable; ours compounds every decade",
            },
            {
                "target_block_id": "1NC.counterplan1.solvency.1",
                "text": "Certainty without enforcement is a slogan; the plan solves now",
            },
        ],
        "queries": [],
    }

    # ---- cross-examinations -------------------------------------------------
    cx_scripts = {
        "CX-1AC": [
            ("Walk me through how a levy survives the next election cycle.", "Revenue recycling builds a durable constituency; dividends are popular."),
            ("Your solvency author models forty percent cuts; at what price point?", "The model uses a rising schedule starting near the social cost of carbon."),
            ("Does the plan preempt state programs?", "No, it floors them; states can go further."),
            ("So states bear enforcement while you take credit?", "Enforcement is federal; the question conflates administration with outcomes."),
        ],
        "CX-1NC": [
            ("Does the counterplan raise revenue?", "Through auctions, yes, but for adaptation rather than dividends."),
            ("Then how is it not a tax under your own interpretation?", "Permits price a quantity; the exaction is incidental, not the purpose."),
            ("Your recession link assumes no phase-in; why?", "The shock comes from announcement effects, not the schedule."),
            ("Can the kritik alternative coexist with any carbon price?", "No; pricing is the mindset the alternative refuses."),
        ],
        "CX-2AC": [
            ("If dividends offset costs, why do your authors model payroll losses at all?", "They model gross shocks; net effects include recycling."),
            ("Which comes first, the shock or the dividend?", "They arrive in the same fiscal quarter under the plan text."),
            ("Does the permutation sever the plan's pricing mechanism?", "No, it does the whole plan and rejects managerial framing elsewhere."),
            ("Name one movement your permutation evidence describes.", "The overview cites durable protections won without technocratic bargains."),
        ],
        "CX-2NC": [
            ("Your ethics card: does it quantify corrosion?", "It documents attitude shifts in priced regimes; magnitude is qualitative."),
            ("If the block owns the permutation, what does the 1NR take?", "The counterplan and the case debate."),
            ("Is over-limiting worse than under-limiting?", "Under-limiting explodes research burdens; that is the standards debate."),
            ("Why does the dividend timing argument not apply to auctions?", "Auction revenue funds adaptation later; we never claimed household offsets."),
        ],
    }
    for code, pairs in cx_scripts.items():
        for n, (question, answer) in enumerate(pairs, start=1):
            routes[f"{code}/cx/{n}/questioner"] = {"question": question}
            routes[f"{code}/cx/{n}/answerer"] = {"answer": answer}

    # ---- judging -------------------------------------------------------------
    # same ballot for the round judge and for CLI panel runs over saved
    # transcripts (panel routes are "panel/<transcript>/<judge>")
    routes["panel/*/*"] = routes["judge/ballot/1/judge"] = {
        "winner": "AFF",
        "rfd": (
            "The affirmative wins on magnitude and reversibility. The 2AR framing of "
            "compounding climate damage against a cyclical recession risk goes "
            "unanswered in the 2NR collapse, and the dividend timing debate ends at "
            "worst even for the negative. Topicality falls to the revenue-on-its-face "
            "answer, and the counterplan's certainty claim was undercut in "
            "cross-examination when the negative conceded auction revenue serves "
            "adaptation rather than household offsets."
        ),
    }

    # reviewers approve everything not explicitly rejected above
    routes["*/reviewer"] = APPROVE
    return routes


def verify_closure(routes: dict, index, evidence_k: int = 25) -> None:
    """Every card a draft cites must be retrievable by that draft's queries."""
    from debatesim.workflow import extract_card_ids

    # group drafter routes by (item, task); citations may rely on earlier
    # iterations' queries within the same workflow
    workflows: dict[tuple[str, str], list[dict]] = {}
    for route, payload in routes.items():
        if route.endswith("/drafter") and isinstance(payload, dict):
            item, task, _iteration, _role = route.split("/")
            workflows.setdefault((item, task), []).append(payload)
    for (item, task), drafts in workflows.items():
        retrieved: set[str] = set()
        for draft in drafts:
            for query in draft.get("queries", []):
                retrieved.update(h.card_id for h in search(index, query, evidence_k))
            cited = set(extract_card_ids(draft))
            missing = cited - retrieved
            assert not missing, f"{item}/{task}: cites unretrieved cards {sorted(missing)}"


def verify_tags_unspoken(routes: dict, records: list[dict]) -> None:
    """No authored text may contain a card's original tag verbatim."""
    blob = json.dumps(routes, ensure_ascii=False)
    for record in records:
        assert record["tag"] not in blob, f"tag leaked into script: {record['tag']!r}"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "fixtures"))
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    records = curated_cards()
    write_ndjson(records, out / "cards.ndjson")

    handle, report = ingest_lines(iter(json.dumps(r, ensure_ascii=False) for r in records))
    assert report.rejected == 0, report.rejection_reasons
    index = build_index(handle)
    save_index(index, out / "index.json")

    routes = build_routes()
    verify_closure(routes, index)
    verify_tags_unspoken(routes, records)
    script = {"routes": routes}
    (out / "full_round.script.json").write_text(
        json.dumps(script, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8"
    )

    config = {
        "corpus": "fixtures/cards.ndjson",
        "index": "fixtures/index.json",
        "output_dir": "out",
        "year_pin": 2022,
        "max_iterations": 3,
        "evidence_k": 25,
        "advantage_count": 2,
        "cx_pairs": 4,
        "repair_budget": 2,
        "mock_script": "fixtures/full_round.script.json",
        "resolution": RESOLUTION,
        "profiles": {
            "speech": {"provider": "script", "model_name": "mock-speech"},
            "judge-main": {"provider": "script", "model_name": "mock-judge"},
        },
        "speech_profile": "speech",
        "judges": ["judge-main"],
    }
    (out / "config.json").write_text(json.dumps(config, indent=2) + "\n", encoding="utf-8")

    print(f"wrote {handle.card_count} cards, index, script ({len(routes)} routes), config -> {out}")


if __name__ == "__main__":
    main()
