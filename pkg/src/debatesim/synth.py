"""Synthetic evidence generators for fixtures and desk-scale experiments.

Two generators: a curated 32-card corpus on a carbon-pricing resolution
(used by the shipped mock round), and a seeded random corpus of
arbitrary size (used by retrieval oracle experiments).  Tags are phrased
so they never occur inside any body, cite, or argument text; the spoken
transcript must contain zero original tags, and the curated generator
asserts that property at build time.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

# (group, cite stem, body, highlight phrases) - one query word reliably
# retrieves each group
_CURATED: list[tuple[str, str, str, list[str]]] = [
    # climate harms
    ("warming", "Aldana", "Unchecked warming is already driving crop failures and coastal flooding across multiple continents, and damages compound each decade the status quo persists.", ["crop failures and coastal flooding", "damages compound each decade"]),
    ("warming", "Brook", "Climate scientists report that warming past two degrees locks in irreversible ice sheet loss, displacing hundreds of millions of people.", ["irreversible ice sheet loss"]),
    ("warming", "Chen", "The social cost of warming rises faster than output in every integrated assessment, eroding living standards worldwide.", ["rises faster than output"]),
    ("warming", "Datta", "Extreme heat events attributable to warming now kill more people annually than all natural disasters combined a generation ago.", ["kill more people annually"]),
    # inherency: gridlock
    ("gridlock", "Ellis", "Congressional gridlock has stalled every serious emissions bill for a decade, and committee leadership shows no intention of moving one now.", ["stalled every serious emissions bill"]),
    ("gridlock", "Fox", "Lobbying by incumbent energy interests sustains gridlock, blocking climate statutes regardless of which party holds the chamber.", ["blocking climate statutes"]),
    ("gridlock", "Goel", "Without new legislation the executive lacks durable authority, so status quo gridlock forecloses administrative solutions too.", ["forecloses administrative solutions"]),
    ("gridlock", "Hart", "Budget reconciliation fights crowd out floor time, leaving emissions policy orphaned by gridlock session after session.", ["orphaned by gridlock"]),
    # solvency: levy
    ("levy", "Iqbal", "An economy wide carbon levy cuts emissions roughly forty percent within ten years in every peer reviewed model of the American energy market.", ["cuts emissions roughly forty percent"]),
    ("levy", "Jonas", "A predictable levy on carbon gives firms the price signal they need to retire coal plants early and accelerate grid storage.", ["retire coal plants early"]),
    ("levy", "Kim", "Border adjustments make a national levy leakage proof, so domestic cuts translate into real global reductions.", ["leakage proof"]),
    ("levy", "Lund", "Revenue recycling keeps a levy progressive: dividend checks more than offset energy costs for the bottom seven deciles.", ["dividend checks more than offset energy costs"]),
    # advantage: innovation
    ("innovation", "Mora", "American clean technology innovation is stagnating in the status quo as venture funding flees to other sectors.", ["innovation is stagnating"]),
    ("innovation", "Ng", "Stable carbon pricing historically triples private clean energy research within five years of enactment.", ["triples private clean energy research"]),
    ("innovation", "Okafor", "Leadership in clean technology determines which economies capture the next industrial base and its export markets.", ["capture the next industrial base"]),
    ("innovation", "Price", "Economies that lead energy innovation avoid stagnation spirals that otherwise end in prolonged unemployment crises.", ["avoid stagnation spirals"]),
    # disadvantage: recession
    ("recession", "Quinn", "The recovery is fragile but intact: consumer spending is growing and forecasters see no recession on the current trajectory.", ["no recession on the current trajectory"]),
    ("recession", "Rao", "Sudden energy cost shocks ripple through manufacturing payrolls first, shaving whole points off quarterly growth.", ["ripple through manufacturing payrolls"]),
    ("recession", "Shah", "Manufacturing contractions of that scale have preceded every postwar recession in the United States.", ["preceded every postwar recession"]),
    ("recession", "Tran", "A deep recession causes measurable mortality increases through unemployment, foreclosure, and collapsing public health budgets.", ["measurable mortality increases"]),
    # topicality: definitions
    ("definition", "Ueda", "In fiscal statutes a tax is properly defined as a compulsory exaction levied for revenue, not a behavioral fee.", ["compulsory exaction levied for revenue"]),
    ("definition", "Voss", "Regulatory charges whose purpose is conduct change fall outside the legal definition of taxation in most circuits.", ["outside the legal definition of taxation"]),
    ("definition", "Wang", "Predictable limits on what counts as a topical plan preserve preparation equity between competing teams.", ["preserve preparation equity"]),
    ("definition", "Xu", "A precise definition of fiscal terms is the only brake on limitless interpretations that explode research burdens.", ["brake on limitless interpretations"]),
    # counterplan: permits
    ("permits", "Yara", "A cap with tradable permits achieves identical emissions certainty while letting markets discover the clearing price.", ["identical emissions certainty"]),
    ("permits", "Zane", "Permit auctions raised steady revenue in the regional compacts that used them, funding adaptation without new statutes.", ["raised steady revenue"]),
    ("permits", "Abbe", "Tradable permits decouple climate policy from tax politics, which historically sink price based bills.", ["decouple climate policy from tax politics"]),
    ("permits", "Bond", "States already administer permit registries, so a national cap can launch within eighteen months.", ["launch within eighteen months"]),
    # kritik: managerialism
    ("managerial", "Cole", "Pricing nature converts ecological duty into an accounting exercise and entrenches the managerial mindset that caused the crisis.", ["entrenches the managerial mindset"]),
    ("managerial", "Diaz", "Market instruments teach citizens that pollution is permissible for a fee, corroding the ethics collective survival requires.", ["permissible for a fee"]),
    ("managerial", "Enos", "Refusing commodification opens space for degrowth politics oriented to sufficiency rather than throughput.", ["opens space for degrowth politics"]),
    ("managerial", "Frey", "Movements that reject managerial framing have won durable environmental protections where technocratic bargains failed.", ["won durable environmental protections"]),
]

_TAG_TEMPLATES = {
    "warming": "Status quo emissions trajectory guarantees escalating climate harm",
    "gridlock": "Congress will not act on emissions absent a structural forcing event",
    "levy": "Carbon levies deliver rapid, distribution friendly decarbonization",
    "innovation": "Price signals unlock a clean technology investment boom",
    "recession": "Energy price shocks tip a fragile economy into contraction",
    "definition": "Fiscal instruments are defined by revenue purpose",
    "permits": "Quantity instruments outperform price instruments politically",
    "managerial": "Market environmentalism reproduces the logic it claims to cure",
}


def curated_cards() -> list[dict]:
    """The 32-card mock-round corpus, as parse-ready record dicts."""
    records = []
    counters: dict[str, int] = {}
    for group, cite_stem, body, phrases in _CURATED:
        counters[group] = counters.get(group, 0) + 1
        n = counters[group]
        highlights = []
        for phrase in phrases:
            start = body.index(phrase)
            highlights.append([start, start + len(phrase)])
        highlights.sort()
        tag = f"{_TAG_TEMPLATES[group]} ({n})"
        record = {
            "id": f"{group}-{n:02d}",
            "tag": tag,
            "cite": f"{cite_stem} 21",
            "full_citation": f"{cite_stem}, A. (2021). Review of {group} studies, volume {n}.",
            "body": body,
            "highlights": highlights,
            "source_topic": group,
            "year": 2021,
        }
        records.append(record)
    # tags must never be voiced: assert they cannot leak in via bodies/cites
    for record in records:
        for other in records:
            assert record["tag"] not in other["body"]
            assert record["tag"] not in other["full_citation"]
    return records


_VOCAB = (
    "energy climate policy market carbon price tax trade permit statute court "
    "treaty alliance deterrence hegemony economy growth labor wage inflation "
    "grid storage solar wind nuclear pipeline export tariff sanction reform "
    "education housing health water food security migration border defense"
).split()


def random_cards(n: int, seed: int) -> list[dict]:
    """Seeded random corpus for retrieval experiments (ASCII only, so the
    reference tokenizer and the index tokenizer agree exactly)."""
    rng = random.Random(seed)
    records = []
    for i in range(n):
        length = rng.randint(8, 60)
        words = [rng.choice(_VOCAB) for _ in range(length)]
        body = " ".join(words) + "."
        tag_words = [rng.choice(_VOCAB) for _ in range(rng.randint(2, 6))]
        n_spans = rng.randint(0, 2)
        spans = []
        cursor = 0
        for _ in range(n_spans):
            if cursor >= len(body) - 2:
                break
            start = rng.randint(cursor, len(body) - 2)
            end = rng.randint(start + 1, len(body))
            spans.append([start, end])
            cursor = end
        records.append(
            {
                "id": f"r{i:05d}",
                "tag": " ".join(tag_words),
                "cite": f"Gen {i % 100:02d}",
                "full_citation": f"Generated source {i}.",
                "body": body,
                "highlights": spans,
            }
        )
    return records


def write_ndjson(records: list[dict], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def random_queries(n: int, seed: int) -> list[str]:
    """Random 1-4 word queries from the same vocabulary, plus occasional
    out-of-vocabulary words."""
    rng = random.Random(seed)
    queries = []
    for _ in range(n):
        words = [rng.choice(_VOCAB) for _ in range(rng.randint(1, 4))]
        if rng.random() < 0.15:
            words.append("zyzzyva")
        queries.append(" ".join(words))
    return queries
