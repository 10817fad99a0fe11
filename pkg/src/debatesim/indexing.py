"""In-process inverted index with Okapi BM25 scoring over the card corpus.

Indexed text is the card tag joined to the body with a single space, so
queries phrased in claim language (tags) and in source language (bodies)
both hit.  Scoring follows standard Okapi BM25 with the +1-inside-log
idf variant (always positive, even for terms present in most documents
of a tiny corpus):

    idf(t)  = ln(1 + (N - df + 0.5) / (df + 0.5))
    s(t, d) = idf(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * dl / avgdl))

summed over query tokens (duplicates in the query count twice).  Ties
break by ascending card id so round replays are deterministic.

The index is immutable after build; concurrent searches are safe.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import CorpusHandle, UnknownCardId

INDEX_FORMAT_VERSION = 1

# Runs of Unicode alphanumerics (\w minus underscore).
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumeric runs; no stemming, no stopwords."""
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class Bm25Params:
    k1: float = 1.2
    b: float = 0.75

    def __post_init__(self) -> None:
        if self.k1 < 0:
            raise ValueError(f"k1 must be >= 0, got {self.k1}")
        if not (0.0 <= self.b <= 1.0):
            raise ValueError(f"b must be in [0, 1], got {self.b}")


@dataclass(frozen=True)
class SearchHit:
    card_id: str
    score: float
    rank: int


@dataclass
class Index:
    """Inverted index: postings per token, per-document lengths, BM25 params."""

    postings: dict[str, list[tuple[str, int]]]
    doc_lengths: dict[str, int]
    params: Bm25Params = field(default_factory=Bm25Params)

    @property
    def doc_count(self) -> int:
        return len(self.doc_lengths)

    @property
    def avg_doc_length(self) -> float:
        if not self.doc_lengths:
            return 0.0
        return sum(self.doc_lengths.values()) / len(self.doc_lengths)

    def idf(self, token: str) -> float:
        df = len(self.postings.get(token, ()))
        if df == 0:
            return 0.0
        return math.log(1.0 + (self.doc_count - df + 0.5) / (df + 0.5))


def document_text(tag: str, body: str) -> str:
    """The indexed text of a card."""
    return f"{tag} {body}"


def build_index(corpus: CorpusHandle, params: Bm25Params | None = None) -> Index:
    params = params or Bm25Params()
    postings: dict[str, list[tuple[str, int]]] = {}
    doc_lengths: dict[str, int] = {}
    # sorted ids keep postings order (and therefore float accumulation
    # order) independent of ingest order
    for card_id in sorted(corpus.ids()):
        card = corpus.get_card(card_id)
        tokens = tokenize(document_text(card.tag, card.body))
        doc_lengths[card_id] = len(tokens)
        for token, tf in sorted(Counter(tokens).items()):
            postings.setdefault(token, []).append((card_id, tf))
    return Index(postings=postings, doc_lengths=doc_lengths, params=params)


def _term_score(index: Index, token: str, tf: int, doc_length: int, avgdl: float) -> float:
    k1, b = index.params.k1, index.params.b
    norm = tf + k1 * (1.0 - b + b * doc_length / avgdl)
    return index.idf(token) * (tf * (k1 + 1.0)) / norm


def bm25_score(index: Index, query_tokens: list[str], card_id: str) -> float:
    """BM25 score of one document for a tokenized query."""
    if card_id not in index.doc_lengths:
        raise UnknownCardId(card_id)
    avgdl = index.avg_doc_length
    doc_length = index.doc_lengths[card_id]
    score = 0.0
    for token in query_tokens:
        tf = 0
        for posted_id, posted_tf in index.postings.get(token, ()):
            if posted_id == card_id:
                tf = posted_tf
                break
        if tf:
            score += _term_score(index, token, tf, doc_length, avgdl)
    return score


def search(index: Index, query: str, k: int) -> list[SearchHit]:
    """Top-k hits for ``query``; every returned score is > 0.

    Scores accumulate in query-token order so results are bit-stable
    across runs and process restarts.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    query_tokens = tokenize(query)
    if not query_tokens or not index.doc_lengths:
        return []
    avgdl = index.avg_doc_length
    scores: dict[str, float] = {}
    for token in query_tokens:
        for card_id, tf in index.postings.get(token, ()):
            contribution = _term_score(index, token, tf, index.doc_lengths[card_id], avgdl)
            scores[card_id] = scores.get(card_id, 0.0) + contribution
    ordered = sorted(
        ((card_id, score) for card_id, score in scores.items() if score > 0.0),
        key=lambda pair: (-pair[1], pair[0]),
    )
    return [
        SearchHit(card_id=card_id, score=score, rank=rank)
        for rank, (card_id, score) in enumerate(ordered[:k], start=1)
    ]


def save_index(index: Index, path: str | Path) -> None:
    """Persist as a versioned JSON container."""
    payload = {
        "v": INDEX_FORMAT_VERSION,
        "params": {"k1": index.params.k1, "b": index.params.b},
        "doc_lengths": index.doc_lengths,
        "postings": {token: [[cid, tf] for cid, tf in plist] for token, plist in index.postings.items()},
    }
    Path(path).write_text(json.dumps(payload, ensure_ascii=False), encoding="utf-8")


def load_index(path: str | Path) -> Index:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    version = payload.get("v")
    if version != INDEX_FORMAT_VERSION:
        raise ValueError(f"unsupported index format version: {version!r}")
    params = Bm25Params(**payload["params"])
    postings = {
        token: [(cid, int(tf)) for cid, tf in plist] for token, plist in payload["postings"].items()
    }
    return Index(postings=postings, doc_lengths={k: int(v) for k, v in payload["doc_lengths"].items()}, params=params)
