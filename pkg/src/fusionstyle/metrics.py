"""Sentence-level style metrics: recall, scatter, fusion index and baselines.

The fusion index of a summary sentence ``S`` against a document ``D`` is
``(1 - RC) * SC`` where ``RC`` is the best single-sentence match score and
``SC`` the normalized entropy of the top-K match scores.  0 means the
sentence is recoverable from one document sentence; values near 1 mean its
content is spread evenly over several.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .text import Document, TokensLike, _toks, match_score, ngrams

__all__ = [
    "DEFAULT_K",
    "MatchProfile",
    "FusionScores",
    "ExtractiveFragmentStats",
    "NoveltyStats",
    "match_profile",
    "normalized_entropy",
    "recall_rc",
    "scatter_sc",
    "fusion_index",
    "extractive_fragments",
    "novel_ngram_fraction",
    "pearson",
]

DEFAULT_K = 5


@dataclass(frozen=True)
class MatchProfile:
    scores: tuple[tuple[int, float], ...]
    k: int
    top_scores: tuple[float, ...]
    probs: tuple[float, ...]


@dataclass(frozen=True)
class FusionScores:
    recall: float
    scatter: float
    fusion_index: float
    best_match_index: int


@dataclass(frozen=True)
class ExtractiveFragmentStats:
    coverage: float
    density: float
    fragments: tuple[tuple[int, int], ...]  # (1-based start, length)


@dataclass(frozen=True)
class NoveltyStats:
    novel_fraction: dict[int, float]


def _check_k(k: int) -> None:
    if k < 1:
        raise ValueError(f"top-K must be >= 1, got {k}")


def _scores(summary_sentence: TokensLike, doc: Document) -> list[float]:
    if not len(doc.sentences):
        raise ValueError("empty document")
    s = _toks(summary_sentence)
    return [match_score(s, d.tokens) for d in doc.sentences]


def normalized_entropy(top_scores: Sequence[float]) -> float:
    """Entropy of ``top_scores`` (normalized to a distribution) over ``log K``.

    Returns 0 for a single score or an all-zero list; ``0 log 0`` is 0.
    """
    r = [float(x) for x in top_scores]
    kk = len(r)
    total = sum(r)
    if kk <= 1 or total <= 0.0:
        return 0.0
    h = 0.0
    for x in r:
        p = x / total
        if p > 0.0:  # subnormal scores can underflow to 0
            h -= p * math.log(p)
    return min(1.0, max(0.0, h / math.log(kk)))


def match_profile(summary_sentence: TokensLike, doc: Document, k: int = DEFAULT_K) -> MatchProfile:
    _check_k(k)
    scores = _scores(summary_sentence, doc)
    top = tuple(sorted(scores, reverse=True)[: min(k, len(scores))])
    total = sum(top)
    probs = tuple(x / total for x in top) if total > 0 else tuple(0.0 for _ in top)
    return MatchProfile(tuple(enumerate(scores, start=1)), k, top, probs)


def _recall_from_scores(scores: list[float]) -> tuple[float, int]:
    best = max(scores)
    return best, scores.index(best) + 1


def recall_rc(summary_sentence: TokensLike, doc: Document) -> tuple[float, int]:
    """Best match score over document sentences and its (first) 1-based index."""
    return _recall_from_scores(_scores(summary_sentence, doc))


def scatter_sc(summary_sentence: TokensLike, doc: Document, k: int = DEFAULT_K) -> float:
    _check_k(k)
    scores = _scores(summary_sentence, doc)
    return normalized_entropy(sorted(scores, reverse=True)[: min(k, len(scores))])


def fusion_index(summary_sentence: TokensLike, doc: Document, k: int = DEFAULT_K) -> FusionScores:
    _check_k(k)
    scores = _scores(summary_sentence, doc)
    rc, best = _recall_from_scores(scores)
    sc = normalized_entropy(sorted(scores, reverse=True)[: min(k, len(scores))])
    return FusionScores(rc, sc, (1.0 - rc) * sc, best)


def extractive_fragments(summary_sentence: TokensLike, doc: Document) -> ExtractiveFragmentStats:
    """Greedy longest-match fragments of the sentence inside the document stream.

    At each summary position the longest run starting there that occurs
    contiguously in the flattened document is taken as a fragment.
    """
    s = _toks(summary_sentence)
    stream = doc.stream()
    positions: dict[str, list[int]] = {}
    for j, t in enumerate(stream):
        positions.setdefault(t, []).append(j)

    frags = []
    i = 0
    while i < len(s):
        best = 0
        for j in positions.get(s[i], ()):
            n = 0
            while i + n < len(s) and j + n < len(stream) and s[i + n] == stream[j + n]:
                n += 1
            best = max(best, n)
        if best:
            frags.append((i + 1, best))
            i += best
        else:
            i += 1

    if not s:
        return ExtractiveFragmentStats(0.0, 0.0, ())
    cov = sum(n for _, n in frags) / len(s)
    dens = sum(n * n for _, n in frags) / len(s)
    return ExtractiveFragmentStats(cov, dens, tuple(frags))


def novel_ngram_fraction(summary_sentence: TokensLike, doc: Document, orders=(1, 2, 3)) -> NoveltyStats:
    """Share of the sentence's n-gram positions not found in the document.

    Document n-grams come from the flattened token stream.
    """
    s = _toks(summary_sentence)
    stream = doc.stream()
    out = {}
    for n in orders:
        sent = ngrams(s, n)
        if sent.total == 0:
            out[n] = 0.0
            continue
        known = ngrams(stream, n).counts
        novel = sum(c for g, c in sent.counts.items() if g not in known)
        out[n] = novel / sent.total
    return NoveltyStats(out)


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient."""
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise ValueError("need at least two points")
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    dx = xa - xa.mean()
    dy = ya - ya.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise ValueError("zero variance input")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))
