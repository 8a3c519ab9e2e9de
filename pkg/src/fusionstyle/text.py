"""Tokenization, sentences, n-grams, LCS and the ROUGE recall primitives.

Everything here is a pure function on immutable inputs.  Metric functions
accept either a :class:`Sentence` or a plain sequence of token strings.
"""

from __future__ import annotations

import re
import string
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

__all__ = [
    "Sentence",
    "Document",
    "NGramMultiset",
    "tokenize",
    "split_sentences",
    "make_document",
    "ngrams",
    "lcs_length",
    "rouge_n_recall",
    "rouge_l_recall",
    "match_score",
]

_PUNCT = frozenset(string.punctuation)

ABBREVIATIONS = frozenset(
    {
        "mr.", "mrs.", "ms.", "dr.", "prof.", "st.", "jr.", "sr.", "vs.",
        "u.s.", "u.k.", "e.g.", "i.e.", "inc.", "no.", "gen.", "gov.",
    }
)


@dataclass(frozen=True)
class Sentence:
    """Ordered tokens plus the 1-based ordinal of the sentence in its text."""

    tokens: tuple[str, ...]
    index: int = 1

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if not self.tokens:
            raise ValueError("a sentence needs at least one token")
        if self.index < 1:
            raise ValueError(f"sentence index must be >= 1, got {self.index}")
        for tok in self.tokens:
            if not tok or any(c.isspace() for c in tok):
                raise ValueError(f"invalid token {tok!r}")

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)


@dataclass(frozen=True)
class Document:
    id: str
    sentences: tuple[Sentence, ...]

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))
        if not self.sentences:
            raise ValueError(f"document {self.id!r} has no sentences")
        for i, s in enumerate(self.sentences, start=1):
            if s.index != i:
                raise ValueError(
                    f"document {self.id!r}: sentence indices must be consecutive from 1"
                )

    def __len__(self):
        return len(self.sentences)

    def stream(self) -> list[str]:
        """All tokens of the document flattened into one stream."""
        return [t for s in self.sentences for t in s.tokens]


def make_document(doc_id: str, sentences: Iterable[Sequence[str]]) -> Document:
    """Build a document from token lists, numbering sentences from 1."""
    return Document(
        doc_id, tuple(Sentence(tuple(toks), i) for i, toks in enumerate(sentences, 1))
    )


TokensLike = Union[Sentence, Sequence[str]]


def _toks(s: TokensLike) -> tuple[str, ...]:
    if isinstance(s, Sentence):
        return s.tokens
    return tuple(s)


@dataclass(frozen=True)
class NGramMultiset:
    order: int
    counts: Counter = field(default_factory=Counter)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def __len__(self):
        return len(self.counts)

    def __contains__(self, gram):
        return gram in self.counts

    def __getitem__(self, gram):
        return self.counts[gram]


def tokenize(text: str) -> list[str]:
    """Lowercase, split on whitespace, peel ASCII punctuation off both ends.

    Peeled punctuation characters become tokens of their own:

    >>> tokenize("Hello, world.")
    ['hello', ',', 'world', '.']
    """
    out: list[str] = []
    for piece in text.lower().split():
        i, j = 0, len(piece)
        while i < j and piece[i] in _PUNCT:
            i += 1
        while j > i and piece[j - 1] in _PUNCT:
            j -= 1
        out.extend(piece[:i])
        if i < j:
            out.append(piece[i:j])
        out.extend(piece[j:])
    return out


_BOUNDARY = re.compile(r"[.!?]+(?=\s+[A-Z]|\s*$)")


def split_sentences(text: str) -> list[Sentence]:
    """Rule-based sentence split.

    A run of ``.``, ``!`` or ``?`` ends a sentence when followed by
    whitespace and a capital letter, or by the end of the text.  A period
    closing a known abbreviation ("Mr.", "U.S.", ...) never splits.
    """
    pieces: list[str] = []
    start = 0
    for m in _BOUNDARY.finditer(text):
        end = m.end()
        last_word = text[start:end].split()[-1].lower() if text[start:end].split() else ""
        if m.group() == "." and last_word in ABBREVIATIONS and text[end:].strip():
            continue
        pieces.append(text[start:end])
        start = end
    pieces.append(text[start:])

    sentences = []
    for piece in pieces:
        toks = tokenize(piece)
        if toks:
            sentences.append(Sentence(tuple(toks), len(sentences) + 1))
    return sentences


def ngrams(s: TokensLike, n: int) -> NGramMultiset:
    if n < 1:
        raise ValueError(f"n-gram order must be >= 1, got {n}")
    toks = _toks(s)
    return NGramMultiset(n, Counter(toks[i : i + n] for i in range(len(toks) - n + 1)))


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """Length of the longest common subsequence (row-rolling DP)."""
    if len(a) < len(b):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def rouge_n_recall(ref: TokensLike, cand: TokensLike, n: int) -> float:
    """Clipped n-gram overlap over the number of n-grams in ``ref``."""
    r = ngrams(ref, n)
    total = r.total
    if total == 0:
        return 0.0
    c = ngrams(cand, n)
    overlap = sum(min(cnt, c.counts[g]) for g, cnt in r.counts.items())
    return overlap / total


def rouge_l_recall(ref: TokensLike, cand: TokensLike) -> float:
    r = _toks(ref)
    if not r:
        return 0.0
    return lcs_length(r, _toks(cand)) / len(r)


def match_score(ref: TokensLike, cand: TokensLike) -> float:
    """Mean of ROUGE-1, ROUGE-2 and ROUGE-L recall of ``ref`` given ``cand``.

    ROUGE-2 of a one-token ``ref`` is 0 and still enters the mean.
    """
    r, c = _toks(ref), _toks(cand)
    return (rouge_n_recall(r, c, 1) + rouge_n_recall(r, c, 2) + rouge_l_recall(r, c)) / 3.0
