"""Synthetic document/summary pairs whose styles are known by construction.

Every summary sentence is tied to one *cued* document sentence, and
summary sentences appear in the document order of their cues.  A cued
sentence ends with ``EXT_CUE`` or ``ABS_CUE``:

* ``EXT_CUE`` -> Ext(k): the summary sentence copies document sentence k
  and appends ``MARKER``.
* ``ABS_CUE`` -> Abs: the summary sentence is the first token of every
  document sentence, in order.

All content tokens inside one document are distinct, so an Ext target is
recoverable from exactly one sentence and an Abs target spreads evenly
over all of them.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..labeling import StyleLabel
from ..seqformat import Vocab
from ..text import Document, Sentence, make_document

__all__ = [
    "EXT_CUE",
    "ABS_CUE",
    "MARKER",
    "content_words",
    "synthetic_vocab",
    "SyntheticExample",
    "make_synthetic_corpus",
]

EXT_CUE = "key"
ABS_CUE = "mix"
MARKER = "ok"


def content_words(n: int) -> list[str]:
    return [f"w{i:02d}" for i in range(n)]


def synthetic_vocab(n_words: int = 60, max_sentences: int = 8) -> Vocab:
    return Vocab(content_words(n_words) + [EXT_CUE, ABS_CUE, MARKER], max_sentences=max_sentences)


@dataclass(frozen=True)
class SyntheticExample:
    doc: Document
    summary: tuple[Sentence, ...]
    labels: tuple[StyleLabel, ...]

    @property
    def items(self) -> list[tuple[StyleLabel, tuple[str, ...]]]:
        return [(lab, s.tokens) for lab, s in zip(self.labels, self.summary)]

    def to_record(self) -> dict:
        """JSON-lines corpus record with pre-split sentences."""
        return {
            "id": self.doc.id,
            "document": [" ".join(s.tokens) for s in self.doc.sentences],
            "summary": [" ".join(s.tokens) for s in self.summary],
        }


def make_synthetic_corpus(
    seed: int,
    size: int,
    style_mix: float = 0.5,
    n_words: int = 60,
    doc_sentences: tuple[int, int] = (2, 6),
    sentence_len: tuple[int, int] = (4, 6),
    max_summary_sentences: int = 2,
) -> list[SyntheticExample]:
    """``size`` examples; each summary sentence is Ext with probability ``style_mix``."""
    if not 0.0 <= style_mix <= 1.0:
        raise ValueError(f"style_mix must lie in [0, 1], got {style_mix}")
    lo, hi = doc_sentences
    if n_words < hi * sentence_len[1]:
        raise ValueError("too few content words for distinct tokens per document")
    rng = np.random.default_rng(seed)
    words = content_words(n_words)
    corpus = []
    for idx in range(size):
        n_sum = int(rng.integers(1, max_summary_sentences + 1))
        n_doc = int(rng.integers(max(lo, n_sum), hi + 1))
        is_ext = rng.random(n_sum) < style_mix
        cued = sorted(rng.choice(n_doc, size=n_sum, replace=False).tolist())
        lens = rng.integers(sentence_len[0], sentence_len[1] + 1, size=n_doc)
        pool = rng.permutation(n_words)
        sents, at = [], 0
        for ln in lens:
            sents.append([words[i] for i in pool[at : at + ln]])
            at += ln
        for j, ext in zip(cued, is_ext):
            sents[j].append(EXT_CUE if ext else ABS_CUE)
        doc = make_document(f"syn-{seed}-{idx}", sents)

        summary, labels = [], []
        for pos, (j, ext) in enumerate(zip(cued, is_ext), start=1):
            if ext:
                toks = tuple(sents[j]) + (MARKER,)
                labels.append(StyleLabel.ext(j + 1))
            else:
                toks = tuple(s[0] for s in sents)
                labels.append(StyleLabel.abs())
            summary.append(Sentence(toks, pos))
        corpus.append(SyntheticExample(doc, tuple(summary), tuple(labels)))
    return corpus
