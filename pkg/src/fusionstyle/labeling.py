"""Oracle ext/abs style labels from the fusion index, tuning and corpus statistics."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .metrics import DEFAULT_K, FusionScores, fusion_index, pearson
from .text import Document, Sentence

__all__ = [
    "DEFAULT_GAMMA",
    "MAX_POSITION",
    "Style",
    "StyleLabel",
    "OracleConfig",
    "LabeledPair",
    "AnnotatedSentence",
    "StyleStats",
    "label_from_scores",
    "label_pair",
    "tune_k",
    "gamma_agreement",
    "tune_gamma",
    "StatsAccumulator",
    "corpus_stats",
    "style_prediction_f1",
]

# default abs threshold; shorter, less fused summaries may call for a lower one
DEFAULT_GAMMA = 0.7
MAX_POSITION = 20


class Style(str, enum.Enum):
    EXT = "ext"
    ABS = "abs"


@dataclass(frozen=True)
class StyleLabel:
    kind: Style
    source_index: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Style(self.kind))
        if self.kind is Style.EXT:
            if self.source_index is None or self.source_index < 1:
                raise ValueError("an ext label needs a 1-based source_index")
        elif self.source_index is not None:
            raise ValueError("an abs label carries no source_index")

    @classmethod
    def ext(cls, k: int) -> "StyleLabel":
        return cls(Style.EXT, k)

    @classmethod
    def abs(cls) -> "StyleLabel":
        return cls(Style.ABS)

    @property
    def is_ext(self) -> bool:
        return self.kind is Style.EXT

    def __str__(self):
        return f"Ext({self.source_index})" if self.is_ext else "Abs"


@dataclass(frozen=True)
class OracleConfig:
    k: int = DEFAULT_K
    gamma: float = DEFAULT_GAMMA

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")


@dataclass(frozen=True)
class LabeledPair:
    doc: Document
    summary: tuple[tuple[Sentence, StyleLabel, FusionScores], ...]

    def __post_init__(self):
        object.__setattr__(self, "summary", tuple(self.summary))
        n = len(self.doc.sentences)
        for _, lab, _ in self.summary:
            if lab.is_ext and lab.source_index > n:
                raise ValueError(f"source_index {lab.source_index} beyond {n} document sentences")

    @property
    def labels(self) -> list[StyleLabel]:
        return [lab for _, lab, _ in self.summary]


@dataclass(frozen=True)
class AnnotatedSentence:
    sentence: Sentence
    doc_id: str
    human_fusion_degree: float

    def __post_init__(self):
        if not np.isfinite(self.human_fusion_degree):
            raise ValueError("human_fusion_degree must be finite")


@dataclass(frozen=True)
class StyleStats:
    ext_fraction: float
    abs_fraction: float
    # one (ext, abs) pair per summary position 1..20, the last entry pools 21+
    by_position: tuple[tuple[float, float], ...]
    position_counts: tuple[int, ...]
    # rows/cols ordered (ext, abs); entries are fractions of all consecutive pairs
    transitions: np.ndarray
    n_sentences: int
    n_transitions: int


def label_from_scores(scores: FusionScores, gamma: float) -> StyleLabel:
    # FI == gamma stays ext: only strictly higher fusion counts as abstractive
    if scores.fusion_index > gamma:
        return StyleLabel.abs()
    return StyleLabel.ext(scores.best_match_index)


def label_pair(doc: Document, summary: Sequence[Sentence], cfg: OracleConfig = OracleConfig()) -> LabeledPair:
    if not len(doc.sentences):
        raise ValueError("empty document")
    items = []
    for s in summary:
        fs = fusion_index(s, doc, cfg.k)
        items.append((s, label_from_scores(fs, cfg.gamma), fs))
    return LabeledPair(doc, tuple(items))


def tune_k(
    annotations: Sequence[AnnotatedSentence],
    docs: Mapping[str, Document],
    candidate_ks: Sequence[int],
) -> tuple[int, dict[int, float]]:
    """Pick the top-K whose fusion index correlates best with human scores.

    A K whose fusion indices are all equal gets an undefined (NaN)
    correlation and cannot win.  Ties go to the smallest K.  Constant human
    scores raise ``ValueError``.
    """
    if len(annotations) < 2:
        raise ValueError("need at least two annotations")
    if not candidate_ks:
        raise ValueError("no candidate K values")
    human = [a.human_fusion_degree for a in annotations]
    if np.ptp(human) == 0:
        raise ValueError("human scores have zero variance")
    corr = {}
    for k in sorted(set(candidate_ks)):
        fi = [fusion_index(a.sentence, docs[a.doc_id], k).fusion_index for a in annotations]
        corr[k] = pearson(fi, human) if np.ptp(fi) > 0 else float("nan")
    defined = [k for k in corr if not np.isnan(corr[k])]
    if not defined:
        raise ValueError("fusion index is constant for every candidate K")
    best = max(defined, key=lambda k: (corr[k], -k))
    return best, corr


def _flatten_dev(labeled_dev) -> tuple[list[float], list[bool]]:
    fis, human_abs = [], []
    for pair, human_styles in labeled_dev:
        if len(human_styles) != len(pair.summary):
            raise ValueError("human styles must align with summary sentences")
        for (_, _, fs), h in zip(pair.summary, human_styles):
            fis.append(fs.fusion_index)
            human_abs.append(Style(h) is Style.ABS)
    return fis, human_abs


def gamma_agreement(labeled_dev, candidate_gammas: Iterable[float]) -> dict[float, float]:
    """Accuracy of ``FI > gamma`` against human abs labels for each candidate.

    ``labeled_dev`` holds ``(LabeledPair, human_styles)`` pairs where
    ``human_styles`` aligns with the pair's summary sentences.
    """
    fis, human_abs = _flatten_dev(labeled_dev)
    if not fis:
        raise ValueError("empty development set")
    fi = np.asarray(fis)
    h = np.asarray(human_abs)
    return {float(g): float(np.mean((fi > g) == h)) for g in sorted(set(candidate_gammas))}


def tune_gamma(labeled_dev, candidate_gammas: Iterable[float]) -> float:
    """Threshold with the best binary agreement; ties go to the smallest."""
    acc = gamma_agreement(labeled_dev, candidate_gammas)
    if not acc:
        raise ValueError("no candidate thresholds")
    return max(acc, key=lambda g: (acc[g], -g))


class StatsAccumulator:
    """Streaming form of :func:`corpus_stats`: ``add`` one summary at a time."""

    def __init__(self, max_position: int = MAX_POSITION):
        self.pos_ext = np.zeros(max_position + 1, dtype=np.int64)
        self.pos_all = np.zeros(max_position + 1, dtype=np.int64)
        self.trans = np.zeros((2, 2), dtype=np.int64)
        self.n_summaries = 0

    def add(self, labels) -> None:
        if isinstance(labels, LabeledPair):
            labels = labels.labels
        kinds = [lab.is_ext if isinstance(lab, StyleLabel) else Style(lab) is Style.EXT for lab in labels]
        last = len(self.pos_all) - 1
        for pos, is_ext in enumerate(kinds):
            b = min(pos, last)
            self.pos_all[b] += 1
            self.pos_ext[b] += is_ext
        for a, b in zip(kinds, kinds[1:]):
            self.trans[0 if a else 1, 0 if b else 1] += 1
        self.n_summaries += 1

    def result(self) -> StyleStats:
        if self.n_summaries == 0:
            raise ValueError("no summaries")
        n = int(self.pos_all.sum())
        n_ext = int(self.pos_ext.sum())
        ext_frac = n_ext / n if n else 0.0
        by_pos = tuple(
            (e / a, (a - e) / a) if a else (0.0, 0.0)
            for e, a in zip(self.pos_ext.tolist(), self.pos_all.tolist())
        )
        n_trans = int(self.trans.sum())
        return StyleStats(
            ext_fraction=ext_frac,
            abs_fraction=1.0 - ext_frac if n else 0.0,
            by_position=by_pos,
            position_counts=tuple(self.pos_all.tolist()),
            transitions=self.trans / n_trans if n_trans else np.zeros((2, 2)),
            n_sentences=n,
            n_transitions=n_trans,
        )


def corpus_stats(pairs: Iterable, max_position: int = MAX_POSITION) -> StyleStats:
    """Style distribution overall, per summary position and across transitions.

    Accepts :class:`LabeledPair` objects or plain sequences of labels
    (StyleLabel or Style) per summary.
    """
    acc = StatsAccumulator(max_position)
    for pair in pairs:
        acc.add(pair)
    return acc.result()


def _kind(x) -> Style:
    if isinstance(x, StyleLabel):
        return x.kind
    return Style(x)


def style_prediction_f1(predicted: Sequence, oracle: Sequence) -> float:
    """Macro F1 over {ext, abs}, averaged over the classes that occur."""
    if len(predicted) != len(oracle):
        raise ValueError(f"length mismatch: {len(predicted)} vs {len(oracle)}")
    if not oracle:
        raise ValueError("empty label lists")
    p = [_kind(x) for x in predicted]
    o = [_kind(x) for x in oracle]
    f1s = []
    for cls in Style:
        tp = sum(a is cls and b is cls for a, b in zip(p, o))
        fp = sum(a is cls and b is not cls for a, b in zip(p, o))
        fn = sum(a is not cls and b is cls for a, b in zip(p, o))
        if tp + fp + fn == 0:
            continue
        f1s.append(2 * tp / (2 * tp + fp + fn))
    return sum(f1s) / len(f1s)
