"""Held-out evaluation of generated summaries against known styles and targets."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from ..labeling import Style, StyleLabel, style_prediction_f1
from ..seqformat import SequenceParseError, parse_summary
from .infer import Generation, StyleChooser, infer
from .network import ToyModel

__all__ = ["EvalResult", "positional_matches", "evaluate"]


@dataclass(frozen=True)
class EvalResult:
    style_f1: float
    ext_token_accuracy: float
    token_accuracy: float
    n_parse_errors: int
    n_examples: int
    n_sentences: int


def positional_matches(ref: Sequence[str], gen: Sequence[str]) -> tuple[int, int]:
    """(matching positions, max length); a dropped or repeated token shifts the rest."""
    return sum(a == b for a, b in zip(ref, gen)), max(len(ref), len(gen))


def evaluate(
    model: ToyModel,
    examples: Sequence,
    choose_style: Optional[StyleChooser] = None,
    max_len: int = 64,
) -> EvalResult:
    """Decode every example and score it sentence by sentence.

    ``examples`` need ``doc``, ``summary`` (Sentences) and ``labels``.
    The i-th generated sentence is compared with the i-th reference.  A
    missing generated sentence counts as the wrong style and as zero
    matching tokens; surplus generated sentences add their length to the
    token-accuracy denominator.
    """
    pred: list[Style] = []
    gold: list[StyleLabel] = []
    ext_hit = ext_tot = hit = tot = 0
    parse_errors = 0
    for ex in examples:
        g: Generation = infer(model, ex.doc, max_len=max_len, choose_style=choose_style)
        n_doc = min(len(ex.doc.sentences), model.cfg.max_sentences)
        try:
            parse_summary(g.tokens, n_doc_sentences=n_doc)
        except SequenceParseError:
            parse_errors += 1
        gen = g.summary.sentences
        for i, (ref, lab) in enumerate(zip(ex.summary, ex.labels)):
            if i < len(gen):
                pred.append(gen[i][0].kind)
                words = gen[i][1]
            else:
                pred.append(Style.ABS if lab.is_ext else Style.EXT)
                words = ()
            gold.append(lab)
            h, n = positional_matches(ref.tokens, words)
            hit, tot = hit + h, tot + n
            if lab.is_ext:
                ext_hit, ext_tot = ext_hit + h, ext_tot + n
        for _, words in gen[len(ex.summary):]:
            tot += len(words)
    return EvalResult(
        style_f1=style_prediction_f1(pred, gold),
        ext_token_accuracy=ext_hit / ext_tot if ext_tot else 0.0,
        token_accuracy=hit / tot if tot else 0.0,
        n_parse_errors=parse_errors,
        n_examples=len(examples),
        n_sentences=len(gold),
    )
