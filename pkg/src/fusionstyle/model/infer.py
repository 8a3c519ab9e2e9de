"""Greedy style-switching decoding."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..labeling import StyleLabel
from ..seqformat import DOC_START, SENT_END, ParsedSummary, TaggedSequence, parse_summary, sent_start
from ..text import Document
from .network import ToyModel

__all__ = ["Generation", "infer", "random_styles"]

StyleChooser = Callable[[int, int], StyleLabel]  # (decision number, n_doc_sentences) -> style


@dataclass
class Generation:
    summary: ParsedSummary
    tokens: tuple[str, ...]
    style_probs: list[dict]  # pointer distribution at each decision

    @property
    def labels(self) -> list[StyleLabel]:
        return self.summary.labels


def random_styles(seed: int) -> StyleChooser:
    """Uniform random style over Abs and Ext(1..n) at every decision."""
    rng = np.random.default_rng(seed)

    def choose(_step: int, n_doc: int) -> StyleLabel:
        j = int(rng.integers(n_doc + 1))
        return StyleLabel.abs() if j == 0 else StyleLabel.ext(j)

    return choose


def infer(
    model: ToyModel,
    doc: Document,
    max_len: int = 64,
    max_sentences: int = 8,
    choose_style: Optional[StyleChooser] = None,
) -> Generation:
    """Decode a summary for ``doc``.

    At each decision step (start, or right after ``</S>``) the token head
    decides between stopping (``<eos>``) and opening another sentence; when
    continuing, the style pointer (or ``choose_style``) picks Abs or
    Ext(k) and the matching identifier is emitted.  Inside a sentence only
    content tokens and ``</S>`` are allowed, and ``</S>`` only after at
    least one content token, so the output always parses.  Hitting
    ``max_len`` closes an open sentence and stops.
    """
    v = model.vocab
    src = model.document_sequence(doc)
    n_doc = min(len(doc.sentences), model.cfg.max_sentences)
    enc = model.encode(src)

    content_ban = np.zeros(len(v), dtype=bool)
    content_ban[list(v.identifier_ids())] = True
    content_ban[[v.unk_id, v.bos_id, v.eos_id]] = True
    stop_or_go = [v.eos_id, v.doc_start_id] + [v.sent_start_id(k) for k in range(1, n_doc + 1)]

    toks: list[str] = []
    tags: list[int] = []
    probs: list[dict] = []
    open_tag: Optional[int] = None
    n_words = 0
    n_sent = 0
    while len(toks) < max_len:
        dec = model.decode_step(enc, TaggedSequence(toks, tags))
        logits = dec.token_logits[-1]
        if open_tag is None:
            if n_sent >= max_sentences:
                break
            sub = logits[stop_or_go]
            if int(np.argmax(sub)) == 0 and n_sent > 0:
                break
            dist = model.style_pointer(enc, dec.y_out[-1])
            probs.append({str(k): p for k, p in dist.items()})
            if choose_style is not None:
                style = choose_style(n_sent, n_doc)
            else:
                style = max(dist, key=dist.get)
            if style.is_ext:
                toks.append(sent_start(style.source_index))
                open_tag = style.source_index
            else:
                toks.append(DOC_START)
                open_tag = 0
            tags.append(open_tag)
            n_words = 0
            continue
        masked = np.where(content_ban, -np.inf, logits)
        if n_words == 0:
            masked[v.sent_end_id] = -np.inf
        else:
            masked[v.sent_end_id] = logits[v.sent_end_id]
        nxt = int(np.argmax(masked))
        toks.append(v.itos[nxt])
        tags.append(open_tag)
        if nxt == v.sent_end_id:
            open_tag = None
            n_sent += 1
        else:
            n_words += 1
    if open_tag is not None:
        if n_words == 0:
            toks.pop()
            tags.pop()
        else:
            toks.append(SENT_END)
            tags.append(open_tag)
    parsed = parse_summary(toks, n_doc_sentences=n_doc)
    return Generation(parsed, tuple(toks), probs)
