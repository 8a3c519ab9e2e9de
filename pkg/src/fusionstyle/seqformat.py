"""Identifier-token sequence format and group tags.

Documents serialize as ``<S> <S_1> ... </S> <S_2> ... </S>``; summaries as
a run of sentences each opened by ``<S_k>`` (rewrite document sentence k)
or ``<S>`` (generate freely) and closed by ``</S>``.  Every token carries a
group tag: the sentence index k inside document sentence k or an Ext(k)
summary sentence, 0 elsewhere.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .labeling import LabeledPair, StyleLabel
from .text import Document, Sentence

__all__ = [
    "DOC_START",
    "SENT_END",
    "MAX_SENTENCES",
    "sent_start",
    "sentence_id_of",
    "is_identifier",
    "CapacityError",
    "SequenceParseError",
    "UnexpectedIdentifier",
    "UnexpectedContent",
    "UnterminatedSentence",
    "EmptySentence",
    "UnknownSentenceIndex",
    "TaggedSequence",
    "ParsedSummary",
    "Vocab",
    "serialize_document",
    "parse_document",
    "serialize_styled",
    "serialize_summary",
    "parse_summary",
]

log = logging.getLogger(__name__)

DOC_START = "<S>"
SENT_END = "</S>"
MAX_SENTENCES = 64

_SENT_START = re.compile(r"^<S_([1-9][0-9]*)>$")


def sent_start(k: int) -> str:
    return f"<S_{k}>"


def sentence_id_of(token: str) -> Optional[int]:
    """k for a ``<S_k>`` token, else None."""
    m = _SENT_START.match(token)
    return int(m.group(1)) if m else None


def is_identifier(token: str) -> bool:
    return token in (DOC_START, SENT_END) or sentence_id_of(token) is not None


class CapacityError(ValueError):
    """Input exceeds a configured size limit."""


class SequenceParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position  # 1-based


class UnexpectedIdentifier(SequenceParseError):
    pass


class UnexpectedContent(SequenceParseError):
    """Content token outside any sentence."""


class UnterminatedSentence(SequenceParseError):
    pass


class EmptySentence(SequenceParseError):
    pass


class UnknownSentenceIndex(SequenceParseError):
    pass


@dataclass(frozen=True)
class TaggedSequence:
    tokens: tuple[str, ...]
    group_tags: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "group_tags", tuple(self.group_tags))
        if len(self.tokens) != len(self.group_tags):
            raise ValueError("tokens and group tags differ in length")

    def __len__(self):
        return len(self.tokens)

    def __add__(self, other: "TaggedSequence") -> "TaggedSequence":
        return TaggedSequence(self.tokens + other.tokens, self.group_tags + other.group_tags)


@dataclass(frozen=True)
class ParsedSummary:
    sentences: tuple[tuple[StyleLabel, tuple[str, ...]], ...]

    @property
    def labels(self) -> list[StyleLabel]:
        return [lab for lab, _ in self.sentences]


class Vocab:
    """String <-> id mapping with identifier ids in a contiguous top range.

    Layout: ``<unk> <bos> <eos>``, content words, then ``<S> </S> <S_1> ...
    <S_M>``.
    """

    UNK, BOS, EOS = "<unk>", "<bos>", "<eos>"

    def __init__(self, words: Iterable[str], max_sentences: int = MAX_SENTENCES):
        content = sorted({w for w in words if not is_identifier(w)} - {self.UNK, self.BOS, self.EOS})
        self.max_sentences = max_sentences
        self.itos = [self.UNK, self.BOS, self.EOS] + content
        self.id_start = len(self.itos)
        self.itos += [DOC_START, SENT_END] + [sent_start(k) for k in range(1, max_sentences + 1)]
        self.stoi = {w: i for i, w in enumerate(self.itos)}

    @classmethod
    def from_list(cls, itos: Sequence[str], max_sentences: int) -> "Vocab":
        v = cls((), max_sentences)
        v.itos = list(itos)
        v.stoi = {w: i for i, w in enumerate(v.itos)}
        v.id_start = v.stoi.get(DOC_START, -1)
        expected = [DOC_START, SENT_END] + [sent_start(k) for k in range(1, max_sentences + 1)]
        if v.itos[:3] != [cls.UNK, cls.BOS, cls.EOS] or v.itos[v.id_start :] != expected:
            raise ValueError("vocabulary listing does not match the reserved id layout")
        return v

    def __len__(self):
        return len(self.itos)

    @property
    def unk_id(self) -> int:
        return 0

    @property
    def bos_id(self) -> int:
        return 1

    @property
    def eos_id(self) -> int:
        return 2

    @property
    def doc_start_id(self) -> int:
        return self.id_start

    @property
    def sent_end_id(self) -> int:
        return self.id_start + 1

    def sent_start_id(self, k: int) -> int:
        if not 1 <= k <= self.max_sentences:
            raise CapacityError(f"sentence index {k} outside 1..{self.max_sentences}")
        return self.id_start + 1 + k

    def identifier_ids(self) -> range:
        return range(self.id_start, len(self.itos))

    def encode(self, tokens: Iterable[str]) -> list[int]:
        return [self.stoi.get(t, 0) for t in tokens]

    def decode(self, ids: Iterable[int]) -> list[str]:
        return [self.itos[i] for i in ids]


def serialize_document(doc: Document, max_sentences: int = MAX_SENTENCES, truncate: bool = False) -> TaggedSequence:
    """Document to identifier-token form.

    The leading ``<S>`` is tagged 0; ``<S_k>``, the sentence tokens and the
    closing ``</S>`` are all tagged k.  Documents longer than
    ``max_sentences`` raise :class:`CapacityError`, or are cut with a warning
    when ``truncate`` is set.
    """
    sentences = doc.sentences
    if len(sentences) > max_sentences:
        if not truncate:
            raise CapacityError(f"document {doc.id!r} has {len(sentences)} > {max_sentences} sentences")
        log.warning("document %r truncated from %d to %d sentences", doc.id, len(sentences), max_sentences)
        sentences = sentences[:max_sentences]
    toks, tags = [DOC_START], [0]
    for k, s in enumerate(sentences, start=1):
        toks += [sent_start(k), *s.tokens, SENT_END]
        tags += [k] * (len(s.tokens) + 2)
    return TaggedSequence(tuple(toks), tuple(tags))


def parse_document(seq: Sequence[str], doc_id: str = "") -> Document:
    """Inverse of :func:`serialize_document`."""
    seq = list(seq)
    if not seq or seq[0] != DOC_START:
        raise UnexpectedIdentifier("document must open with <S>", 1)
    parsed = parse_summary(seq[1:], offset=1)
    opens = [i + 1 for i, t in enumerate(seq) if i > 0 and (t == DOC_START or sentence_id_of(t) is not None)]
    sentences = []
    for k, (lab, toks) in enumerate(parsed.sentences, start=1):
        if not lab.is_ext or lab.source_index != k:
            raise UnexpectedIdentifier(f"expected {sent_start(k)}", opens[k - 1])
        sentences.append(Sentence(toks, k))
    return Document(doc_id, tuple(sentences))


def serialize_styled(items: Iterable[tuple[StyleLabel, Sequence[str]]], n_doc_sentences: Optional[int] = None) -> TaggedSequence:
    toks: list[str] = []
    tags: list[int] = []
    for lab, words in items:
        words = tuple(words)
        if lab.is_ext:
            k = lab.source_index
            if n_doc_sentences is not None and k > n_doc_sentences:
                raise ValueError(f"Ext({k}) refers past {n_doc_sentences} document sentences")
            toks += [sent_start(k), *words, SENT_END]
            tags += [k] * (len(words) + 2)
        else:
            toks += [DOC_START, *words, SENT_END]
            tags += [0] * (len(words) + 2)
    return TaggedSequence(tuple(toks), tuple(tags))


def serialize_summary(labeled: LabeledPair) -> TaggedSequence:
    return serialize_styled(
        ((lab, s.tokens) for s, lab, _ in labeled.summary), len(labeled.doc.sentences)
    )


def parse_summary(
    seq: Sequence[str],
    n_doc_sentences: Optional[int] = None,
    max_sentences: int = MAX_SENTENCES,
    offset: int = 0,
) -> ParsedSummary:
    """Parse ``((<S_k>|<S>) content+ </S>)*``.

    Raises the subclass of :class:`SequenceParseError` for the first
    violation; positions are 1-based (shifted by ``offset``).
    """
    limit = max_sentences if n_doc_sentences is None else min(n_doc_sentences, max_sentences)
    out = []
    label: Optional[StyleLabel] = None
    words: list[str] = []
    for i, tok in enumerate(seq, start=1 + offset):
        k = sentence_id_of(tok)
        if tok == DOC_START or k is not None:
            if label is not None:
                raise UnexpectedIdentifier(f"{tok} inside an open sentence", i)
            if k is not None and k > limit:
                raise UnknownSentenceIndex(f"{tok} refers past sentence {limit}", i)
            label = StyleLabel.ext(k) if k is not None else StyleLabel.abs()
            words = []
        elif tok == SENT_END:
            if label is None:
                raise UnexpectedIdentifier("</S> without an open sentence", i)
            if not words:
                raise EmptySentence("sentence has no content", i)
            out.append((label, tuple(words)))
            label = None
        else:
            if label is None:
                raise UnexpectedContent(f"content token {tok!r} outside a sentence", i)
            words.append(tok)
    if label is not None:
        raise UnterminatedSentence("sequence ends inside a sentence", len(seq) + offset + 1)
    return ParsedSummary(tuple(out))
