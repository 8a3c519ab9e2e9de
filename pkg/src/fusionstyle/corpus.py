"""JSON-lines corpus and annotation records."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterator, Optional, Union

from .labeling import Style
from .text import Document, Sentence, make_document, split_sentences, tokenize

__all__ = [
    "DataError",
    "CorpusRecord",
    "Annotation",
    "parse_record",
    "read_records",
    "read_annotations",
]


class DataError(ValueError):
    """Malformed input; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class CorpusRecord:
    id: str
    document: Document
    summary: tuple[Sentence, ...]
    raw: dict


def _sentences(value, field: str, line: Optional[int]) -> list[list[str]]:
    if isinstance(value, str):
        sents = [list(s.tokens) for s in split_sentences(value)]
    elif isinstance(value, list) and all(isinstance(x, str) for x in value):
        sents = [tokenize(x) for x in value]
        if any(not s for s in sents):
            raise DataError(f"{field!r} contains an empty sentence", line)
    else:
        raise DataError(f"{field!r} must be a string or a list of strings", line)
    if not sents:
        raise DataError(f"{field!r} is empty", line)
    return sents


def parse_record(obj: Union[str, dict], line: Optional[int] = None) -> CorpusRecord:
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as e:
            raise DataError(f"invalid JSON ({e.msg})", line) from None
    if not isinstance(obj, dict):
        raise DataError("record must be a JSON object", line)
    for key in ("id", "document", "summary"):
        if key not in obj:
            raise DataError(f"missing field {key!r}", line)
    if not isinstance(obj["id"], str) or not obj["id"]:
        raise DataError("'id' must be a non-empty string", line)
    doc = make_document(obj["id"], _sentences(obj["document"], "document", line))
    summary = tuple(Sentence(tuple(t), i) for i, t in enumerate(_sentences(obj["summary"], "summary", line), 1))
    return CorpusRecord(obj["id"], doc, summary, obj)


def read_records(path, skip_errors: bool = False, errors: Optional[list] = None) -> Iterator[CorpusRecord]:
    """Stream records from a JSON-lines file.

    Blank lines are ignored.  A bad line raises :class:`DataError`, or with
    ``skip_errors`` is appended to ``errors`` and skipped.  Duplicate ids are
    data errors as well.  A file with no valid records raises.
    """
    seen: set[str] = set()
    n = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, text in enumerate(fh, 1):
            if not text.strip():
                continue
            try:
                rec = parse_record(text, lineno)
                if rec.id in seen:
                    raise DataError(f"duplicate id {rec.id!r}", lineno)
            except (DataError, ValueError) as e:
                err = e if isinstance(e, DataError) else DataError(str(e), lineno)
                if not skip_errors:
                    raise err from None
                if errors is not None:
                    errors.append(err)
                continue
            seen.add(rec.id)
            n += 1
            yield rec
    if n == 0:
        raise DataError(f"{path}: no records")


@dataclass(frozen=True)
class Annotation:
    """Human judgement for summary sentence ``sentence`` (1-based) of record ``id``."""

    id: str
    sentence: int
    human_fusion_degree: Optional[float] = None
    style: Optional[Style] = None


def read_annotations(path) -> list[Annotation]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, text in enumerate(fh, 1):
            if not text.strip():
                continue
            try:
                obj = json.loads(text)
                deg = obj.get("human_fusion_degree")
                style = obj.get("style")
                ann = Annotation(
                    str(obj["id"]),
                    int(obj["sentence"]),
                    None if deg is None else float(deg),
                    None if style is None else Style(style),
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError, AttributeError) as e:
                raise DataError(f"bad annotation ({e})", lineno) from None
            if ann.sentence < 1:
                raise DataError("'sentence' is 1-based", lineno)
            out.append(ann)
    if not out:
        raise DataError(f"{path}: no records")
    return out
