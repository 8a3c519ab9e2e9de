"""Text checkpoint format.

Line 1 is a JSON header::

    {"format": "fusionstyle-checkpoint", "version": 1,
     "config": {...ModelConfig...},
     "vocab": [...], "identifier_range": [start, stop],
     "tensors": [["tok_emb", [V, d]], ...]}

followed by one JSON line per tensor, ``{"name": ..., "shape": [...],
"data": [...]}``, in header order.  Floats are written with ``repr`` so a
load reproduces every value bit for bit, and the same parameters always
produce the same bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..seqformat import Vocab
from .network import ModelConfig, ToyModel

__all__ = ["FORMAT", "VERSION", "CheckpointError", "save_checkpoint", "load_checkpoint", "dumps", "loads"]

FORMAT = "fusionstyle-checkpoint"
VERSION = 1


class CheckpointError(ValueError):
    pass


def dumps(model: ToyModel) -> str:
    v = model.vocab
    header = {
        "format": FORMAT,
        "version": VERSION,
        "config": model.cfg.to_dict(),
        "vocab": v.itos,
        "identifier_range": [v.id_start, len(v)],
        "tensors": [[name, list(arr.shape)] for name, arr in model.params.items()],
    }
    lines = [json.dumps(header, separators=(",", ":"))]
    for name, arr in model.params.items():
        rec = {"name": name, "shape": list(arr.shape), "data": [float(x) for x in arr.reshape(-1)]}
        lines.append(json.dumps(rec, separators=(",", ":")))
    return "\n".join(lines) + "\n"


def loads(text: str) -> ToyModel:
    lines = text.splitlines()
    if not lines:
        raise CheckpointError("empty checkpoint")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as e:
        raise CheckpointError(f"bad header: {e}") from None
    if header.get("format") != FORMAT or header.get("version") != VERSION:
        raise CheckpointError("not a supported checkpoint (format/version)")
    cfg = ModelConfig(**header["config"])
    try:
        vocab = Vocab.from_list(header["vocab"], cfg.max_sentences)
    except ValueError as e:
        raise CheckpointError(str(e)) from None
    if len(vocab) != cfg.vocab_size:
        raise CheckpointError(f"vocabulary lists {len(vocab)} tokens, config says {cfg.vocab_size}")
    if header["identifier_range"] != [vocab.id_start, len(vocab)]:
        raise CheckpointError("identifier range does not match the vocabulary listing")

    expected = ToyModel.param_shapes(cfg)
    declared = {name: tuple(shape) for name, shape in header["tensors"]}
    if declared != {k: tuple(v) for k, v in expected.items()}:
        raise CheckpointError("tensor list in header does not match the model configuration")
    if len(lines) - 1 != len(declared):
        raise CheckpointError(f"expected {len(declared)} tensors, found {len(lines) - 1}")

    params = {}
    for line in lines[1:]:
        rec = json.loads(line)
        name, shape = rec["name"], tuple(rec["shape"])
        if declared.get(name) != shape:
            raise CheckpointError(f"tensor {name!r}: shape {shape} does not match header")
        data = np.array(rec["data"], dtype=np.float64)
        if data.size != int(np.prod(shape)):
            raise CheckpointError(f"tensor {name!r}: {data.size} values for shape {shape}")
        params[name] = data.reshape(shape)
    if list(params) != list(expected):
        raise CheckpointError("tensor order differs from header")
    if np.any(params["tag_emb"][0] != 0.0):
        raise CheckpointError("group-tag row 0 must be zero")
    return ToyModel(cfg, vocab, params)


def save_checkpoint(model: ToyModel, path) -> None:
    Path(path).write_text(dumps(model), encoding="utf-8", newline="\n")


def load_checkpoint(path) -> ToyModel:
    return loads(Path(path).read_text(encoding="utf-8"))
