"""Three-stage training: base copy task, pre-finetuning, joint finetuning."""

from __future__ import annotations

import dataclasses
import enum
import logging
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .network import Example, LossBreakdown, ToyModel

__all__ = ["Stage", "TrainConfig", "TrainingError", "EpochLog", "Adam", "embedding_norms", "train"]

log = logging.getLogger(__name__)

DEFAULT_KAPPA = 1.1


class Stage(str, enum.Enum):
    PRETRAIN_BASE = "pretrain-base"
    PRE_FINETUNE = "pre-finetune"
    JOINT_FINETUNE = "joint-finetune"


class TrainingError(RuntimeError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    epochs: dict = field(
        default_factory=lambda: {Stage.PRETRAIN_BASE: 10, Stage.PRE_FINETUNE: 8, Stage.JOINT_FINETUNE: 30}
    )
    lr: float = 2e-3
    batch_size: int = 16
    kappa: float = DEFAULT_KAPPA
    seed: int = 0
    optimizer: str = "adam"
    clip_norm: float = 1.0  # 0 disables
    # lr falls linearly to lr * final_lr_ratio over each stage
    final_lr_ratio: float = 0.1
    # each example starts its position rows at a random offset in [0, jitter]
    position_jitter: int = 32

    def __post_init__(self):
        eps = {Stage(k): int(v) for k, v in self.epochs.items()}
        if any(v < 0 for v in eps.values()):
            raise ValueError("epochs must be >= 0")
        object.__setattr__(self, "epochs", {s: eps.get(s, 0) for s in Stage})
        if self.position_jitter < 0:
            raise ValueError("position_jitter must be >= 0")
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["epochs"] = {s.value: n for s, n in self.epochs.items()}
        return d


@dataclass
class EpochLog:
    stage: str
    epoch: int
    token_loss: float
    style_loss: float
    kappa: float
    total: float
    identifier_norm: float
    group_tag_norm: float


class Adam:
    def __init__(self, lr, b1=0.9, b2=0.999, eps=1e-8):
        self.lr, self.b1, self.b2, self.eps = lr, b1, b2, eps
        self.m, self.v, self.t = {}, {}, 0

    def step(self, params, grads, masks):
        self.t += 1
        c1 = 1 - self.b1**self.t
        c2 = 1 - self.b2**self.t
        for name, mask in masks.items():
            g = grads[name]
            m = self.m.setdefault(name, np.zeros_like(g))
            v = self.v.setdefault(name, np.zeros_like(g))
            m *= self.b1
            m += (1 - self.b1) * g
            v *= self.b2
            v += (1 - self.b2) * g * g
            upd = self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)
            _apply(params, name, upd, mask)


class SGD:
    def __init__(self, lr):
        self.lr = lr

    def step(self, params, grads, masks):
        for name, mask in masks.items():
            _apply(params, name, self.lr * grads[name], mask)


def _apply(params, name, upd, mask):
    if mask is True:
        params[name] -= upd
    else:
        params[name] -= np.where(mask, upd, 0.0)


def _clip(grads, masks, max_norm):
    sq = 0.0
    for name, mask in masks.items():
        g = grads[name] if mask is True else np.where(mask, grads[name], 0.0)
        sq += float((g * g).sum())
    norm = np.sqrt(sq)
    if norm > max_norm:
        for name in masks:
            grads[name] *= max_norm / norm


def _shift(ex: Example, rng, jitter: int, max_positions: int) -> Example:
    hi_src = min(jitter, max_positions - len(ex.src_ids))
    hi_dec = min(jitter, max_positions - len(ex.dec_ids))
    return dataclasses.replace(
        ex,
        src_offset=int(rng.integers(hi_src + 1)),
        dec_offset=int(rng.integers(hi_dec + 1)),
    )


def embedding_norms(model: ToyModel) -> tuple[float, float]:
    """Mean L2 norm of identifier-token rows and of group-tag rows 1..M."""
    p = model.params
    ids = list(model.vocab.identifier_ids())
    ident = float(np.linalg.norm(p["tok_emb"][ids], axis=1).mean())
    tag = float(np.linalg.norm(p["tag_emb"][1:], axis=1).mean())
    return ident, tag


def _stage_masks(model: ToyModel, stage: Stage) -> dict:
    new = model.new_param_masks()
    masks = {}
    for name in model.params:
        if stage is Stage.JOINT_FINETUNE:
            masks[name] = True
        elif stage is Stage.PRE_FINETUNE:
            if name in new:
                masks[name] = new[name]
        else:
            masks[name] = ~new[name] if name in new else True
    tag = np.ones(model.params["tag_emb"].shape, dtype=bool) if masks.get("tag_emb") is True else masks.get("tag_emb")
    if tag is not None:
        tag = tag.copy()
        tag[0] = False
        masks["tag_emb"] = tag
    masks = {k: v for k, v in masks.items() if v is True or v.any()}
    return masks


def train(
    model: ToyModel,
    corpus: Sequence,
    cfg: TrainConfig,
    on_epoch: Optional[Callable[[EpochLog], None]] = None,
) -> list[EpochLog]:
    """Train ``model`` in place and return one log row per epoch.

    ``corpus`` holds ``(Document, [(StyleLabel, tokens), ...])`` pairs (or
    objects with ``doc`` and ``items``).  The base stage trains everything
    except the style parameters on a plain copy task; pre-finetuning trains
    only identifier rows, group-tag rows and alpha; joint finetuning trains
    all of it.  Group-tag row 0 is held at zero throughout.
    """
    if not corpus:
        raise ValueError("empty corpus")
    pairs = [(c.doc, c.items) if hasattr(c, "items") and hasattr(c, "doc") else c for c in corpus]
    styled = [model.make_example(doc, items) for doc, items in pairs]
    copies = None
    rng = np.random.default_rng(cfg.seed)
    rows: list[EpochLog] = []
    for stage in Stage:
        n_epochs = cfg.epochs[stage]
        if n_epochs == 0:
            log.info("stage %s skipped", stage.value)
            continue
        if stage is Stage.PRETRAIN_BASE:
            copies = copies or [model.make_copy_example(doc) for doc, _ in pairs]
            data = copies
        else:
            data = styled
        masks = _stage_masks(model, stage)
        opt = Adam(cfg.lr) if cfg.optimizer == "adam" else SGD(cfg.lr)
        n_steps = n_epochs * -(-len(data) // cfg.batch_size)
        step = 0
        for epoch in range(1, n_epochs + 1):
            order = rng.permutation(len(data))
            sums = np.zeros(4)  # token nll, n tokens, style nll, n decisions
            for b, start in enumerate(range(0, len(order), cfg.batch_size)):
                batch: list[Example] = [data[i] for i in order[start : start + cfg.batch_size]]
                if cfg.position_jitter:
                    batch = [_shift(ex, rng, cfg.position_jitter, model.cfg.max_positions) for ex in batch]
                lb, grads = model.loss_and_grads(batch, cfg.kappa)
                if not np.isfinite(lb.total):
                    raise TrainingError(f"non-finite loss in stage {stage.value}, epoch {epoch}, batch {b}")
                if cfg.clip_norm > 0:
                    _clip(grads, masks, cfg.clip_norm)
                opt.lr = cfg.lr * (1.0 - (1.0 - cfg.final_lr_ratio) * step / max(1, n_steps - 1))
                step += 1
                opt.step(model.params, grads, masks)
                model.params["tag_emb"][0] = 0.0
                sums += (lb.token_loss * lb.n_tokens, lb.n_tokens, lb.style_loss * lb.n_decisions, lb.n_decisions)
            tok = sums[0] / sums[1]
            sty = sums[2] / sums[3] if sums[3] else 0.0
            ident, tag = embedding_norms(model)
            row = EpochLog(stage.value, epoch, tok, sty, cfg.kappa, tok + cfg.kappa * sty, ident, tag)
            rows.append(row)
            log.info("%s epoch %d: token %.4f style %.4f", stage.value, epoch, tok, sty)
            if on_epoch:
                on_epoch(row)
    return rows
