"""Central finite-difference check of analytic gradients."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

__all__ = ["GradCheckResult", "sample_coordinates", "gradient_check", "model_gradient_check"]


@dataclass
class GradCheckResult:
    max_rel_error: float
    n_coords: int
    worst: tuple  # (param name, flat index, analytic, numeric)
    per_param: dict  # name -> max relative error over its sampled coordinates


def rel_error(ga: float, gn: float) -> float:
    return abs(ga - gn) / max(abs(ga), abs(gn), 1e-8)


def sample_coordinates(params: dict, n: int, rng, required: Iterable[tuple] = (), exclude=None) -> list[tuple]:
    """At least one coordinate per tensor, the rest spread by tensor size.

    ``exclude(name, flat_index)`` drops coordinates (e.g. pinned rows).
    """
    seen, out = set(), []

    def add(c):
        if c not in seen and not (exclude and exclude(*c)):
            seen.add(c)
            out.append(c)

    for c in required:
        add(c)
    names = list(params)
    per = max(1, n // len(names))
    for name in names:
        size = params[name].size
        for i in rng.choice(size, size=min(size, per), replace=False):
            add((name, int(i)))
    attempts = 0
    while len(out) < n and attempts < 100 * n:
        attempts += 1
        name = names[rng.integers(len(names))]
        add((name, int(rng.integers(params[name].size))))
    return out


def gradient_check(
    f: Callable[[dict], tuple[float, dict]],
    params: dict,
    coords: list[tuple],
    eps: float = 1e-4,
) -> GradCheckResult:
    """Compare ``f``'s analytic gradient with central differences.

    ``f(params) -> (loss, grads)``; ``params`` is perturbed in place and
    restored.
    """
    _, grads = f(params)
    worst = (None, None, 0.0, 0.0)
    max_err = 0.0
    per_param: dict = {}
    for name, i in coords:
        arr = params[name].reshape(-1)
        old = arr[i]
        arr[i] = old + eps
        fp = f(params)[0]
        arr[i] = old - eps
        fm = f(params)[0]
        arr[i] = old
        gn = (fp - fm) / (2 * eps)
        ga = float(grads[name].reshape(-1)[i])
        err = rel_error(ga, gn)
        per_param[name] = max(per_param.get(name, 0.0), err)
        if err >= max_err:
            max_err = err
            worst = (name, i, ga, gn)
    return GradCheckResult(max_err, len(coords), worst, per_param)


def model_gradient_check(model, batch, kappa: float = 1.1, eps: float = 1e-4, n_coords: int = 200,
                         rng: Optional[np.random.Generator] = None) -> GradCheckResult:
    """Finite-difference check of the full model loss.

    Always samples alpha and a coordinate from a nonzero group-tag row;
    the pinned group-tag row 0 is excluded.
    """
    rng = rng or np.random.default_rng(0)
    d = model.cfg.d_model
    used_tags = sorted({int(t) for ex in batch for t in ex.src_tags if t > 0})
    required = [("alpha", 0)]
    if used_tags:
        required.append(("tag_emb", used_tags[0] * d + int(rng.integers(d))))
    coords = sample_coordinates(
        model.params, n_coords, rng, required,
        exclude=lambda name, i: name == "tag_emb" and i < d,
    )

    def f(params):
        lb, g = model.loss_and_grads(batch, kappa)
        return lb.total, g

    return gradient_check(f, model.params, coords, eps)
