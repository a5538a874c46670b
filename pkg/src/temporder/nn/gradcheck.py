"""Central finite-difference gradient checking."""

from __future__ import annotations

from contextlib import contextmanager

import numpy as np


@contextmanager
def params_as_dtype(params, dtype):
    """Temporarily view parameters (data + grad) in another float dtype.

    Finite differences at eps=1e-3 need float64 headroom to be a meaningful
    oracle; the layer code itself is dtype-generic, so the checked
    expressions are identical.
    """
    saved = [(p.data, p.grad) for p in params]
    for p in params:
        p.data = p.data.astype(dtype)
        p.grad = np.zeros_like(p.data)
    try:
        yield params
    finally:
        for p, (data, grad) in zip(params, saved):
            p.data = data
            p.grad = grad


def grad_check(run, params, eps: float = 1e-3, max_coords: int | None = None,
               rng: np.random.Generator | None = None) -> float:
    """Compare analytic gradients against central differences.

    `run(compute_grads)` must return the scalar loss; when `compute_grads`
    is true it must also accumulate gradients into the parameters. Returns
    the worst relative error over all (or `max_coords` sampled) coordinates.
    """
    for p in params:
        p.grad[...] = 0
    run(True)
    analytic = [p.grad.copy() for p in params]

    coords = [(i, j) for i, p in enumerate(params) for j in range(p.data.size)]
    if max_coords is not None and max_coords < len(coords):
        if rng is None:
            rng = np.random.default_rng(0)
        picked = rng.choice(len(coords), size=max_coords, replace=False)
        coords = [coords[int(k)] for k in sorted(picked)]

    worst = 0.0
    for pi, j in coords:
        data = params[pi].data
        orig = data.flat[j]
        data.flat[j] = orig + eps
        loss_plus = run(False)
        data.flat[j] = orig - eps
        loss_minus = run(False)
        data.flat[j] = orig
        numeric = (loss_plus - loss_minus) / (2.0 * eps)
        exact = analytic[pi].flat[j]
        denom = max(1e-12, abs(numeric) + abs(exact))
        worst = max(worst, abs(numeric - exact) / denom)
    return worst
