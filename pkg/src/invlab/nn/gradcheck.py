"""Central finite-difference verification of taped gradients.

Runs everything in float64: the check compares the analytic gradient of
a scalar-valued function against (f(x+h) - f(x-h)) / 2h per coordinate,
with relative error |a - n| / max(1, |a|, |n|).
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .tensor import Tape, Tensor, backward

DEFAULT_STEP = 1e-4


def numeric_gradients(fn: Callable, inputs: Sequence[np.ndarray],
                      step: float = DEFAULT_STEP) -> list:
    """Per-coordinate central differences of ``fn`` at ``inputs``.

    ``fn`` takes Tensors and returns a scalar Tensor; inputs are f64
    arrays and are not modified.
    """
    grads = []
    for k, base in enumerate(inputs):
        base = np.asarray(base, dtype=np.float64)
        g = np.zeros_like(base)
        flat = base.reshape(-1)
        gflat = g.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            args = [np.array(a, dtype=np.float64, copy=True) for a in inputs]
            args[k].reshape(-1)[i] = orig + step
            hi = fn(*[Tensor(a, dtype=np.float64) for a in args]).item()
            args[k].reshape(-1)[i] = orig - step
            lo = fn(*[Tensor(a, dtype=np.float64) for a in args]).item()
            gflat[i] = (hi - lo) / (2.0 * step)
        grads.append(g)
    return grads


def analytic_gradients(fn: Callable, inputs: Sequence[np.ndarray]) -> list:
    """Taped gradients of ``fn`` at ``inputs`` (f64)."""
    tensors = [Tensor(np.asarray(a, dtype=np.float64), requires_grad=True)
               for a in inputs]
    with Tape() as tape:
        for t in tensors:
            tape.watch(t)
        loss = fn(*tensors)
    backward(tape, loss)
    return [t.grad for t in tensors]


def max_relative_error(fn: Callable, inputs: Sequence[np.ndarray],
                       step: float = DEFAULT_STEP) -> float:
    """Worst relative error between analytic and numeric gradients."""
    analytic = analytic_gradients(fn, inputs)
    numeric = numeric_gradients(fn, inputs, step)
    worst = 0.0
    for a, n in zip(analytic, numeric):
        denom = np.maximum(1.0, np.maximum(np.abs(a), np.abs(n)))
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst


def check_gradients(fn: Callable, inputs: Sequence[np.ndarray],
                    tol: float = 1e-5, step: float = DEFAULT_STEP) -> float:
    """Assert the finite-difference check passes; returns the worst error."""
    err = max_relative_error(fn, inputs, step)
    if err >= tol:
        raise AssertionError(f"gradient check failed: max rel err {err:.3e} >= {tol}")
    return err


def sampled_relative_error(fn: Callable, inputs: Sequence[np.ndarray],
                           coords_per_input: int,
                           rng: np.random.Generator,
                           step: float = DEFAULT_STEP) -> float:
    """Like max_relative_error but differencing only a random coordinate
    subset per input — the only affordable option for model-sized
    tensors."""
    analytic = analytic_gradients(fn, inputs)
    worst = 0.0
    for k, base in enumerate(inputs):
        base = np.asarray(base, dtype=np.float64)
        size = base.size
        picks = rng.choice(size, min(coords_per_input, size), replace=False)
        for i in picks:
            args = [np.array(a, dtype=np.float64, copy=True) for a in inputs]
            flat = args[k].reshape(-1)
            orig = flat[i]
            flat[i] = orig + step
            hi = fn(*[Tensor(a, dtype=np.float64) for a in args]).item()
            flat[i] = orig - step
            lo = fn(*[Tensor(a, dtype=np.float64) for a in args]).item()
            numeric = (hi - lo) / (2.0 * step)
            a_val = float(analytic[k].reshape(-1)[i])
            denom = max(1.0, abs(a_val), abs(numeric))
            worst = max(worst, abs(a_val - numeric) / denom)
    return worst
