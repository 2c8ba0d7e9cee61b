"""Dense tensors with reverse-mode automatic differentiation.

A ``Tensor`` wraps a numpy array (float32 by default, float64 for
verification runs). Operations executed while a ``Tape`` is active are
recorded in execution order, which is already a topological order of the
computation graph; ``backward`` replays the records in reverse and
accumulates gradients into every ``requires_grad`` leaf.

There is deliberately no broadcasting beyond scalar-tensor and the
dedicated per-channel affine op: mismatched shapes fail loudly.
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence

import numpy as np

FLOAT_DTYPES = (np.float32, np.float64)


class ShapeError(ValueError):
    """Raised when operand shapes do not conform for a primitive."""


class NonFiniteGradientError(RuntimeError):
    """Raised when an optimizer step receives a NaN/Inf gradient."""


def _as_array(data, dtype=None) -> np.ndarray:
    # numpy values keep their float dtype (verification runs pass f64);
    # plain Python data defaults to float32.
    keep = isinstance(data, (np.ndarray, np.generic)) and data.dtype in FLOAT_DTYPES
    arr = np.asarray(data)
    if dtype is not None:
        arr = arr.astype(dtype, copy=False)
    elif not keep:
        arr = arr.astype(np.float32)
    return arr


class Tensor:
    """A dense array of real values, optionally tracked for gradients."""

    __slots__ = ("data", "grad", "requires_grad", "name")

    def __init__(self, data, requires_grad: bool = False, dtype=None,
                 name: Optional[str] = None):
        self.data = _as_array(data, dtype)
        self.grad: Optional[np.ndarray] = None
        self.requires_grad = bool(requires_grad)
        self.name = name

    @property
    def shape(self) -> tuple:
        return self.data.shape

    @property
    def dtype(self):
        return self.data.dtype

    @property
    def size(self) -> int:
        return self.data.size

    def detach(self) -> "Tensor":
        return Tensor(self.data, requires_grad=False, name=self.name)

    def copy(self) -> "Tensor":
        return Tensor(self.data.copy(), requires_grad=self.requires_grad,
                      name=self.name)

    def item(self) -> float:
        return float(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        tag = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}, dtype={self.dtype.name}{tag})"

    # Arithmetic sugar; real work lives in invlab.nn.ops.
    def __add__(self, other):
        from . import ops
        return ops.add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        from . import ops
        return ops.sub(self, other)

    def __rsub__(self, other):
        from . import ops
        return ops.sub(other, self)

    def __mul__(self, other):
        from . import ops
        return ops.mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        from . import ops
        return ops.div(self, other)

    def __rtruediv__(self, other):
        from . import ops
        return ops.div(other, self)

    def __neg__(self):
        from . import ops
        return ops.neg(self)

    def __matmul__(self, other):
        from . import ops
        return ops.matmul(self, other)


# One record per executed primitive: the output, the input tensors, and a
# closure mapping the output gradient to per-input gradients (None for
# inputs that need no gradient).
_Record = tuple["Tensor", tuple["Tensor", ...], Callable[[np.ndarray], Sequence[Optional[np.ndarray]]], str]

_TAPE_STACK: list["Tape"] = []


class Tape:
    """Ordered record of primitives; context manager activating recording."""

    def __init__(self):
        self._records: list[_Record] = []
        self._produced: set[int] = set()
        self._leaves: dict[int, Tensor] = {}

    def __enter__(self) -> "Tape":
        _TAPE_STACK.append(self)
        return self

    def __exit__(self, *exc) -> None:
        popped = _TAPE_STACK.pop()
        assert popped is self

    def __len__(self) -> int:
        return len(self._records)

    def watch(self, tensor: Tensor) -> None:
        """Register a leaf so it receives a gradient even if unused."""
        if tensor.requires_grad and id(tensor) not in self._produced:
            self._leaves.setdefault(id(tensor), tensor)

    def _add(self, out: Tensor, inputs: tuple, backward, opname: str) -> None:
        for t in inputs:
            if isinstance(t, Tensor) and t.requires_grad and id(t) not in self._produced:
                self._leaves.setdefault(id(t), t)
        self._produced.add(id(out))
        self._records.append((out, inputs, backward, opname))


def active_tape() -> Optional[Tape]:
    return _TAPE_STACK[-1] if _TAPE_STACK else None


def apply_op(opname: str, out_data: np.ndarray, inputs: tuple,
             make_backward) -> Tensor:
    """Wrap an op result, recording it when grads are being tracked.

    ``make_backward`` is invoked lazily (only when recording) and must
    return the closure grad_out -> per-input grads.
    """
    tape = active_tape()
    track = tape is not None and any(
        isinstance(t, Tensor) and t.requires_grad for t in inputs)
    out = Tensor(out_data, requires_grad=track)
    if track:
        tape._add(out, tuple(t for t in inputs if isinstance(t, Tensor)),
                  make_backward(), opname)
    return out


def backward(tape: Tape, loss: Tensor) -> None:
    """Accumulate d(loss)/d(leaf) into ``leaf.grad`` for every watched leaf.

    ``loss`` must be scalar. Leaves that do not reach the loss receive an
    all-zero gradient of their own shape.
    """
    if loss.data.shape != ():
        raise ValueError(
            f"backward requires a scalar loss, got shape {loss.data.shape}")
    grads: dict[int, np.ndarray] = {id(loss): np.ones((), dtype=loss.dtype)}
    for out, inputs, fn, opname in reversed(tape._records):
        g = grads.pop(id(out), None)
        if g is None:
            continue
        input_grads = fn(g)
        for t, gi in zip(inputs, input_grads):
            if gi is None or not t.requires_grad:
                continue
            if gi.shape != t.data.shape:
                raise ShapeError(
                    f"{opname}: backward produced gradient of shape {gi.shape} "
                    f"for input of shape {t.data.shape}")
            acc = grads.get(id(t))
            grads[id(t)] = gi if acc is None else acc + gi
    for key, leaf in tape._leaves.items():
        g = grads.get(key)
        leaf.grad = g.astype(leaf.dtype, copy=False) if g is not None \
            else np.zeros_like(leaf.data)
