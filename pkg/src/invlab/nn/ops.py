"""Differentiable primitives over :class:`~invlab.nn.tensor.Tensor`.

Every function computes its result with numpy and registers a hand-written
backward rule on the active tape. Binary ops accept a Python scalar in
place of either operand; any other shape mismatch raises ``ShapeError``
naming the primitive.
"""

from __future__ import annotations

import numpy as np

from .tensor import ShapeError, Tensor, apply_op

ARCCOSH_DOMAIN_EPS = 1e-12


def _coerce_pair(opname, a, b):
    """Return (a, b) as Tensors, allowing one scalar operand."""
    a_scalar = isinstance(a, (int, float))
    b_scalar = isinstance(b, (int, float))
    if a_scalar and b_scalar:
        raise TypeError(f"{opname}: at least one operand must be a Tensor")
    if a_scalar:
        a = Tensor(np.asarray(a, dtype=b.dtype))
    elif b_scalar:
        b = Tensor(np.asarray(b, dtype=a.dtype))
    if a.data.shape != b.data.shape and a.data.shape != () and b.data.shape != ():
        raise ShapeError(f"{opname}: shapes {a.data.shape} and {b.data.shape} "
                         "do not match (only scalar-tensor broadcasting is allowed)")
    return a, b


def _unbroadcast_scalar(g: np.ndarray, shape: tuple) -> np.ndarray:
    # Gradient for a scalar operand of a scalar-tensor op.
    if shape == () and g.shape != ():
        return g.sum()
    return g


def add(a, b) -> Tensor:
    a, b = _coerce_pair("add", a, b)
    out = a.data + b.data

    def make():
        def bw(g):
            return (_unbroadcast_scalar(g, a.data.shape),
                    _unbroadcast_scalar(g, b.data.shape))
        return bw
    return apply_op("add", out, (a, b), make)


def sub(a, b) -> Tensor:
    a, b = _coerce_pair("sub", a, b)
    out = a.data - b.data

    def make():
        def bw(g):
            return (_unbroadcast_scalar(g, a.data.shape),
                    _unbroadcast_scalar(-g, b.data.shape))
        return bw
    return apply_op("sub", out, (a, b), make)


def mul(a, b) -> Tensor:
    a, b = _coerce_pair("mul", a, b)
    out = a.data * b.data

    def make():
        ad, bd = a.data, b.data

        def bw(g):
            return (_unbroadcast_scalar(g * bd, ad.shape),
                    _unbroadcast_scalar(g * ad, bd.shape))
        return bw
    return apply_op("mul", out, (a, b), make)


def div(a, b) -> Tensor:
    a, b = _coerce_pair("div", a, b)
    out = a.data / b.data

    def make():
        ad, bd = a.data, b.data

        def bw(g):
            return (_unbroadcast_scalar(g / bd, ad.shape),
                    _unbroadcast_scalar(-g * ad / (bd * bd), bd.shape))
        return bw
    return apply_op("div", out, (a, b), make)


def neg(a: Tensor) -> Tensor:
    def make():
        return lambda g: (-g,)
    return apply_op("neg", -a.data, (a,), make)


def matmul(a: Tensor, b: Tensor) -> Tensor:
    if a.data.ndim != 2 or b.data.ndim != 2 or a.data.shape[1] != b.data.shape[0]:
        raise ShapeError(f"matmul: cannot multiply {a.data.shape} by {b.data.shape}")
    out = a.data @ b.data

    def make():
        ad, bd = a.data, b.data
        need_a, need_b = a.requires_grad, b.requires_grad

        def bw(g):
            return (g @ bd.T if need_a else None,
                    ad.T @ g if need_b else None)
        return bw
    return apply_op("matmul", out, (a, b), make)


def transpose(a: Tensor) -> Tensor:
    if a.data.ndim != 2:
        raise ShapeError(f"transpose: expected 2-d input, got {a.data.shape}")
    out = np.ascontiguousarray(a.data.T)

    def make():
        return lambda g: (np.ascontiguousarray(g.T),)
    return apply_op("transpose", out, (a,), make)


def bias_add_rows(x: Tensor, b: Tensor) -> Tensor:
    """Add a (F,) bias to every row of a (B, F) tensor."""
    if x.data.ndim != 2 or b.data.shape != (x.data.shape[1],):
        raise ShapeError(f"bias_add_rows: x {x.data.shape} with bias {b.data.shape}")
    out = x.data + b.data

    def make():
        return lambda g: (g, g.sum(axis=0))
    return apply_op("bias_add_rows", out, (x, b), make)


def conv2d(x: Tensor, w: Tensor, b: Tensor | None = None) -> Tensor:
    """2-D convolution, stride 1, zero padding to 'same', odd square kernel.

    x: (B, C, H, W), w: (O, C, k, k), optional b: (O,). Computed directly
    as k*k shifted channel contractions (no im2col buffer).
    """
    if x.data.ndim != 4 or w.data.ndim != 4:
        raise ShapeError(f"conv2d: x {x.data.shape}, w {w.data.shape}")
    B, C, H, W = x.data.shape
    O, Cw, kh, kw = w.data.shape
    if Cw != C or kh != kw or kh % 2 != 1:
        raise ShapeError(f"conv2d: weight {w.data.shape} incompatible with input "
                         f"{x.data.shape} (need odd square kernel over {C} channels)")
    if b is not None and b.data.shape != (O,):
        raise ShapeError(f"conv2d: bias {b.data.shape}, expected ({O},)")
    k, p = kh, kh // 2
    xp = np.pad(x.data, ((0, 0), (0, 0), (p, p), (p, p)))
    acc = np.zeros((B, H, W, O), dtype=x.data.dtype)
    for i in range(k):
        for j in range(k):
            acc += np.tensordot(xp[:, :, i:i + H, j:j + W], w.data[:, :, i, j],
                                axes=([1], [1]))
    out = np.ascontiguousarray(acc.transpose(0, 3, 1, 2))
    if b is not None:
        out += b.data[None, :, None, None]

    def make():
        xpad = xp
        wd = w.data
        need_x, need_w = x.requires_grad, w.requires_grad

        def bw(g):
            dxp = np.zeros((B, H + 2 * p, W + 2 * p, C), dtype=g.dtype) \
                if need_x else None
            dw = np.empty_like(wd) if need_w else None
            for i in range(k):
                for j in range(k):
                    if need_w:
                        win = xpad[:, :, i:i + H, j:j + W]
                        dw[:, :, i, j] = np.tensordot(
                            g, win, axes=([0, 2, 3], [0, 2, 3]))
                    if need_x:
                        dxp[:, i:i + H, j:j + W, :] += np.tensordot(
                            g, wd[:, :, i, j], axes=([1], [0]))
            dx = np.ascontiguousarray(
                dxp[:, p:p + H, p:p + W, :].transpose(0, 3, 1, 2)) \
                if need_x else None
            grads = [dx, dw]
            if b is not None:
                grads.append(g.sum(axis=(0, 2, 3)))
            return grads
        return bw
    inputs = (x, w) if b is None else (x, w, b)
    return apply_op("conv2d", out, inputs, make)


def flip_conv_weight(w: Tensor) -> Tensor:
    """(O, C, k, k) -> (C, O, k, k) with both spatial axes reversed.

    The kernel that maps an output-side gradient back to input space;
    used to express a convolution's input gradient as a forward conv.
    """
    if w.data.ndim != 4:
        raise ShapeError(f"flip_conv_weight: expected 4-d weight, got {w.data.shape}")
    out = np.ascontiguousarray(w.data[:, :, ::-1, ::-1].transpose(1, 0, 2, 3))

    def make():
        def bw(g):
            return (np.ascontiguousarray(g.transpose(1, 0, 2, 3)[:, :, ::-1, ::-1]),)
        return bw
    return apply_op("flip_conv_weight", out, (w,), make)


def upsample2x(x: Tensor) -> Tensor:
    """Nearest-neighbor 2x spatial upsample of (B, C, H, W)."""
    if x.data.ndim != 4:
        raise ShapeError(f"upsample2x: expected 4-d input, got {x.data.shape}")
    out = x.data.repeat(2, axis=2).repeat(2, axis=3)

    def make():
        B, C, H, W = x.data.shape

        def bw(g):
            return (g.reshape(B, C, H, 2, W, 2).sum(axis=(3, 5)),)
        return bw
    return apply_op("upsample2x", out, (x,), make)


def avg_pool2d(x: Tensor) -> Tensor:
    """2x2 average pooling with stride 2; spatial dims must be even."""
    if x.data.ndim != 4 or x.data.shape[2] % 2 or x.data.shape[3] % 2:
        raise ShapeError(f"avg_pool2d: need 4-d input with even H, W, got {x.data.shape}")
    B, C, H, W = x.data.shape
    out = x.data.reshape(B, C, H // 2, 2, W // 2, 2).mean(axis=(3, 5))

    def make():
        def bw(g):
            return (g.repeat(2, axis=2).repeat(2, axis=3) * 0.25,)
        return bw
    return apply_op("avg_pool2d", out, (x,), make)


def leaky_relu(x: Tensor, alpha: float = 0.2) -> Tensor:
    out = np.where(x.data >= 0, x.data, x.data * alpha)

    def make():
        slope = np.where(x.data >= 0, 1.0, alpha).astype(x.data.dtype)
        return lambda g: (g * slope,)
    return apply_op("leaky_relu", out, (x,), make)


def tanh(x: Tensor) -> Tensor:
    out = np.tanh(x.data)

    def make():
        y = out
        return lambda g: (g * (1.0 - y * y),)
    return apply_op("tanh", out, (x,), make)


def exp(x: Tensor) -> Tensor:
    out = np.exp(x.data)

    def make():
        y = out
        return lambda g: (g * y,)
    return apply_op("exp", out, (x,), make)


def log(x: Tensor) -> Tensor:
    out = np.log(x.data)

    def make():
        xd = x.data
        return lambda g: (g / xd,)
    return apply_op("log", out, (x,), make)


def sqrt(x: Tensor) -> Tensor:
    out = np.sqrt(x.data)

    def make():
        y = out
        return lambda g: (g * 0.5 / y,)
    return apply_op("sqrt", out, (x,), make)


def _sigmoid(x: np.ndarray) -> np.ndarray:
    # Overflow-safe logistic.
    pos = x >= 0
    z = np.exp(-np.abs(x))
    return np.where(pos, 1.0 / (1.0 + z), z / (1.0 + z))


def softplus(x: Tensor) -> Tensor:
    out = np.logaddexp(0.0, x.data).astype(x.data.dtype)

    def make():
        s = _sigmoid(x.data)
        return lambda g: (g * s,)
    return apply_op("softplus", out, (x,), make)


def absolute(x: Tensor) -> Tensor:
    out = np.abs(x.data)

    def make():
        s = np.sign(x.data)
        return lambda g: (g * s,)
    return apply_op("absolute", out, (x,), make)


def arccosh(x: Tensor) -> Tensor:
    """Inverse hyperbolic cosine, input clamped into the domain at 1.

    arccosh(1) is exactly 0, so coincident points in the hyperbolic
    identity loss score 0. Entries at or just above the boundary
    (within 1e-12) get zero gradient: the true derivative blows up
    there and the clamped function is flat below.
    """
    xc = np.maximum(x.data, 1.0)
    out = np.log(xc + np.sqrt(xc * xc - 1.0))

    def make():
        active = x.data > 1.0 + ARCCOSH_DOMAIN_EPS
        denom = np.where(active, np.sqrt(xc * xc - 1.0), 1.0)
        scale = active.astype(x.data.dtype) / denom
        return lambda g: (g * scale,)
    return apply_op("arccosh", out, (x,), make)


def instance_norm(x: Tensor, eps: float = 1e-5) -> Tensor:
    """Normalize each (sample, channel) plane of (B, C, H, W) to zero
    mean and unit variance over its spatial extent."""
    if x.data.ndim != 4:
        raise ShapeError(f"instance_norm: expected 4-d input, got {x.data.shape}")
    mean = x.data.mean(axis=(2, 3), keepdims=True)
    var = x.data.var(axis=(2, 3), keepdims=True)
    inv_std = 1.0 / np.sqrt(var + eps)
    out = (x.data - mean) * inv_std

    def make():
        y, istd = out, inv_std

        def bw(g):
            gm = g.mean(axis=(2, 3), keepdims=True)
            gym = (g * y).mean(axis=(2, 3), keepdims=True)
            return (istd * (g - gm - y * gym),)
        return bw
    return apply_op("instance_norm", out, (x,), make)


def channel_affine(x: Tensor, scale: Tensor, shift: Tensor) -> Tensor:
    """Per-channel scale and shift of (B, C, H, W).

    scale/shift are (C,) for shared parameters or (B, C) for per-sample
    modulation; this is the only sanctioned non-scalar broadcast.
    """
    if x.data.ndim != 4:
        raise ShapeError(f"channel_affine: expected 4-d input, got {x.data.shape}")
    B, C = x.data.shape[:2]
    if scale.data.shape not in ((C,), (B, C)) or shift.data.shape != scale.data.shape:
        raise ShapeError(f"channel_affine: x {x.data.shape}, scale {scale.data.shape}, "
                         f"shift {shift.data.shape}")
    per_sample = scale.data.ndim == 2
    s = scale.data[:, :, None, None] if per_sample else scale.data[None, :, None, None]
    t = shift.data[:, :, None, None] if per_sample else shift.data[None, :, None, None]
    out = x.data * s + t

    def make():
        xd = x.data

        def bw(g):
            axes = (2, 3) if per_sample else (0, 2, 3)
            return (g * s, (g * xd).sum(axis=axes), g.sum(axis=axes))
        return bw
    return apply_op("channel_affine", out, (x, scale, shift), make)


def softmax(x: Tensor) -> Tensor:
    """Softmax over the last axis."""
    shifted = x.data - x.data.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    out = e / e.sum(axis=-1, keepdims=True)

    def make():
        y = out

        def bw(g):
            return (y * (g - (g * y).sum(axis=-1, keepdims=True)),)
        return bw
    return apply_op("softmax", out, (x,), make)


def log_softmax(x: Tensor) -> Tensor:
    shifted = x.data - x.data.max(axis=-1, keepdims=True)
    lse = np.log(np.exp(shifted).sum(axis=-1, keepdims=True))
    out = shifted - lse

    def make():
        p = np.exp(out)

        def bw(g):
            return (g - p * g.sum(axis=-1, keepdims=True),)
        return bw
    return apply_op("log_softmax", out, (x,), make)


def _restore_axes(g: np.ndarray, shape: tuple, axis, keepdims: bool) -> np.ndarray:
    if not keepdims and axis is not None:
        axes = (axis,) if isinstance(axis, int) else tuple(axis)
        axes = tuple(a % len(shape) for a in axes)
        g = np.expand_dims(g, axes)
    return np.broadcast_to(g, shape).astype(g.dtype, copy=False)


def reduce_sum(x: Tensor, axis=None, keepdims: bool = False) -> Tensor:
    out = x.data.sum(axis=axis, keepdims=keepdims)

    def make():
        shape = x.data.shape

        def bw(g):
            if axis is None and not keepdims:
                return (np.full(shape, g, dtype=x.data.dtype),)
            return (_restore_axes(g, shape, axis, keepdims).copy(),)
        return bw
    return apply_op("reduce_sum", out, (x,), make)


def reduce_mean(x: Tensor, axis=None, keepdims: bool = False) -> Tensor:
    out = x.data.mean(axis=axis, keepdims=keepdims)

    def make():
        shape = x.data.shape
        count = x.data.size / out.size

        def bw(g):
            if axis is None and not keepdims:
                return (np.full(shape, g / count, dtype=x.data.dtype),)
            return (_restore_axes(g, shape, axis, keepdims) / count,)
        return bw
    return apply_op("reduce_mean", out, (x,), make)


def reshape(x: Tensor, shape) -> Tensor:
    out = x.data.reshape(shape)

    def make():
        orig = x.data.shape
        return lambda g: (g.reshape(orig),)
    return apply_op("reshape", out, (x,), make)


def tile_batch(x: Tensor, batch: int) -> Tensor:
    """Replicate a per-sample constant to a leading batch axis."""
    if batch < 1:
        raise ShapeError(f"tile_batch: batch must be positive, got {batch}")
    out = np.broadcast_to(x.data, (batch,) + x.data.shape).copy()

    def make():
        return lambda g: (g.sum(axis=0),)
    return apply_op("tile_batch", out, (x,), make)


def clip_rows_l2(x: Tensor, max_norm: float) -> Tensor:
    """Rescale any row of (B, F) whose l2 norm exceeds ``max_norm``."""
    if x.data.ndim != 2:
        raise ShapeError(f"clip_rows_l2: expected 2-d input, got {x.data.shape}")
    norms = np.linalg.norm(x.data, axis=1, keepdims=True)
    factor = np.where(norms > max_norm, max_norm / np.maximum(norms, 1e-30), 1.0)
    out = x.data * factor

    def make():
        xd = x.data
        active = norms > max_norm

        def bw(g):
            # Active rows: y = m*x/n; dy/dx = (m/n)(I - x x^T / n^2).
            dot = (g * xd).sum(axis=1, keepdims=True)
            n2 = np.maximum(norms * norms, 1e-60)
            scaled = factor * (g - xd * dot / n2)
            return (np.where(active, scaled, g),)
        return bw
    return apply_op("clip_rows_l2", out, (x,), make)


# Composite norms (gradients come from the primitives above).

def l1_norm(x: Tensor, axis=None) -> Tensor:
    return reduce_sum(absolute(x), axis=axis)


def l2_norm(x: Tensor, axis=None) -> Tensor:
    return sqrt(reduce_sum(mul(x, x), axis=axis))
