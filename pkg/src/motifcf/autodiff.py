"""Minimal reverse-mode differentiation over dense numpy arrays.

Just enough machinery for the loss chains in this package: elementwise
arithmetic with broadcasting, matmul, reductions, a handful of nonlinearities
and structural ops (slice/pad/concat). Every vector-Jacobian product here is
exercised against central finite differences by the gradcheck suite.

Not supported on purpose: in-place mutation, higher-order gradients, dtypes
other than float64.
"""

from __future__ import annotations

import numpy as np


class Tensor:
    """A node in the computation tape.

    ``value`` is always a float64 ndarray (scalars become 0-d arrays).
    Leaf tensors created with ``requires_grad=True`` accumulate into ``grad``
    after ``backward()``.
    """

    __slots__ = ("value", "grad", "requires_grad", "_parents", "_vjp")

    def __init__(self, value, requires_grad=False, _parents=(), _vjp=None):
        self.value = np.asarray(value, dtype=np.float64)
        self.grad = None
        self.requires_grad = requires_grad or any(p.requires_grad for p in _parents)
        self._parents = _parents
        self._vjp = _vjp

    @property
    def shape(self):
        return self.value.shape

    def item(self):
        return float(self.value)

    def detach(self):
        return Tensor(self.value.copy())

    # -- operators ---------------------------------------------------------

    def __add__(self, other):
        return add(self, _wrap(other))

    def __radd__(self, other):
        return add(_wrap(other), self)

    def __sub__(self, other):
        return sub(self, _wrap(other))

    def __rsub__(self, other):
        return sub(_wrap(other), self)

    def __mul__(self, other):
        return mul(self, _wrap(other))

    def __rmul__(self, other):
        return mul(_wrap(other), self)

    def __neg__(self):
        return mul(self, Tensor(-1.0))

    def __matmul__(self, other):
        return matmul(self, _wrap(other))

    def __truediv__(self, other):
        return div(self, _wrap(other))

    @property
    def T(self):
        return transpose(self)

    def backward(self):
        """Accumulate gradients of this (scalar) tensor into leaf ``grad``s."""
        if self.value.size != 1:
            raise ValueError("backward() requires a scalar output")
        order = []
        seen = set()

        def visit(node):
            if id(node) in seen:
                return
            seen.add(id(node))
            for p in node._parents:
                visit(p)
            order.append(node)

        visit(self)
        grads = {id(self): np.ones_like(self.value)}
        for node in reversed(order):
            g = grads.pop(id(node), None)
            if g is None or not node.requires_grad:
                continue
            if node._vjp is None:
                node.grad = g if node.grad is None else node.grad + g
                continue
            for parent, pg in zip(node._parents, node._vjp(g)):
                if not parent.requires_grad or pg is None:
                    continue
                key = id(parent)
                grads[key] = pg if key not in grads else grads[key] + pg


def _wrap(x):
    return x if isinstance(x, Tensor) else Tensor(x)


def _unbroadcast(grad, shape):
    """Sum ``grad`` down to ``shape`` (inverse of numpy broadcasting)."""
    g = grad
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for ax, n in enumerate(shape):
        if n == 1 and g.shape[ax] != 1:
            g = g.sum(axis=ax, keepdims=True)
    return g.reshape(shape)


# -- arithmetic --------------------------------------------------------------


def add(a, b):
    return Tensor(
        a.value + b.value,
        _parents=(a, b),
        _vjp=lambda g: (_unbroadcast(g, a.shape), _unbroadcast(g, b.shape)),
    )


def sub(a, b):
    return Tensor(
        a.value - b.value,
        _parents=(a, b),
        _vjp=lambda g: (_unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)),
    )


def mul(a, b):
    return Tensor(
        a.value * b.value,
        _parents=(a, b),
        _vjp=lambda g: (
            _unbroadcast(g * b.value, a.shape),
            _unbroadcast(g * a.value, b.shape),
        ),
    )


def div(a, b):
    return Tensor(
        a.value / b.value,
        _parents=(a, b),
        _vjp=lambda g: (
            _unbroadcast(g / b.value, a.shape),
            _unbroadcast(-g * a.value / (b.value * b.value), b.shape),
        ),
    )


def matmul(a, b):
    return Tensor(
        a.value @ b.value,
        _parents=(a, b),
        _vjp=lambda g: (g @ b.value.T, a.value.T @ g),
    )


def transpose(a):
    return Tensor(a.value.T, _parents=(a,), _vjp=lambda g: (g.T,))


def power(a, exponent):
    """Elementwise a**exponent for a scalar exponent (domain: a > 0 if
    exponent is non-integer)."""
    out = a.value**exponent
    return Tensor(
        out,
        _parents=(a,),
        _vjp=lambda g: (g * exponent * a.value ** (exponent - 1),),
    )


def square(a):
    return Tensor(a.value * a.value, _parents=(a,), _vjp=lambda g: (2.0 * g * a.value,))


def absolute(a):
    # subgradient 0 at the kink
    return Tensor(np.abs(a.value), _parents=(a,), _vjp=lambda g: (g * np.sign(a.value),))


# -- nonlinearities ----------------------------------------------------------


def relu(a):
    mask = a.value > 0
    return Tensor(a.value * mask, _parents=(a,), _vjp=lambda g: (g * mask,))


def _sigmoid(x):
    # numerically stable for |x| up to ~1e4/tau arguments
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def sigmoid(a):
    s = _sigmoid(np.atleast_1d(a.value)).reshape(a.shape)
    return Tensor(s, _parents=(a,), _vjp=lambda g: (g * s * (1.0 - s),))


def log(a):
    return Tensor(np.log(a.value), _parents=(a,), _vjp=lambda g: (g / a.value,))


def clip(a, lo, hi):
    """Clamp values; gradient is zero outside [lo, hi]."""
    inside = (a.value >= lo) & (a.value <= hi)
    return Tensor(np.clip(a.value, lo, hi), _parents=(a,), _vjp=lambda g: (g * inside,))


def xlogx(a):
    """Elementwise x*ln(x) with the entropy convention 0*ln(0) = 0.

    The true derivative ln(x)+1 diverges at 0; we pin both value and gradient
    to 0 for x <= 0 so zero-degree nodes stay inert under optimization.
    """
    pos = a.value > 0.0
    safe = np.where(pos, a.value, 1.0)
    out = np.where(pos, safe * np.log(safe), 0.0)
    return Tensor(
        out, _parents=(a,), _vjp=lambda g: (g * np.where(pos, np.log(safe) + 1.0, 0.0),)
    )


# -- reductions --------------------------------------------------------------


def tsum(a, axis=None):
    out = a.value.sum(axis=axis)

    def vjp(g):
        if axis is None:
            return (np.broadcast_to(g, a.shape).copy(),)
        return (np.broadcast_to(np.expand_dims(g, axis), a.shape).copy(),)

    return Tensor(out, _parents=(a,), _vjp=vjp)


def tmean(a, axis=None):
    n = a.value.size if axis is None else a.shape[axis]
    return tsum(a, axis=axis) * (1.0 / n)


def max_over_rows(a):
    """Column-wise maximum of a 2-d array; ties route gradient to the first
    maximal row (deterministic)."""
    idx = np.argmax(a.value, axis=0)
    out = a.value[idx, np.arange(a.shape[1])]

    def vjp(g):
        full = np.zeros_like(a.value)
        full[idx, np.arange(a.shape[1])] = g
        return (full,)

    return Tensor(out, _parents=(a,), _vjp=vjp)


# -- structure ---------------------------------------------------------------


def slice2d(a, rows, cols):
    """Top-left block a[:rows, :cols]."""
    return block2d(a, 0, rows, 0, cols)


def block2d(a, r0, r1, c0, c1):
    """Rectangular block a[r0:r1, c0:c1]."""

    def vjp(g):
        full = np.zeros_like(a.value)
        full[r0:r1, c0:c1] = g
        return (full,)

    return Tensor(a.value[r0:r1, c0:c1], _parents=(a,), _vjp=vjp)


def reshape(a, shape):
    return Tensor(
        a.value.reshape(shape), _parents=(a,), _vjp=lambda g: (g.reshape(a.shape),)
    )


def pad_to(a, shape):
    """Zero-pad a 2-d array at the bottom/right up to ``shape``."""
    r, c = a.shape
    out = np.zeros(shape, dtype=np.float64)
    out[:r, :c] = a.value
    return Tensor(out, _parents=(a,), _vjp=lambda g: (g[:r, :c],))


def concat(a, b, axis=0):
    """Concatenate two tensors along ``axis``."""
    na = a.value.shape[axis]
    take_a = [slice(None)] * a.value.ndim
    take_a[axis] = slice(0, na)
    take_b = [slice(None)] * a.value.ndim
    take_b[axis] = slice(na, None)
    return Tensor(
        np.concatenate([a.value, b.value], axis=axis),
        _parents=(a, b),
        _vjp=lambda g: (g[tuple(take_a)], g[tuple(take_b)]),
    )


def symmetrize(a):
    """(A + A^T)/2; keeps a full-matrix parameter exactly symmetric."""
    return Tensor(
        0.5 * (a.value + a.value.T), _parents=(a,), _vjp=lambda g: (0.5 * (g + g.T),)
    )
