"""Polynomial maps on n+ x n- as expression DAGs with exact forward-mode derivatives.

Every node evaluates on a batch: X has shape (B, *plus_shape), Y has shape
(B, *minus_shape). Scalar nodes produce arrays of shape (B,), matrix nodes
(B, m, n). `jvp` returns the value together with the directional derivative
along (dX, dY), computed node by node (product rule, adjugate rule for
determinants, cofactor expansion for Pfaffians).
"""
from __future__ import annotations

from itertools import count
from typing import Callable

import numpy as np

from ..errors import DomainError

_ids = count()


def pfaffian(a: np.ndarray, _cache: dict | None = None, idx: tuple | None = None) -> np.ndarray:
    """Pfaffian of a batch of antisymmetric matrices, by memoized first-row expansion.

    Exact as a polynomial in the entries; fine for the small sizes used here.
    """
    a = np.asarray(a)
    n = a.shape[-1]
    cache = {} if _cache is None else _cache
    idx = tuple(range(n)) if idx is None else idx
    return _pf(a, idx, cache)


def _pf(a, idx, cache):
    if idx in cache:
        return cache[idx]
    if len(idx) == 0:
        out = np.ones(a.shape[:-2], dtype=a.dtype)
    elif len(idx) % 2:
        out = np.zeros(a.shape[:-2], dtype=a.dtype)
    else:
        i = idx[0]
        out = 0
        for pos in range(1, len(idx)):
            j = idx[pos]
            rest = idx[1:pos] + idx[pos + 1:]
            sign = 1 if pos % 2 else -1
            out = out + sign * a[..., i, j] * _pf(a, rest, cache)
    cache[idx] = out
    return out


def pfaffian_gradient(a: np.ndarray) -> np.ndarray:
    """G with dPf = sum_{i<j} G_ij dA_ij, G_ij = (-1)^(i+j+1) Pf(A without rows/cols i, j)."""
    n = a.shape[-1]
    cache: dict = {}
    grad = np.zeros(a.shape, dtype=a.dtype)
    full = tuple(range(n))
    for i in range(n):
        for j in range(i + 1, n):
            rest = tuple(k for k in full if k not in (i, j))
            grad[..., i, j] = (-1) ** (i + j + 1) * _pf(a, rest, cache)
    return grad


def adjugate(a: np.ndarray) -> np.ndarray:
    """Batched adjugate by cofactors (valid for singular matrices too)."""
    n = a.shape[-1]
    if n == 1:
        return np.ones_like(a)
    adj = np.empty_like(a)
    rows = np.arange(n)
    for i in range(n):
        for j in range(n):
            minor = a[..., rows != i, :][..., :, rows != j]
            adj[..., j, i] = (-1) ** (i + j) * np.linalg.det(minor)
    return adj


class Node:
    """Base expression node. Subclasses implement `_eval(vals)` and `_tan(vals, tans)`."""

    children: tuple = ()
    scalar: bool = False

    def __init__(self):
        self.uid = next(_ids)

    def _eval(self, vals):
        raise NotImplementedError

    def _tan(self, vals, tans, out):
        raise NotImplementedError

    def __add__(self, other):
        return Add(self, as_node(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Add(self, Scale(-1.0, as_node(other)))

    def __rsub__(self, other):
        return Add(as_node(other), Scale(-1.0, self))

    def __neg__(self):
        return Scale(-1.0, self)

    def __mul__(self, other):
        if np.isscalar(other):
            return Scale(other, self)
        return Mul(self, as_node(other))

    __rmul__ = __mul__

    def __matmul__(self, other):
        return MatMul(self, as_node(other))

    def __rmatmul__(self, other):
        return MatMul(as_node(other), self)

    def __pow__(self, k):
        return Power(self, int(k))


def as_node(obj) -> Node:
    if isinstance(obj, Node):
        return obj
    return Const(obj)


class Const(Node):
    def __init__(self, value):
        super().__init__()
        self.value = np.asarray(value, dtype=complex)
        self.scalar = self.value.ndim == 0

    def _eval(self, vals):
        return self.value

    def _tan(self, vals, tans, out):
        return np.zeros_like(self.value)


class VarX(Node):
    def _eval(self, vals):
        return vals["__x"]

    def _tan(self, vals, tans, out):
        return tans["__x"]


class VarY(Node):
    def _eval(self, vals):
        return vals["__y"]

    def _tan(self, vals, tans, out):
        return tans["__y"]


class Add(Node):
    def __init__(self, a, b):
        super().__init__()
        if a.scalar != b.scalar:
            raise DomainError("cannot add scalar and matrix nodes")
        self.children = (a, b)
        self.scalar = a.scalar

    def _eval(self, v):
        return v[0] + v[1]

    def _tan(self, v, t, out):
        return t[0] + t[1]


class Scale(Node):
    def __init__(self, c, a):
        super().__init__()
        self.c = complex(c)
        self.children = (a,)
        self.scalar = a.scalar

    def _eval(self, v):
        return self.c * v[0]

    def _tan(self, v, t, out):
        return self.c * t[0]


class Mul(Node):
    """Product where at least one factor is scalar-valued."""

    def __init__(self, a, b):
        super().__init__()
        if not (a.scalar or b.scalar):
            raise DomainError("Mul needs a scalar factor; use @ for matrices")
        self.children = (a, b)
        self.scalar = a.scalar and b.scalar
        self._lift = (not a.scalar, not b.scalar)

    def _m(self, a, b):
        # scalar factors gain two trailing axes to broadcast against matrices
        if self._lift[1]:
            a = a[..., None, None]
        if self._lift[0]:
            b = b[..., None, None]
        return a * b

    def _eval(self, v):
        return self._m(v[0], v[1])

    def _tan(self, v, t, out):
        return self._m(t[0], v[1]) + self._m(v[0], t[1])


class MatMul(Node):
    def __init__(self, a, b):
        super().__init__()
        self.children = (a, b)

    def _eval(self, v):
        return v[0] @ v[1]

    def _tan(self, v, t, out):
        return t[0] @ v[1] + v[0] @ t[1]


class Power(Node):
    def __init__(self, a, k: int):
        super().__init__()
        if k < 0:
            raise DomainError("negative powers are not polynomial")
        if not a.scalar:
            raise DomainError("Power is only defined for scalar nodes")
        self.scalar = True
        self.k = k
        self.children = (a,)

    def _eval(self, v):
        return v[0] ** self.k

    def _tan(self, v, t, out):
        if self.k == 0:
            return np.zeros_like(t[0])
        return self.k * v[0] ** (self.k - 1) * t[0]


class Det(Node):
    scalar = True

    def __init__(self, a):
        super().__init__()
        self.children = (a,)

    def _eval(self, v):
        return np.linalg.det(v[0])

    def _tan(self, v, t, out):
        # d det = tr(adj(A) dA)
        return np.einsum("...ij,...ji->...", adjugate(v[0]), t[0])


class Pfaffian(Node):
    scalar = True

    def __init__(self, a):
        super().__init__()
        self.children = (a,)

    def _eval(self, v):
        return pfaffian(v[0])

    def _tan(self, v, t, out):
        return np.einsum("...ij,...ij->...", pfaffian_gradient(v[0]), t[0])


class Affine(Node):
    """value = f(*children) + c for a linear callable f; tangent = f(*tangents)."""

    def __init__(self, f: Callable, *children, const=None, scalar=False):
        super().__init__()
        self.scalar = scalar
        self.f = f
        self.c = None if const is None else np.asarray(const, dtype=complex)
        self.children = tuple(children)

    def _eval(self, v):
        out = self.f(*v)
        return out if self.c is None else out + self.c

    def _tan(self, v, t, out):
        return self.f(*t)


def _topo(root: Node) -> list[Node]:
    order, seen, stack = [], set(), [(root, False)]
    while stack:
        node, done = stack.pop()
        if done:
            order.append(node)
            continue
        if node.uid in seen:
            continue
        seen.add(node.uid)
        stack.append((node, True))
        for ch in node.children:
            if ch.uid not in seen:
                stack.append((ch, False))
    return order


class PolyMap:
    """Polynomial p(x, y) with values in C ("scalar") or in n- ("minus")."""

    def __init__(self, root: Node, codomain: str = "scalar", y_only: bool = True):
        if codomain not in ("scalar", "minus"):
            raise DomainError(f"unknown codomain {codomain}")
        self.root = root
        self.codomain = codomain
        self.y_only = y_only
        self._order = _topo(root)

    def _run(self, x, y, dx=None, dy=None):
        x = np.asarray(x, dtype=complex)
        y = np.asarray(y, dtype=complex)
        batch = x.shape[0]
        want_tan = dx is not None
        if want_tan:
            dx = np.asarray(dx, dtype=complex)
            dy = np.asarray(dy, dtype=complex)
        val_of: dict[int, np.ndarray] = {}
        tan_of: dict[int, np.ndarray] = {}
        batched: set[int] = set()
        for node in self._order:
            if isinstance(node, VarX):
                val_of[node.uid], batched_now = x, True
                if want_tan:
                    tan_of[node.uid] = dx
            elif isinstance(node, VarY):
                val_of[node.uid], batched_now = y, True
                if want_tan:
                    tan_of[node.uid] = dy
            else:
                cv = [val_of[c.uid] for c in node.children]
                batched_now = any(c.uid in batched for c in node.children)
                val_of[node.uid] = node._eval(cv)
                if want_tan:
                    tan_of[node.uid] = node._tan(cv, [tan_of[c.uid] for c in node.children], None)
            if batched_now:
                batched.add(node.uid)
        rid = self.root.uid
        out = val_of[rid]
        if rid not in batched:
            out = np.broadcast_to(out, (batch,) + out.shape)
        if not want_tan:
            return np.array(out)
        return np.array(out), np.array(np.broadcast_to(tan_of[rid], out.shape))

    def __call__(self, x, y):
        return self._run(x, y)

    def jvp(self, x, y, dx, dy):
        """Value and directional derivative along (dx, dy)."""
        return self._run(x, y, dx, dy)

    def __mul__(self, other: "PolyMap") -> "PolyMap":
        codomain = "minus" if "minus" in (self.codomain, other.codomain) else "scalar"
        return PolyMap(Mul(self.root, other.root), codomain, self.y_only and other.y_only)

    def tensor(self, vec) -> "PolyMap":
        """p (x) v for a scalar polynomial p and a fixed fiber vector v in n-."""
        return PolyMap(Mul(self.root, Const(vec)), "minus", self.y_only)
