"""Exact weight arithmetic: dominance, signatures, Freudenthal weight systems."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

from .errors import DomainError
from .rootdata import RootSystemData, Vector, dot, vadd, vscale, vsub


@dataclass(frozen=True, order=True)
class Weight:
    """Element of h* in the epsilon-basis, exact rational coordinates."""

    coords: Vector

    def __init__(self, coords):
        object.__setattr__(self, "coords", tuple(Fraction(c) for c in coords))

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __add__(self, other):
        return Weight(vadd(self.coords, tuple(other)))

    def __sub__(self, other):
        return Weight(vsub(self.coords, tuple(other)))

    def __neg__(self):
        return Weight(vscale(-1, self.coords))

    def __mul__(self, c):
        return Weight(vscale(c, self.coords))

    __rmul__ = __mul__

    def __repr__(self):
        return "Weight(" + ", ".join(str(c) for c in self.coords) + ")"

    @classmethod
    def zero(cls, dim: int) -> "Weight":
        return cls((0,) * dim)


class Partition(tuple):
    """Signature m = (m_1 >= ... >= m_r >= 0)."""

    def __new__(cls, parts: Sequence[int]):
        parts = tuple(int(x) for x in parts)
        if any(x < 0 for x in parts) or any(a < b for a, b in zip(parts, parts[1:])):
            raise DomainError(f"{parts} is not a weakly decreasing sequence of naturals")
        return super().__new__(cls, parts)

    @property
    def size(self) -> int:
        return sum(self)

    def __repr__(self):
        return f"Partition({tuple(self)})"


def partitions(r: int, max_total: int) -> Iterator[Partition]:
    """All m in N^r_>= with |m| <= max_total, graded lexicographic order."""
    def rec(k, cap, rest):
        if k == 0:
            yield ()
            return
        for first in range(0, min(cap, rest) + 1):
            for tail in rec(k - 1, first, rest - first):
                yield (first,) + tail

    for total in range(max_total + 1):
        block = [p for p in rec(r, total, total) if sum(p) == total]
        for p in sorted(block):
            yield Partition(p)


def check_lattice(lam: Sequence, data: RootSystemData) -> None:
    """Raise DomainError unless lambda(H_alpha) is an integer for every root."""
    for alpha in data.positive_roots:
        if data.pairing(lam, alpha).denominator != 1:
            raise DomainError(f"{lam} pairs non-integrally with root {alpha}")


def is_dominant_U(lam: Sequence, data: RootSystemData) -> bool:
    return all(data.pairing(lam, a) >= 0 for a in data.simple_roots)


def is_dominant_K(lam: Sequence, data: RootSystemData) -> bool:
    if data.pairing(lam, data.alpha1).denominator != 1:
        return False
    return all(
        (p := data.pairing(lam, a)) >= 0 and p.denominator == 1 for a in data.compact_simple
    )


def gamma_weight(m: Sequence[int], data: RootSystemData) -> Weight:
    """gamma_m = sum_i m_i gamma_i."""
    m = Partition(m)
    if len(m) != data.rank:
        raise DomainError(f"signature of length {len(m)} for rank {data.rank}")
    out = Weight.zero(data.dim)
    for mi, g in zip(m, data.strongly_orthogonal):
        out = out + vscale(mi, g)
    return out


def gamma_coordinates(lam: Sequence, data: RootSystemData) -> Partition | None:
    """Return m with lam == gamma_m, or None if lam is not in Gamma."""
    gam = data.strongly_orthogonal
    m = [data.pairing(lam, g) / 2 for g in gam]
    if any(x.denominator != 1 for x in m):
        return None
    mm = [int(x) for x in m]
    if any(x < 0 for x in mm) or any(a < b for a, b in zip(mm, mm[1:])):
        return None
    if gamma_weight(mm, data).coords != tuple(lam):
        return None
    return Partition(mm)


@dataclass(frozen=True)
class WeightMultiset:
    """Weights of an irreducible K-module with their multiplicities."""

    highest: Weight
    entries: dict

    @property
    def dim(self) -> int:
        return sum(self.entries.values())

    def __iter__(self):
        return iter(self.entries.items())

    def __len__(self):
        return len(self.entries)

    def __contains__(self, w):
        return Weight(w) in self.entries

    def multiplicity(self, w) -> int:
        return self.entries.get(Weight(w), 0)


def weyl_dimension_K(mu: Sequence, data: RootSystemData) -> int:
    """Weyl dimension formula over the compact positive roots."""
    rho = data.rho_c
    shifted = vadd(tuple(mu), rho)
    num = Fraction(1)
    for a in data.compact_positive:
        num *= dot(shifted, a) / dot(rho, a)
    if num.denominator != 1:
        raise DomainError(f"non-integral Weyl dimension for {mu}")
    return int(num)


def weight_system(mu: Sequence, data: RootSystemData) -> WeightMultiset:
    """Freudenthal recursion over Phi_c for the irreducible K-module E_mu."""
    mu = Weight(mu)
    if not is_dominant_K(mu, data):
        raise DomainError(f"{mu} is not K-dominant")
    return _weight_system(mu, data)


@lru_cache(maxsize=256)
def _weight_system(mu: Weight, data: RootSystemData) -> WeightMultiset:
    rho = data.rho_c
    pos = data.compact_positive
    simple = data.compact_simple
    top = vadd(mu.coords, rho)
    top_norm = dot(top, top)
    mult: dict[Vector, int] = {mu.coords: 1}
    layer = [mu.coords]
    while layer:
        candidates = sorted({vsub(w, a) for w in layer for a in simple})
        nxt = []
        for lam in candidates:
            if lam in mult:
                continue
            shifted = vadd(lam, rho)
            denom = top_norm - dot(shifted, shifted)
            if denom == 0:
                continue
            acc = Fraction(0)
            for a in pos:
                k = 1
                while True:
                    up = vadd(lam, vscale(k, a))
                    c = mult.get(up)
                    if c is None:
                        break
                    acc += c * dot(up, a)
                    k += 1
            val = 2 * acc / denom
            if val.denominator != 1:
                raise ArithmeticError(f"non-integral Freudenthal multiplicity at {lam}")
            if val > 0:
                mult[lam] = int(val)
                nxt.append(lam)
        layer = nxt
    out = WeightMultiset(mu, {Weight(w): c for w, c in sorted(mult.items())})
    if out.dim != weyl_dimension_K(mu, data):
        raise ArithmeticError(f"Freudenthal dimension {out.dim} != Weyl dimension for {mu}")
    return out


def verify_weight_inequalities(mu: Sequence, data: RootSystemData) -> bool:
    """Check mu(H_{alpha_1}) <= lambda(H_{gamma_i}) <= mu(H_{gamma_1}) over all weights of E_mu."""
    ws = weight_system(mu, data)
    lo = data.pairing(mu, data.alpha1)
    hi = data.pairing(mu, data.strongly_orthogonal[0])
    return all(
        lo <= data.pairing(lam, g) <= hi
        for lam, _ in ws
        for g in data.strongly_orthogonal
    )


def fundamental_weight(data: RootSystemData) -> Weight:
    return Weight(data.fundamental_weight)


def central_character(mu: Sequence, data: RootSystemData) -> Fraction:
    """nu with rho(exp(s Z_0)) = exp(nu s) on E_mu; Z_0 acts by the scalar mu(Z_0)."""
    return dot(tuple(mu), data.grading_element)
