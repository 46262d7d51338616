"""Exact root data of irreducible compact Hermitian symmetric spaces.

Every family is realized in an orthogonal epsilon-basis with exact rational
coordinates:

    I(p,q)   A_{p+q-1} in R^{p+q}, noncompact node e_p - e_{p+1}
    II(n)    D_n in R^n,            noncompact node e_{n-1} + e_n
    III(n)   C_n in R^n,            noncompact node 2 e_n
    IV(n)    B_m (n odd) or D_m (n even) in R^m, noncompact node e_1 - e_2
    EIII     E_6 inside E_8 coordinates (Bourbaki node 1), from data/e6.json
    EVII     E_7 inside E_8 coordinates (Bourbaki node 7), from data/e7.json

The noncompact simple root is always moved to index 0; the compact simple
roots follow in Bourbaki order. Root coefficient vectors are therefore
expressed in the basis (alpha_1, ..., alpha_l) with alpha_1 noncompact, and
the lexicographic order on these vectors is the order used to pick the
strongly orthogonal roots.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from importlib import resources
from typing import Iterable, Sequence

from .errors import IntegrityError, ParameterError

Vector = tuple[Fraction, ...]

_FAMILIES = ("I", "II", "III", "IV", "EIII", "EVII")


@dataclass(frozen=True)
class HermitianType:
    """Label of an irreducible compact Hermitian symmetric space.

    The structure constants below are the closed-form values per family;
    `structure_constants` recomputes them from the root data.
    """

    family: str
    params: tuple[int, ...] = ()

    def __post_init__(self):
        f, ps = self.family, self.params
        if f not in _FAMILIES:
            raise ParameterError(f"unknown family {f!r}")
        if any(not isinstance(x, int) for x in ps):
            raise ParameterError("family parameters must be integers")
        expected = {"I": 2, "II": 1, "III": 1, "IV": 1, "EIII": 0, "EVII": 0}[f]
        if len(ps) != expected:
            raise ParameterError(f"family {f} takes {expected} parameter(s), got {len(ps)}")
        if f == "I" and min(ps) < 1:
            raise ParameterError("TypeI(p,q) needs p, q >= 1")
        if f == "II" and ps[0] < 3:
            raise ParameterError("TypeII(n) needs n >= 3")
        if f == "III" and ps[0] < 1:
            raise ParameterError("TypeIII(n) needs n >= 1")
        if f == "IV" and ps[0] < 3:
            raise ParameterError("TypeIV(n) needs n >= 3")

    @classmethod
    def parse(cls, text: str) -> "HermitianType":
        """Parse selectors such as ``"I:2,3"``, ``"III:3"`` or ``"EVII"``."""
        text = text.strip()
        fam, _, rest = text.partition(":")
        fam = fam.strip().upper()
        try:
            params = tuple(int(x) for x in rest.split(",")) if rest.strip() else ()
        except ValueError:
            raise ParameterError(f"cannot parse space selector {text!r}") from None
        return cls(fam, params)

    def __str__(self):
        if self.params:
            return f"{self.family}:{','.join(map(str, self.params))}"
        return self.family

    @property
    def classical(self) -> bool:
        return self.family in ("I", "II", "III")

    @cached_property
    def _constants(self) -> tuple[int, int, int, int, int]:
        f, ps = self.family, self.params
        if f == "I":
            p, q = ps
            r, a, b, n = min(p, q), 2, abs(p - q), p * q
        elif f == "II":
            m = ps[0]
            r, a, b, n = m // 2, 4, 2 * (m % 2), m * (m - 1) // 2
        elif f == "III":
            m = ps[0]
            r, a, b, n = m, 1, 0, m * (m + 1) // 2
        elif f == "IV":
            m = ps[0]
            r, a, b, n = 2, m - 2, 0, m
        elif f == "EIII":
            r, a, b, n = 2, 6, 4, 16
        else:
            r, a, b, n = 3, 8, 0, 27
        if r == 1:
            a = 0
        return r, a, b, 2 + a * (r - 1) + b, n

    @property
    def r(self) -> int:
        return self._constants[0]

    @property
    def a(self) -> int:
        return self._constants[1]

    @property
    def b(self) -> int:
        return self._constants[2]

    @property
    def g(self) -> int:
        return self._constants[3]

    @property
    def n(self) -> int:
        return self._constants[4]

    @property
    def tube_type(self) -> bool:
        return self.b == 0


def TypeI(p: int, q: int) -> HermitianType:
    return HermitianType("I", (p, q))


def TypeII(n: int) -> HermitianType:
    return HermitianType("II", (n,))


def TypeIII(n: int) -> HermitianType:
    return HermitianType("III", (n,))


def TypeIV(n: int) -> HermitianType:
    return HermitianType("IV", (n,))


def TypeEIII() -> HermitianType:
    return HermitianType("EIII")


def TypeEVII() -> HermitianType:
    return HermitianType("EVII")


# -- exact vector helpers ---------------------------------------------------

def vec(xs: Iterable) -> Vector:
    return tuple(Fraction(x) for x in xs)


def dot(x: Sequence, y: Sequence) -> Fraction:
    if len(x) != len(y):
        raise ValueError("dimension mismatch")
    return sum((a * b for a, b in zip(x, y)), Fraction(0))


def vadd(x: Sequence, y: Sequence) -> Vector:
    return tuple(a + b for a, b in zip(x, y))


def vsub(x: Sequence, y: Sequence) -> Vector:
    return tuple(a - b for a, b in zip(x, y))


def vscale(c, x: Sequence) -> Vector:
    c = Fraction(c)
    return tuple(c * a for a in x)


def coroot_pairing(lam: Sequence, alpha: Sequence) -> Fraction:
    """lambda(H_alpha) = 2 (lambda, alpha) / (alpha, alpha)."""
    return 2 * dot(lam, alpha) / dot(alpha, alpha)


def reflect(v: Sequence, alpha: Sequence) -> Vector:
    return vsub(v, vscale(coroot_pairing(v, alpha), alpha))


def _unit(dim: int, i: int, s: int = 1) -> list[Fraction]:
    v = [Fraction(0)] * dim
    v[i] = Fraction(s)
    return v


def _e(dim: int, *terms: tuple[int, int]) -> Vector:
    v = [Fraction(0)] * dim
    for i, s in terms:
        v[i] += s
    return tuple(v)


def _bourbaki_simple_roots(htype: HermitianType) -> tuple[list[Vector], int]:
    """Simple roots in Bourbaki order and the index of the noncompact node."""
    f, ps = htype.family, htype.params
    if f == "I":
        p, q = ps
        d = p + q
        return [_e(d, (i, 1), (i + 1, -1)) for i in range(d - 1)], p - 1
    if f == "II":
        n = ps[0]
        simple = [_e(n, (i, 1), (i + 1, -1)) for i in range(n - 1)]
        simple.append(_e(n, (n - 2, 1), (n - 1, 1)))
        return simple, n - 1
    if f == "III":
        n = ps[0]
        simple = [_e(n, (i, 1), (i + 1, -1)) for i in range(n - 1)]
        simple.append(_e(n, (n - 1, 2)))
        return simple, n - 1
    if f == "IV":
        n = ps[0]
        if n % 2 == 0:
            m = (n + 2) // 2
            simple = [_e(m, (i, 1), (i + 1, -1)) for i in range(m - 1)]
            simple.append(_e(m, (m - 2, 1), (m - 1, 1)))
        else:
            m = (n + 1) // 2
            simple = [_e(m, (i, 1), (i + 1, -1)) for i in range(m - 1)]
            simple.append(_e(m, (m - 1, 1)))
        return simple, 0
    table = load_exceptional_table(f)
    return [vec(Fraction(x) for x in row) for row in table["simple_roots"]], table["noncompact_index"]


def load_exceptional_table(family: str) -> dict:
    """Load the shipped JSON table for ``EIII`` or ``EVII``.

    Schema: ``{schema, family, ambient_dim, labels, simple_roots: [[str rational]],
    noncompact_index, structure: {r, a, b, g, n}}``.
    """
    name = {"EIII": "e6.json", "EVII": "e7.json"}[family]
    with resources.files("nearhol.data").joinpath(name).open("r", encoding="utf-8") as fh:
        table = json.load(fh)
    if table.get("family") != family or table.get("schema") != 1:
        raise IntegrityError(f"malformed root table {name}")
    return table


def _positive_root_coefficients(simple: Sequence[Vector]) -> list[tuple[int, ...]]:
    """All positive roots as coefficient vectors, grown height by height via root strings."""
    ell = len(simple)
    cartan = [[int(coroot_pairing(simple[i], simple[j])) for j in range(ell)] for i in range(ell)]
    units = [tuple(int(i == j) for j in range(ell)) for i in range(ell)]
    found = set(units)
    ordered = list(units)
    layer = list(units)
    while layer:
        nxt = []
        for c in layer:
            for j in range(ell):
                # p = largest k with c - k*alpha_j a root
                p = 0
                while True:
                    down = tuple(x - (p + 1) * (i == j) for i, x in enumerate(c))
                    if down in found:
                        p += 1
                    else:
                        break
                pairing = sum(c[i] * cartan[i][j] for i in range(ell))
                if p - pairing > 0:
                    up = tuple(x + (i == j) for i, x in enumerate(c))
                    if up not in found:
                        found.add(up)
                        nxt.append(up)
                        ordered.append(up)
        layer = nxt
    return ordered


@dataclass(frozen=True, eq=False)
class RootSystemData:
    """Root system of (g, h) with its compact/noncompact split.

    Index 0 of `simple_roots` is the distinguished noncompact simple root
    alpha_1. All coordinates are exact.
    """

    htype: HermitianType
    simple_roots: tuple[Vector, ...]
    positive_roots: tuple[Vector, ...]
    positive_coefficients: tuple[tuple[int, ...], ...]
    strongly_orthogonal: tuple[Vector, ...] = field(default=())
    distinguished_index: int = 0

    @property
    def rank(self) -> int:
        return len(self.strongly_orthogonal)

    @property
    def dim(self) -> int:
        return len(self.simple_roots[0])

    @property
    def alpha1(self) -> Vector:
        return self.simple_roots[0]

    @cached_property
    def compact_simple(self) -> tuple[Vector, ...]:
        return self.simple_roots[1:]

    @cached_property
    def compact_positive(self) -> tuple[Vector, ...]:
        return tuple(r for r, c in zip(self.positive_roots, self.positive_coefficients) if c[0] == 0)

    @cached_property
    def noncompact_positive(self) -> tuple[Vector, ...]:
        return tuple(r for r, c in zip(self.positive_roots, self.positive_coefficients) if c[0] != 0)

    @cached_property
    def noncompact_negative(self) -> tuple[Vector, ...]:
        return tuple(vscale(-1, r) for r in self.noncompact_positive)

    @cached_property
    def roots(self) -> frozenset[Vector]:
        return frozenset(self.positive_roots) | frozenset(vscale(-1, r) for r in self.positive_roots)

    @cached_property
    def coefficients(self) -> dict[Vector, tuple[int, ...]]:
        return dict(zip(self.positive_roots, self.positive_coefficients))

    def is_root(self, v: Sequence) -> bool:
        return tuple(v) in self.roots

    def pairing(self, lam: Sequence, alpha: Sequence) -> Fraction:
        """lambda(H_alpha)."""
        return coroot_pairing(lam, alpha)

    @cached_property
    def rho_c(self) -> Vector:
        total = tuple(Fraction(0) for _ in range(self.dim))
        for r in self.compact_positive:
            total = vadd(total, r)
        return vscale(Fraction(1, 2), total)

    @cached_property
    def two_rho_nc(self) -> Vector:
        total = tuple(Fraction(0) for _ in range(self.dim))
        for r in self.noncompact_positive:
            total = vadd(total, r)
        return total

    @cached_property
    def grading_element(self) -> Vector:
        """Z_0 as a vector: (alpha, Z_0) is the alpha_1-coefficient of alpha.

        2 rho_nc is orthogonal to every compact root, so Z_0 is proportional to it.
        """
        return vscale(1 / dot(self.alpha1, self.two_rho_nc), self.two_rho_nc)

    @cached_property
    def fundamental_weight(self) -> Vector:
        """lambda_1 with lambda_1(H_{alpha_i}) = delta_{1i}."""
        return vscale(dot(self.alpha1, self.alpha1) / 2, self.grading_element)

    def simple_coefficients(self, v: Sequence) -> tuple[Fraction, ...] | None:
        """Coefficients of a root in the simple basis (None if v is not a root)."""
        v = tuple(v)
        if v in self.coefficients:
            return tuple(Fraction(c) for c in self.coefficients[v])
        neg = vscale(-1, v)
        if neg in self.coefficients:
            return tuple(Fraction(-c) for c in self.coefficients[neg])
        return None

    def apply_word(self, word: Sequence[int], v: Sequence) -> Vector:
        """Apply s_{word[-1]} ... s_{word[0]}: reflections are applied left to right."""
        out = tuple(v)
        for i in word:
            out = reflect(out, self.simple_roots[i])
        return out

    @cached_property
    def compact_longest_word(self) -> tuple[int, ...]:
        """Word for the longest element w_0 of W_c, by exhaustive descent from rho_c."""
        v = self.rho_c
        word: list[int] = []
        while True:
            for i in range(1, len(self.simple_roots)):
                if coroot_pairing(v, self.simple_roots[i]) > 0:
                    v = reflect(v, self.simple_roots[i])
                    word.append(i)
                    break
            else:
                return tuple(word)

    def compact_orbit(self, v: Sequence) -> dict[Vector, tuple[int, ...]]:
        """W_c-orbit of v, each element with a word reaching it (breadth-first)."""
        start = tuple(v)
        words = {start: ()}
        frontier = [start]
        while frontier:
            nxt = []
            for u in frontier:
                for i in range(1, len(self.simple_roots)):
                    w = reflect(u, self.simple_roots[i])
                    if w not in words:
                        words[w] = words[u] + (i,)
                        nxt.append(w)
            frontier = nxt
        return words


def _lex_max(candidates: Iterable[Vector], coeffs: dict[Vector, tuple[int, ...]]) -> Vector | None:
    best = None
    for c in candidates:
        if best is None or coeffs[c] > coeffs[best]:
            best = c
    return best


def strongly_orthogonal(data: RootSystemData) -> tuple[Vector, ...]:
    """Greedy maximal chain gamma_1 > gamma_2 > ... of strongly orthogonal noncompact roots."""
    chosen: list[Vector] = []
    while True:
        cands = [
            b for b in data.noncompact_positive
            if b not in chosen
            and all(not data.is_root(vadd(b, g)) and not data.is_root(vsub(b, g)) for g in chosen)
        ]
        nxt = _lex_max(cands, data.coefficients)
        if nxt is None:
            return tuple(chosen)
        chosen.append(nxt)


def build_root_data(htype: HermitianType) -> RootSystemData:
    """Root data for `htype`; invariants are checked and violations raise IntegrityError."""
    bourbaki, nc = _bourbaki_simple_roots(htype)
    simple = [bourbaki[nc]] + [s for i, s in enumerate(bourbaki) if i != nc]
    coeffs = _positive_root_coefficients(simple)
    dim = len(simple[0])
    roots = []
    for c in coeffs:
        v = tuple(Fraction(0) for _ in range(dim))
        for ci, s in zip(c, simple):
            if ci:
                v = vadd(v, vscale(ci, s))
        roots.append(v)
    if any(c[0] > 1 for c in coeffs):
        raise IntegrityError(f"{htype}: alpha_1 appears with coefficient > 1; not a Hermitian node")
    data = RootSystemData(htype, tuple(simple), tuple(roots), tuple(coeffs))
    gammas = strongly_orthogonal(data)
    object.__setattr__(data, "strongly_orthogonal", gammas)
    _check(data)
    return data


def structure_constants(data: RootSystemData) -> tuple[int, int, int, int, int]:
    """(r, a, b, g, n) recomputed from the Peirce counts of the root data."""
    gam = data.strongly_orthogonal
    r = len(gam)
    n = len(data.noncompact_positive)
    pair = [[data.pairing(b, g) for g in gam] for b in data.noncompact_positive]
    counts = {}
    for i in range(r):
        for j in range(i + 1, r):
            counts[(i, j)] = sum(1 for row in pair if row[i] == 1 and row[j] == 1)
    a_vals = set(counts.values())
    if len(a_vals) > 1:
        raise IntegrityError(f"{data.htype}: Peirce spaces V_ij have unequal dimensions {counts}")
    a = a_vals.pop() if a_vals else 0
    b_vals = {
        sum(1 for row in pair if row[i] == 1 and all(row[j] == 0 for j in range(r) if j != i))
        for i in range(r)
    }
    if len(b_vals) != 1:
        raise IntegrityError(f"{data.htype}: Peirce spaces V_i0 have unequal dimensions")
    b = b_vals.pop()
    g = 2 + a * (r - 1) + b
    if n != r + a * r * (r - 1) // 2 + r * b:
        raise IntegrityError(f"{data.htype}: Peirce counts do not add up to dim n+ = {n}")
    return r, a, b, g, n


def _check(data: RootSystemData) -> None:
    ht = data.htype
    consts = structure_constants(data)
    if consts != (ht.r, ht.a, ht.b, ht.g, ht.n):
        raise IntegrityError(f"{ht}: structure constants {consts} disagree with closed form "
                             f"{(ht.r, ht.a, ht.b, ht.g, ht.n)}")
    gam = data.strongly_orthogonal
    top = max(data.positive_roots, key=lambda v: data.coefficients[v])
    if gam[0] != top:
        raise IntegrityError(f"{ht}: gamma_1 is not the highest root")
    if data.apply_word(data.compact_longest_word, data.alpha1) != gam[0]:
        raise IntegrityError(f"{ht}: gamma_1 != w_0 alpha_1")
    if vscale(ht.g, data.fundamental_weight) != data.two_rho_nc:
        raise IntegrityError(f"{ht}: 2 rho_nc != g lambda_1")
