"""Irreducible homogeneous bundles, described by the K-highest weight of the fiber."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DomainError, ParameterError
from .rootdata import RootSystemData
from .weights import Weight, central_character, check_lattice, fundamental_weight, is_dominant_K

LINE = "line"
COTANGENT = "cotangent"
GENERAL = "general"


@dataclass(frozen=True)
class BundleSpec:
    """Fiber E with Phi_c^+-highest weight `mu`.

    `mu_h_alpha1` is mu(H_{alpha_1}) and `nu` the central character
    (Z_0 acts on E by nu). For line bundles nu = k n / g.
    """

    kind: str
    mu: Weight
    mu_h_alpha1: int
    mu_h_gamma1: int
    nu: Fraction
    k: int | None = None

    def __str__(self):
        if self.kind == LINE:
            return f"line:{self.k}"
        if self.kind == COTANGENT:
            return "cotangent"
        return "mu:" + ",".join(str(c) for c in self.mu)


def _make(kind, mu, data, k=None) -> BundleSpec:
    mu = Weight(mu)
    if len(mu) != data.dim:
        raise DomainError(f"weight has {len(mu)} coordinates, expected {data.dim}")
    check_lattice(mu, data)
    if not is_dominant_K(mu, data):
        raise DomainError(f"{mu} is not K-dominant")
    return BundleSpec(
        kind,
        mu,
        int(data.pairing(mu, data.alpha1)),
        int(data.pairing(mu, data.strongly_orthogonal[0])),
        central_character(mu, data),
        k,
    )


def line_bundle(k: int, data: RootSystemData) -> BundleSpec:
    return _make(LINE, fundamental_weight(data) * k, data, k=int(k))


def cotangent_bundle(data: RootSystemData) -> BundleSpec:
    return _make(COTANGENT, -Weight(data.alpha1), data)


def irreducible_bundle(mu: Sequence, data: RootSystemData) -> BundleSpec:
    return _make(GENERAL, mu, data)


def parse_bundle(text: str, data: RootSystemData) -> BundleSpec:
    """Parse ``line:k``, ``cotangent`` or ``mu:c1,c2,...`` (rationals like ``1/2`` allowed)."""
    text = text.strip()
    head, _, rest = text.partition(":")
    try:
        if head == "line":
            return line_bundle(int(rest), data)
        if head == "cotangent" and not rest:
            return cotangent_bundle(data)
        if head == "mu":
            return irreducible_bundle([Fraction(x) for x in rest.split(",")], data)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParameterError(f"cannot parse bundle {text!r}: {exc}") from None
    raise ParameterError(f"cannot parse bundle {text!r}")
