"""Named invariant checks for the `verify` command, grouped by module.

Each check returns a `Check` with the measured residual and its tolerance.
Everything is seeded, so reports are reproducible bit for bit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bundles import cotangent_bundle, line_bundle
from .decomp import (
    L2Status,
    borel_weil,
    cotangent_multiplicity,
    highest_weight_polynomial,
    line_bundle_spectrum,
    minor_l2_condition,
    schlichtkrull_params,
    spectrum_support,
)
from .errors import NearholError, UnsupportedError
from .integrals import (
    CONVERGENT,
    DIVERGENT,
    MC_DEFAULT,
    QuadratureSpec,
    monte_carlo_mass,
    norm_probe,
    selberg_bound,
    selberg_closed_form,
    selberg_quadrature,
)
from .jordan.model import MatrixModel, _H
from .jordan.polymap import Const, PolyMap
from .jordan.sections import kahler_ratio, verify_qmap_identities
from .rootdata import RootSystemData, structure_constants
from .weights import partitions, verify_weight_inequalities

SUITES = ("jordan", "integrals", "decomp")


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    residual: float
    tolerance: float
    passed: bool
    detail: str = ""


def _check(suite, name, residual, tol, detail=""):
    residual = float(residual)
    return Check(suite, name, residual, tol, bool(residual <= tol), detail)


def _rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    num = np.abs(a - b).reshape(len(a), -1).max(axis=1)
    den = np.maximum(1.0, np.abs(b).reshape(len(b), -1).max(axis=1))
    return float(np.max(num / den))


def _require_model(data: RootSystemData) -> MatrixModel:
    if not data.htype.classical:
        raise UnsupportedError(f"no matrix model for {data.htype}; numeric suites need types I-III")
    return MatrixModel(data.htype)


# -- jordan ------------------------------------------------------------------


def jordan_suite(data: RootSystemData, seed: int = 0, samples: int = 200) -> list[Check]:
    model = _require_model(data)
    rng = np.random.default_rng(seed)
    S = "jordan"
    out = []

    x = model.random_plus(rng, samples, 0.5)
    y = model.random_minus(rng, samples, 0.5)
    detB = np.linalg.det(model.bergman(x, y))
    out.append(_check(S, "det_bergman_genus", _rel(detB, model.delta(x, y) ** model.g), 1e-8))

    w = model.random_minus(rng, samples, 0.5)
    lhs = model.quadratic(model.quadratic(x, y), w)
    rhs = model.quadratic(x, model.quadratic(y, model.quadratic(x, w)))
    out.append(_check(S, "fundamental_identity", _rel(lhs, rhs), 1e-8))

    z = model.random_plus(rng, samples, 1.0)
    (A, B), t = model.polar_decompose(z)
    out.append(_check(S, "polar_reconstruction", _rel(A @ model.z_t(t) @ B, z), 1e-8))
    delta = np.real(model.delta(z, -_H(z)))
    out.append(_check(S, "delta_polar", _rel(delta, np.prod(1 + t**2, axis=-1)), 1e-8))

    ev = np.linalg.eigvalsh(model.bergman(z, -_H(z)))
    out.append(_check(S, "bergman_positive", max(0.0, -float(ev.min())), 0.0,
                      f"min eigenvalue {float(ev.min()):.6g}"))

    k = model.random_k(rng, samples)
    out.append(_check(S, "qmap_equivariance",
                      _rel(model.qmap(model.k_plus(k, z)), model.k_minus(k, model.qmap(z))), 1e-9))
    out.append(_check(S, "quasi_inverse", _rel(model.quasi_inverse(_H(z), -z), model.qmap(z)), 1e-8))

    nq = min(samples, 50)
    zq = model.random_plus(rng, nq, 0.5)
    v = model.random_plus(rng, nq, 1.0)
    wq = model.random_minus(rng, nq, 1.0)
    res = max(verify_qmap_identities(model, zq[i], v[i], model.random_l(rng), wq[i]) for i in range(nq))
    out.append(_check(S, "qmap_identities", res, 1e-6))

    # two-sided Bergman bound for unit fiber vectors
    log_d = model.log_delta_conj(z)
    worst = 0.0
    for bundle in (line_bundle(2, data), line_bundle(-1, data), cotangent_bundle(data)):
        lo, hi = -bundle.mu_h_gamma1 * log_d, -bundle.mu_h_alpha1 * log_d
        if bundle.kind == "line":
            val = np.log(np.abs(model.bergman_bundle_action(bundle, z, np.ones(samples))) ** 2)
        else:
            vec = model.random_minus(rng, samples, 1.0)
            vec = vec / np.sqrt(np.real(model.inner(vec, vec)))[:, None, None]
            val = model.cotangent_log_norm_sq(z, vec)
        worst = max(worst, float(np.max(lo - val)), float(np.max(val - hi)))
    out.append(_check(S, "bergman_bundle_bound", max(worst, 0.0), 1e-10))

    ratio = kahler_ratio(model, zq, v)
    ref = ratio[0]
    out.append(_check(S, "kahler_ratio_constant", float(np.max(np.abs(ratio - ref))) / abs(ref), 1e-6,
                      f"ratio {ref.real:.6f}"))
    return out


# -- integrals ---------------------------------------------------------------


def integrals_suite(data: RootSystemData, seed: int = 0, spec: QuadratureSpec | None = None) -> list[Check]:
    S = "integrals"
    spec = spec or QuadratureSpec(seed=seed)
    consts = structure_constants(data)
    r, a, b = consts[:3]
    out = []

    # closed form against quadrature at a few exponents
    if r <= 2:
        worst = 0.0
        for alpha, beta in ((1.0, 1.0), (2.0, 3.0), (b + 1.0, 2.0)):
            exact = selberg_closed_form(r, alpha, beta, a / 2)
            quad = selberg_quadrature(r, alpha, beta, a / 2, spec)
            worst = max(worst, abs(quad.value - exact) / exact)
        out.append(_check(S, "selberg_closed_vs_quadrature", worst, 1e-6))

    bad = 0
    for k in range(-2, 3):
        bundle = line_bundle(k, data)
        for m in partitions(r, 3):
            finite = selberg_bound(m, bundle, consts).classification == CONVERGENT
            bad += finite != minor_l2_condition(m, bundle)
    cot = cotangent_bundle(data)
    for m in partitions(r, 3):
        finite = selberg_bound(m, cot, consts).classification == CONVERGENT
        bad += finite != minor_l2_condition(m, cot)
    out.append(_check(S, "selberg_minor_equivalence", bad, 0))

    if not data.htype.classical:
        return out
    model = MatrixModel(data.htype)
    trivial = line_bundle(0, data)
    one = PolyMap(Const(1.0))
    if model.r > 2:
        # no radial ladder beyond rank 2; the Monte Carlo ladder is the primary estimate
        mc = monte_carlo_mass(model, trivial, one, QuadratureSpec(
            scheme="mc", radii=MC_DEFAULT.radii, tol=1e-3, samples=spec.samples, seed=seed))
        out.append(_check(S, "trivial_mass_convergent", 0 if mc.classification == CONVERGENT else 1, 0,
                          f"mass {mc.value:.6g} +- {mc.stderr:.2g}"))
        return out
    rad = norm_probe(model, trivial, one, spec)
    out.append(_check(S, "trivial_mass_convergent", 0 if rad.classification == CONVERGENT else 1, 0,
                      f"mass {rad.value:.9g}"))
    if str(data.htype) == "I:1,1":
        out.append(_check(S, "cp1_pi_baseline", abs(rad.value - math.pi), 1e-3))
    mc = monte_carlo_mass(model, trivial, one, QuadratureSpec(
        scheme="mc", radii=(4, 16, 64, 256, 1024), tol=1e-3, samples=20000, seed=seed))
    z = abs(mc.value - rad.value) / max(mc.stderr, 1e-300)
    out.append(_check(S, "radial_vs_mc", z, 4.0, f"mc {mc.value:.6g} +- {mc.stderr:.2g}"))

    if r == 1:
        bad = 0
        for m in partitions(1, 3):
            if m[0] == 0:
                continue
            p = highest_weight_polynomial(cot, m, model)
            cls = norm_probe(model, cot, p, spec).classification
            bad += cls != (CONVERGENT if minor_l2_condition(m, cot) else DIVERGENT)
        out.append(_check(S, "cotangent_probe_vs_minor", bad, 0))
    return out


# -- decomp ------------------------------------------------------------------


def decomp_suite(data: RootSystemData, cutoff: int = 3) -> list[Check]:
    S = "decomp"
    h = data.htype
    out = []
    got = structure_constants(data)
    want = (h.r, h.a, h.b, h.g, h.n)
    out.append(_check(S, "structure_constants", 0 if got == want else 1, 0, f"{got}"))

    bad = sum(not verify_weight_inequalities(bd.mu, data)
              for bd in (line_bundle(1, data), line_bundle(-2, data), cotangent_bundle(data)))
    out.append(_check(S, "weight_inequalities", bad, 0))

    bad = sum(borel_weil(line_bundle(k, data)) != (k >= 0) for k in range(-3, 4))
    out.append(_check(S, "borel_weil_line", bad, 0))

    bad = 0
    for k in range(-2, 3):
        table = line_bundle_spectrum(k, cutoff, data)
        ws = table.weights()
        bad += len(ws) != len(set(ws))
        for e in table.entries:
            try:
                schlichtkrull_params(e.weight, k, data)
            except (NearholError, ArithmeticError):
                bad += 1
            want_status = L2Status.IN_L2 if minor_l2_condition(e.origin[0], table.bundle) else L2Status.NOT_IN_L2
            bad += e.l2_status != want_status
    out.append(_check(S, "line_spectrum_schlichtkrull", bad, 0))

    cot = cotangent_bundle(data)
    table = spectrum_support(cot, cutoff, data)
    bad = sum(e.multiplicity != cotangent_multiplicity(e.weight, cutoff, data) for e in table.entries)
    out.append(_check(S, "cotangent_multiplicities", bad, 0, f"{len(table.entries)} K-types"))
    return out


def available_suites(data: RootSystemData) -> tuple[str, ...]:
    """Suites that apply to this space: the jordan suite needs a matrix model."""
    return SUITES if data.htype.classical else ("integrals", "decomp")


def run_suites(data: RootSystemData, suites, seed: int = 0, spec: QuadratureSpec | None = None,
               cutoff: int = 3) -> list[Check]:
    out = []
    for s in suites:
        if s == "jordan":
            out += jordan_suite(data, seed)
        elif s == "integrals":
            out += integrals_suite(data, seed, spec)
        elif s == "decomp":
            out += decomp_suite(data, cutoff)
        else:
            raise UnsupportedError(f"unknown suite {s!r}")
    return out
