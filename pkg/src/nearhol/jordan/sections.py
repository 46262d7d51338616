"""Local nearly holomorphic sections f_p(z) = p(z, q(z)) and the action of u_C on them."""
from __future__ import annotations

import numpy as np
from numpy.polynomial import chebyshev

from ..bundles import COTANGENT, LINE, BundleSpec
from ..errors import BudgetError, DomainError, UnsupportedError
from .model import MatrixModel, _H
from .polymap import PolyMap

FD_STEP = 1e-3


def _dir(f, z, u, h):
    """Real directional derivative of f at z along u, fourth-order central stencil."""
    return (8 * (f(z + h * u) - f(z - h * u)) - (f(z + 2 * h * u) - f(z - 2 * h * u))) / (12 * h)


def eval_section(model: MatrixModel, p: PolyMap, z) -> np.ndarray:
    z = np.asarray(z, complex)
    return p(z, model.qmap(z))


def d_holo(f, z, v, h=FD_STEP):
    """Holomorphic Wirtinger derivative of f at z along v in n+, by central differences."""
    return 0.5 * (_dir(f, z, v, h) - 1j * _dir(f, z, 1j * v, h))


def d_antiholo(f, z, w, h=FD_STEP):
    """Antiholomorphic derivative along w in n- (the tangent direction u = w^H in n+)."""
    u = _H(w)
    return 0.5 * (_dir(f, z, u, h) + 1j * _dir(f, z, 1j * u, h))


def qmap_residuals(model: MatrixModel, z, v, T, w, h=FD_STEP):
    """The three q-map identity residuals (holomorphic v, Lie algebra T, antiholomorphic w)."""
    z = np.asarray(z, complex)
    q = model.qmap
    qz = q(z)
    zb = _H(z)
    r1 = -d_holo(q, z, v, h) - d_antiholo(q, z, model.quadratic(zb, v), h)
    r2 = (
        -d_holo(q, z, model.on_plus(T, z), h)
        - d_antiholo(q, z, model.on_minus(T, zb), h)
        + model.on_minus(T, qz)
    )
    r3 = (
        -d_holo(q, z, model.quadratic(z, w), h)
        - d_antiholo(q, z, w, h)
        + w
        - model.triple(qz, z, w)
    )
    return r1, r2, r3


def verify_qmap_identities(model: MatrixModel, z, v, T, w, h=FD_STEP) -> float:
    """Max residual norm of the q-map identities over the batch."""
    res = qmap_residuals(model, z, v, T, w, h)
    return float(max(np.max(np.linalg.norm(r, axis=(-2, -1))) for r in res))


def _drho(bundle: BundleSpec, model: MatrixModel, T, value):
    if bundle.kind == LINE:
        c = np.asarray(float(bundle.nu) / model.n * model.trace_plus(T))
        if np.ndim(value) >= 3 and c.ndim == 1:
            c = c[:, None, None]
        return c * value
    if bundle.kind == COTANGENT:
        return model.on_minus(T, value)
    raise UnsupportedError(f"d rho is implemented for line and cotangent bundles, not {bundle}")


def uC_action(model: MatrixModel, bundle: BundleSpec, generator, p: PolyMap, z):
    """Evaluate d pi_C(X) f_p at z for X = ("v", v in n+), ("T", (A, D) in l) or ("w", w in n-)."""
    kind, X = generator
    z = np.asarray(z, complex)
    qz = model.qmap(z)
    zeros_m = np.zeros_like(qz)
    if kind == "v":
        _, t = p.jvp(z, qz, np.broadcast_to(X, z.shape), zeros_m)
        return -t
    if kind == "T":
        val, t = p.jvp(z, qz, model.on_plus(X, z), model.on_minus(X, qz))
        return -t + _drho(bundle, model, X, val)
    if kind == "w":
        w = np.broadcast_to(X, qz.shape)
        val, t = p.jvp(z, qz, model.quadratic(z, w), w - model.triple(qz, z, w))
        return -t + _drho(bundle, model, model.dop_element(z, w), val)
    raise DomainError(f"unknown generator kind {kind!r}")


def diagonal_degrees(model: MatrixModel, p: PolyMap, budget: int = 24, seed: int = 7) -> list[int]:
    """deg_{t_i} of t -> p(x0, sum t_j bar e_j), by Chebyshev interpolation in one variable at a time.

    The other t_j are held at generic values; detectable degrees are < budget.
    """
    rng = np.random.default_rng(seed)
    r = model.r
    generic = 0.5 + rng.random(r) + 0.3j * rng.random(r)
    x0 = model.random_plus(rng, 1, 0.5) if not p.y_only else np.zeros((1,) + model.plus_shape, complex)
    nodes = np.cos(np.pi * (np.arange(budget + 1) + 0.5) / (budget + 1))
    degs = []
    for i in range(r):
        t = np.tile(generic, (budget + 1, 1))
        t[:, i] = nodes
        y = np.einsum("bi,ijk->bjk", t, _H(model.frame))
        x = np.broadcast_to(x0, (budget + 1,) + model.plus_shape)
        vals = np.asarray(p(x, y)).reshape(budget + 1, -1)
        coef = np.array([chebyshev.chebfit(nodes, vals[:, c], budget) for c in range(vals.shape[1])])
        mag = np.max(np.abs(coef), axis=0)
        scale = max(mag.max(), 1e-300)
        nz = np.nonzero(mag > 1e-9 * scale)[0]
        if mag.max() == 0 or len(nz) == 0:
            degs.append(0)
            continue
        d = int(nz[-1])
        if d >= budget:
            raise BudgetError(f"degree in t_{i + 1} reaches the interpolation budget {budget}")
        degs.append(d)
    return degs


def kahler_ratio(model: MatrixModel, z, v, h=FD_STEP):
    """dPsi(z)(v) / tr(v q(z)): the trace-form normalization of -kappa, constant per family."""
    dpsi = d_holo(model.kahler_potential, z, v, h)
    pair = np.einsum("...ij,...ji->...", v, model.qmap(z))
    return dpsi / pair
