"""L^2 densities, polar integration with the Selberg weight, and convergence probes.

Radial integrals are taken in the variable u = log(1 + t^2) = -log(1 - s),
s = t^2/(1+t^2), so the s -> 1 endpoint (the point at infinity of n+) becomes
u -> infinity. The integral over [0, R]^r is accumulated over a truncation
ladder of blocks [R_{k-1}, R_k], each integrated with Gauss-Legendre; the ladder
estimates decide Convergent / Divergent / Inconclusive.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import gammaln, logsumexp
from scipy.stats import multivariate_t

from .bundles import COTANGENT, LINE, BundleSpec
from .errors import DomainError, ParameterError, UnsupportedError
from .jordan.model import MatrixModel
from .jordan.polymap import PolyMap
from .weights import Partition

CONVERGENT = "Convergent"
DIVERGENT = "Divergent"
INCONCLUSIVE = "Inconclusive"

MC_CHUNKS = 16


@dataclass(frozen=True)
class QuadratureSpec:
    scheme: str = "radial"
    nodes: int = 16
    radii: tuple = (1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0)
    tol: float = 1e-6
    samples: int = 100_000
    seed: int = 0
    k_samples: int = 32

    def __post_init__(self):
        if self.scheme not in ("radial", "mc"):
            raise ParameterError(f"unknown scheme {self.scheme!r}")
        if self.nodes < 8:
            raise ParameterError("at least 8 Gauss-Legendre nodes are required")
        radii = tuple(float(r) for r in self.radii)
        if len(radii) < 3 or radii[0] <= 0 or any(a >= b for a, b in zip(radii, radii[1:])):
            raise ParameterError("truncation radii must be positive, strictly increasing, at least 3")
        object.__setattr__(self, "radii", radii)
        if self.tol <= 0 or self.samples < 1 or self.k_samples < 1:
            raise ParameterError("tolerance and sample counts must be positive")


MC_DEFAULT = QuadratureSpec(
    scheme="mc", radii=tuple(float(2**k) for k in range(1, 11)), tol=1e-3, samples=100_000
)


@dataclass
class IntegralVerdict:
    value: float
    stderr: float
    classification: str
    ladder_estimates: list = field(default_factory=list)
    growth_exponent: float = 0.0

    @property
    def finite(self) -> bool:
        return self.classification == CONVERGENT


def classify_ladder(estimates, radii, tol) -> tuple[str, float]:
    """Decide convergence from partial integrals over increasing truncations.

    Convergent: last relative increment below tol. Divergent: positive
    increments that do not decay (ratio >= 0.9), which covers logarithmic
    growth. The log-log slope of the ladder is returned as a diagnostic.
    """
    est = np.asarray(estimates, dtype=float)
    rad = np.asarray(radii, dtype=float)
    good = est > 0
    slope = 0.0
    if good.sum() >= 2:
        slope = float(np.polyfit(np.log(rad[good][-3:]), np.log(est[good][-3:]), 1)[0])
    if not np.all(np.isfinite(est)):
        return DIVERGENT, math.inf
    inc = np.diff(est)
    last = est[-1]
    if last > 0 and abs(inc[-1]) <= tol * last:
        return CONVERGENT, slope
    if len(inc) >= 2 and inc[-1] > 0 and inc[-2] > 0 and inc[-1] >= 0.9 * inc[-2]:
        return DIVERGENT, slope
    return INCONCLUSIVE, slope


# -- block quadrature in u-space ------------------------------------------------


@lru_cache(maxsize=16)
def _gl(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1) / 2, w / 2


def _edges(radii):
    return (0.0,) + tuple(radii)


def _block_nodes(lo, hi, n):
    x, w = _gl(n)
    return lo + (hi - lo) * x, (hi - lo) * w


def _ladder_integrate(log_f, r: int, radii, n: int, split_diagonal: bool):
    """Partial integrals of exp(log_f(u)) over [0, R_k]^r for each ladder radius.

    log_f maps an (N, r) array to N log-values. For r = 2 with a non-smooth
    diagonal, blocks on the diagonal are split into two triangles (Duffy map).
    """
    edges = _edges(radii)
    nb = len(radii)
    if r == 1:
        parts = []
        for k in range(nb):
            u, w = _block_nodes(edges[k], edges[k + 1], n)
            vals = log_f(u[:, None])
            parts.append(_sum_exp(vals, np.log(w)))
        return np.cumsum(parts)
    if r != 2:
        raise UnsupportedError("block quadrature is implemented for rank <= 2")
    block = np.zeros((nb, nb))
    x, wx = _gl(n)
    for i in range(nb):
        ui, wi = _block_nodes(edges[i], edges[i + 1], n)
        for j in range(nb):
            uj, wj = _block_nodes(edges[j], edges[j + 1], n)
            if i == j and split_diagonal:
                lo, hi = edges[i], edges[i + 1]
                X, Y = np.meshgrid(x, x, indexing="ij")
                WX, WY = np.meshgrid(wx, wx, indexing="ij")
                h = hi - lo
                a = lo + h * X
                b = lo + h * X * Y
                jac = h * h * X * WX * WY
                pts1 = np.column_stack([a.ravel(), b.ravel()])
                pts2 = pts1[:, ::-1]
                lw = np.log(jac.ravel())
                block[i, j] = _sum_exp(log_f(pts1), lw) + _sum_exp(log_f(pts2), lw)
            else:
                A, B = np.meshgrid(ui, uj, indexing="ij")
                W = np.outer(wi, wj)
                pts = np.column_stack([A.ravel(), B.ravel()])
                block[i, j] = _sum_exp(log_f(pts), np.log(W.ravel()))
    return np.array([block[: k + 1, : k + 1].sum() for k in range(nb)])


def _sum_exp(log_vals, log_w):
    tot = log_vals + log_w
    tot = tot[np.isfinite(tot)]
    if tot.size == 0:
        return 0.0
    return float(np.exp(logsumexp(tot)))


# -- polar coordinates -----------------------------------------------------------


def log_polar_weight_u(u, a, b):
    """log of prod_i t_i^{2b+1} dt_i prod_{i<j} |t_i^2 - t_j^2|^a in u = log(1+t^2) coordinates."""
    u = np.atleast_2d(u)
    e = np.expm1(u)
    with np.errstate(divide="ignore"):
        out = np.sum(b * np.log(e) + u - math.log(2), axis=1) if b else np.sum(u - math.log(2), axis=1)
        r = u.shape[1]
        for i in range(r):
            for j in range(i + 1, r):
                if a:
                    out = out + a * np.log(np.abs(e[:, i] - e[:, j]))
    return out


def _frame_norm_sq(model: MatrixModel) -> float:
    return float(np.real(model.inner(model.frame[0], model.frame[0])))


@lru_cache(maxsize=32)
def _polar_normalization(htype) -> float:
    model = MatrixModel(htype)
    kappa = _frame_norm_sq(model)
    radii = (0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.0)

    def log_f(u):
        return -kappa * np.sum(np.expm1(u), axis=1) + log_polar_weight_u(u, model.a, model.b)

    est = _ladder_integrate(log_f, model.r, radii, 24, split_diagonal=model.a % 2 == 1)
    return math.pi**model.n / est[-1]


def polar_normalization(model: MatrixModel) -> float:
    """Constant c with int_{n+} f dlambda = c int_K int f(k z_t) omega(t) dt dk, calibrated on a Gaussian."""
    if model.r > 2:
        raise UnsupportedError("polar normalization is computed for rank <= 2")
    return _polar_normalization(model.htype)


def polar_integrate(log_radial, model: MatrixModel, spec: QuadratureSpec = QuadratureSpec()) -> IntegralVerdict:
    """Integrate a K-invariant density given by log F(t) over n+ in polar coordinates.

    The ladder radii are truncations in u = log(1 + t^2).
    """
    c = polar_normalization(model)

    def log_f(u):
        t = np.sqrt(np.expm1(u))
        return log_radial(t) + log_polar_weight_u(u, model.a, model.b)

    est = c * _ladder_integrate(log_f, model.r, spec.radii, spec.nodes, model.a % 2 == 1)
    cls, slope = classify_ladder(est, spec.radii, spec.tol)
    value = float(est[-1]) if cls == CONVERGENT else math.inf
    return IntegralVerdict(value, 0.0, cls, [float(x) for x in est], slope)


# -- densities -------------------------------------------------------------------


def l2_log_density(model: MatrixModel, bundle: BundleSpec, p: PolyMap, z) -> np.ndarray:
    """log of |rho(B(z,-zbar)^{-1/2}) f_p(z)|^2 Delta(z,-zbar)^{-g}."""
    z = np.asarray(z, complex)
    f = p(z, model.qmap(z))
    log_delta = model.log_delta_conj(z)
    with np.errstate(divide="ignore"):
        if bundle.kind == LINE:
            expo = -model.g / model.n * (float(bundle.nu) + model.n)
            val = np.abs(f) ** 2 if f.ndim == 1 else np.real(model.inner(f, f))
            return np.log(val) + expo * log_delta
        if bundle.kind == COTANGENT:
            if f.ndim == 1:
                raise DomainError("cotangent sections take values in n-")
            return model.cotangent_log_norm_sq(z, f) - model.g * log_delta
    raise UnsupportedError(f"densities are implemented for line and cotangent bundles, not {bundle}")


def l2_density(model: MatrixModel, bundle: BundleSpec, p: PolyMap, z) -> np.ndarray:
    return np.exp(l2_log_density(model, bundle, p, z))


# -- Selberg ---------------------------------------------------------------------


def selberg_exponents(m, bundle: BundleSpec, r: int, a: int, b: int):
    """(alpha, beta, gamma) of int prod s^{alpha-1}(1-s)^{beta-1} |Vandermonde|^{2 gamma}."""
    m = Partition(m)
    if len(m) != r:
        raise DomainError(f"signature length {len(m)} != rank {r}")
    return m[-1] + b + 1, m[-1] + bundle.mu_h_alpha1 + 1, a / 2


def selberg_closed_form(r: int, alpha: float, beta: float, gamma: float) -> float:
    """Selberg's product formula (alpha, beta > 0, gamma >= 0)."""
    if alpha <= 0 or beta <= 0:
        return math.inf
    logv = 0.0
    for j in range(r):
        logv += (
            gammaln(alpha + j * gamma)
            + gammaln(beta + j * gamma)
            + gammaln(1 + (j + 1) * gamma)
            - gammaln(alpha + beta + (r + j - 1) * gamma)
            - gammaln(1 + gamma)
        )
    return float(math.exp(logv))


def selberg_quadrature(r, alpha, beta, gamma, spec: QuadratureSpec = QuadratureSpec()) -> IntegralVerdict:
    a = 2 * gamma

    def log_f(u):
        s_log1m = -u  # log(1 - s)
        with np.errstate(divide="ignore"):
            out = np.sum((alpha - 1) * np.log(-np.expm1(-u)) + beta * s_log1m, axis=1)
            for i in range(r):
                for j in range(i + 1, r):
                    if a:
                        out = out + a * np.log(np.abs(np.exp(-u[:, i]) - np.exp(-u[:, j])))
        return out

    est = _ladder_integrate(log_f, r, spec.radii, spec.nodes, split_diagonal=(a % 2) != 0)
    cls, slope = classify_ladder(est, spec.radii, spec.tol)
    return IntegralVerdict(float(est[-1]) if cls == CONVERGENT else math.inf, 0.0, cls,
                           [float(x) for x in est], slope)


def selberg_bound(m, bundle: BundleSpec, constants, method: str = "closed",
                  spec: QuadratureSpec = QuadratureSpec()) -> IntegralVerdict:
    """The Selberg integral bounding the norm of p_m (x) v; finite iff m_r + mu(H_alpha1) >= 0."""
    r, a, b = constants[:3]
    alpha, beta, gamma = selberg_exponents(m, bundle, r, a, b)
    if method == "closed":
        if beta <= 0:
            return IntegralVerdict(math.inf, 0.0, DIVERGENT, [], math.inf)
        return IntegralVerdict(selberg_closed_form(r, alpha, beta, gamma), 0.0, CONVERGENT, [], 0.0)
    if method == "quadrature":
        return selberg_quadrature(r, alpha, beta, gamma, spec)
    raise ParameterError(f"unknown method {method!r}")


# -- probes ----------------------------------------------------------------------


def norm_probe(model: MatrixModel, bundle: BundleSpec, p: PolyMap,
               spec: QuadratureSpec = QuadratureSpec()) -> IntegralVerdict:
    """Estimate I(p) = ||f_p||^2 with a convergence verdict."""
    if spec.scheme == "mc" or model.r > 2:
        return monte_carlo_mass(model, bundle, p, spec)
    rng = np.random.default_rng(spec.seed)
    ks = model.random_k(rng, spec.k_samples)

    def log_radial(t):
        zt = model.z_t(t)
        z = model.k_plus((ks[0][:, None], ks[1][:, None]), zt[None])
        nk, nt = z.shape[:2]
        ld = l2_log_density(model, bundle, p, z.reshape((nk * nt,) + model.plus_shape))
        return logsumexp(ld.reshape(nk, nt), axis=0) - math.log(nk)

    return polar_integrate(log_radial, model, spec)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("NEARHOL_THREADS", "1")))
    except ValueError:
        return 1


def monte_carlo_mass(model: MatrixModel, bundle: BundleSpec, p: PolyMap,
                     spec: QuadratureSpec = MC_DEFAULT) -> IntegralVerdict:
    """Importance-sampled I(p) with a Cauchy proposal on the real coordinates of n+.

    Samples are drawn in MC_CHUNKS fixed chunks with spawned seeds, so results do
    not depend on NEARHOL_THREADS. The ladder truncates at |z| <= R_k.
    """
    dim = 2 * model.n
    proposal = multivariate_t(loc=np.zeros(dim), shape=np.eye(dim), df=1)
    seeds = np.random.SeedSequence(spec.seed).spawn(MC_CHUNKS)
    sizes = [spec.samples // MC_CHUNKS + (1 if i < spec.samples % MC_CHUNKS else 0) for i in range(MC_CHUNKS)]
    radii = np.asarray(spec.radii)

    def chunk(args):
        ss, size = args
        if size == 0:
            return np.zeros((len(radii), 2))
        rng = np.random.default_rng(ss)
        x = proposal.rvs(size=size, random_state=rng).reshape(size, dim)
        c = x[:, : model.n] + 1j * x[:, model.n:]
        z = model.from_coords(c)
        ratio = np.exp(l2_log_density(model, bundle, p, z) - proposal.logpdf(x))
        norm = np.linalg.norm(c, axis=1)
        out = np.empty((len(radii), 2))
        for k, R in enumerate(radii):
            v = np.where(norm <= R, ratio, 0.0)
            out[k] = v.sum(), (v * v).sum()
        return out

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        parts = list(pool.map(chunk, zip(seeds, sizes)))
    total = np.zeros((len(radii), 2))
    for part in parts:
        total += part
    N = spec.samples
    mean = total[:, 0] / N
    var = np.maximum(total[:, 1] / N - mean**2, 0.0)
    stderr = float(np.sqrt(var[-1] / N))
    cls, slope = classify_ladder(mean, radii, spec.tol)
    value = float(mean[-1]) if cls == CONVERGENT else math.inf
    return IntegralVerdict(value, stderr, cls, [float(x) for x in mean], slope)
