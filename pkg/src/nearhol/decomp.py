"""K-type data for L^2 sections: Borel-Weil, L^2 tests, spectra and multiplicity bounds.

Statuses are never guessed. A K-type is marked `InL2` only when a minor
criterion proves it, `NotInL2` only when every copy of it in Poly(n-, E) is
the Cartan component of some Poly_m(n-) (x) E whose highest weight vector
p_m (x) v_mu violates the diagonal degree bound, and `Undecided` otherwise.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

from .bundles import COTANGENT, GENERAL, LINE, BundleSpec
from .errors import DomainError
from .rootdata import RootSystemData, Vector, vadd
from .weights import (
    Partition,
    Weight,
    fundamental_weight,
    gamma_coordinates,
    gamma_weight,
    is_dominant_K,
    is_dominant_U,
    partitions,
    weight_system,
)


class L2Status(str, enum.Enum):
    IN_L2 = "InL2"
    NOT_IN_L2 = "NotInL2"
    UNDECIDED = "Undecided"


@dataclass(frozen=True)
class KTypeEntry:
    """One K-type E_lambda of Poly(n-, E).

    `multiplicity` is the upper bound min(M^lambda, dim E) (exact M^lambda for
    line and cotangent bundles); `exact` is True when m^lambda is known to
    equal it. `origin` is the first witness (m, shift) with lambda = gamma_m + shift.
    """

    weight: Weight
    multiplicity: int
    l2_status: L2Status
    origin: tuple[Partition, Weight] | None = None
    exact: bool = False


@dataclass
class DecompositionTable:
    bundle: BundleSpec
    cutoff: int
    entries: list[KTypeEntry] = field(default_factory=list)
    multiplicity_free: bool = False

    def weights(self) -> list[Weight]:
        return [e.weight for e in self.entries]

    def find(self, lam) -> KTypeEntry | None:
        lam = Weight(lam)
        for e in self.entries:
            if e.weight == lam:
                return e
        return None


def borel_weil(bundle: BundleSpec, data: RootSystemData | None = None) -> bool:
    """Non-trivial holomorphic sections exist iff mu(H_{alpha_1}) >= 0."""
    return bundle.mu_h_alpha1 >= 0


def minor_l2_condition(m: Sequence[int], bundle: BundleSpec) -> bool:
    """Poly_m(n-) (x) E lies in Poly^2 iff m_r + mu(H_{alpha_1}) >= 0."""
    m = Partition(m)
    return m[-1] + bundle.mu_h_alpha1 >= 0


def degree_l2_necessary(lam: Sequence, degs: Sequence[int], data: RootSystemData) -> bool:
    """Necessary condition deg_{t_i} p <= lambda(H_{gamma_i}) for a weight vector p of weight lambda.

    False certifies that p is not square integrable.
    """
    if len(degs) != data.rank:
        raise DomainError(f"expected {data.rank} degrees, got {len(degs)}")
    return all(d <= data.pairing(lam, g) for d, g in zip(degs, data.strongly_orthogonal))


def line_bundle_spectrum(k: int, cutoff: int, data: RootSystemData) -> DecompositionTable:
    """U-types of L^2(X, L_k): gamma_m + k lambda_1 with m_r >= -k, each once."""
    from .bundles import line_bundle

    bundle = line_bundle(k, data)
    lam1 = fundamental_weight(data)
    entries = []
    for m in partitions(data.rank, cutoff):
        if m[-1] >= -k:
            lam = gamma_weight(m, data) + lam1 * k
            entries.append(KTypeEntry(lam, 1, L2Status.IN_L2, (m, lam1 * k), exact=True))
    return DecompositionTable(bundle, cutoff, entries, multiplicity_free=True)


def schlichtkrull_params(lam: Sequence, k: int, data: RootSystemData) -> list[int]:
    """Parameters tilde m_i = 2 m_{r-i+1} + k of lambda = gamma_m + k lambda_1 in Lambda_k.

    Computed both from m and directly as lambda(H_{gamma_{r-i+1}}); the two
    must agree, and monotonicity and parity are asserted.
    """
    lam = Weight(lam)
    rest = lam - fundamental_weight(data) * k
    m = gamma_coordinates(rest, data)
    if m is None or m[-1] < -k:
        raise DomainError(f"{lam} is not in Lambda_k for k={k}")
    r = data.rank
    tilde = [2 * m[r - 1 - i] + k for i in range(r)]
    direct = [data.pairing(lam, data.strongly_orthogonal[r - 1 - i]) for i in range(r)]
    if tilde != direct:
        raise ArithmeticError(f"Schlichtkrull parameters disagree: {tilde} vs {direct}")
    if not (abs(k) <= tilde[0] and all(a <= b for a, b in zip(tilde, tilde[1:]))):
        raise ArithmeticError(f"monotonicity fails for {tilde}")
    if any((t - k) % 2 for t in tilde):
        raise ArithmeticError(f"parity fails for {tilde}")
    return tilde


def cotangent_tensor_ktypes(m: Sequence[int], data: RootSystemData) -> list[Weight]:
    """Highest weights of Poly_m(n-) (x) n-, in root order."""
    m = Partition(m)
    gm = gamma_weight(m, data)
    walls = [a for a in data.compact_simple if data.pairing(gm, a) == 0]
    neg = set(data.noncompact_negative)
    out = []
    for beta in data.noncompact_negative:
        if any(vadd(beta, a) in neg for a in walls):
            continue
        lam = gm + beta
        if is_dominant_K(lam, data):
            out.append(lam)
    return out


def _descent_count(m: Partition) -> int:
    # sentinel m_0 = infinity: index 1 always counts
    return 1 + sum(1 for i in range(1, len(m)) if m[i - 1] > m[i])


def cotangent_multiplicity(lam: Sequence, cutoff: int, data: RootSystemData) -> int:
    """M^lambda of E_lambda in Poly(n-, n-)."""
    lam = Weight(lam)
    if not is_dominant_K(lam, data):
        raise DomainError(f"{lam} is not K-dominant")
    m = gamma_coordinates(lam, data)
    if m is not None:
        return _descent_count(m)
    for mm in partitions(data.rank, cutoff):
        if lam in cotangent_tensor_ktypes(mm, data):
            return 1
    return 0


def _cotangent_witnesses(lam: Weight, data: RootSystemData, cutoff: int) -> list[tuple[Partition, Weight]]:
    """All (m, beta) with lam in Lambda_m(n-); for lam = gamma_m these are m + e_j."""
    m = gamma_coordinates(lam, data)
    out = []
    if m is not None:
        for j in range(len(m)):
            up = list(m)
            up[j] += 1
            if j == 0 or m[j - 1] > m[j]:
                mm = Partition(up)
                out.append((mm, lam - gamma_weight(mm, data)))
        return out
    for mm in partitions(data.rank, cutoff + 1):
        if lam in cotangent_tensor_ktypes(mm, data):
            out.append((mm, lam - gamma_weight(mm, data)))
    return out


def spectrum_support(bundle: BundleSpec, cutoff: int, data: RootSystemData) -> DecompositionTable:
    """Candidate U-types (Gamma + Phi(E)) cap Lambda with multiplicity bounds and L^2 statuses."""
    ws = weight_system(bundle.mu, data)
    dim_e = ws.dim
    mu = bundle.mu
    root_order = {Weight(b): i for i, b in enumerate(data.noncompact_negative)}
    weight_order = {w: i for i, (w, _) in enumerate(ws)}

    candidates: dict[Weight, tuple[Partition, Weight]] = {}
    for m in partitions(data.rank, cutoff):
        gm = gamma_weight(m, data)
        for nu, _ in ws:
            lam = gm + nu
            if lam in candidates or not is_dominant_U(lam, data):
                continue
            if bundle.kind == COTANGENT and lam not in cotangent_tensor_ktypes(m, data):
                continue
            candidates[lam] = (m, nu)

    entries = []
    for lam, origin in candidates.items():
        if bundle.kind == LINE:
            witnesses = [origin]
            bound = 1
        elif bundle.kind == COTANGENT:
            witnesses = _cotangent_witnesses(lam, data, cutoff)
            bound = len(witnesses)
        else:
            witnesses = []
            for nu, c in ws:
                mm = gamma_coordinates(lam - nu, data)
                if mm is not None:
                    witnesses.append((mm, nu))
            bound = min(dim_e, sum(ws.multiplicity(nu) for _, nu in witnesses))
        proved = [w for w in witnesses if minor_l2_condition(w[0], bundle)]
        # for GENERAL bundles occurrence is only certain for the Cartan component
        occurs = proved if bundle.kind != GENERAL else [w for w in proved if w[1] == mu]
        refuted = [
            w for w in witnesses
            if w[1] == mu and not degree_l2_necessary(lam, list(w[0]), data)
        ]
        if occurs:
            status = L2Status.IN_L2
            exact = len(proved) == len(witnesses) and bundle.kind != GENERAL
        elif refuted and len(refuted) == bound:
            status = L2Status.NOT_IN_L2
            exact = True
        else:
            status = L2Status.UNDECIDED
            exact = False
        entries.append(KTypeEntry(lam, bound, status, origin, exact))

    def key(e: KTypeEntry):
        m, nu = e.origin
        shift = root_order.get(nu, weight_order.get(nu, 0))
        return (m.size, tuple(m), shift)

    entries.sort(key=key)
    return DecompositionTable(bundle, cutoff, entries, multiplicity_free=bundle.kind == LINE)


@dataclass(frozen=True)
class ConjectureRow:
    """One highest weight vector p_m (x) v_mu compared against the degree criterion."""

    m: Partition
    weight: Weight
    degrees: tuple
    degree_ok: bool
    lower_ok: bool
    dominant: bool
    reference: bool | None
    source: str
    status: str


@dataclass
class ConjectureReport:
    bundle: BundleSpec
    cutoff: int
    rows: list[ConjectureRow]

    def counts(self) -> dict:
        out = {"agree": 0, "disagree": 0, "unknown": 0}
        for row in self.rows:
            out[row.status] += 1
        return out


def highest_weight_polynomial(bundle: BundleSpec, m, model):
    """p_m (x) v_mu as a PolyMap: scalar for line bundles, n--valued for the cotangent bundle."""
    from .errors import UnsupportedError
    from .jordan.model import minor_poly

    p = minor_poly(model, m)
    if bundle.kind == LINE:
        return p
    if bundle.kind == COTANGENT:
        target = tuple(int(c) for c in bundle.mu)
        for vec, w in zip(model.basis_minus, model.minus_weights()):
            if w == target:
                return p.tensor(vec)
        raise ArithmeticError("no basis vector of n- has the highest weight -alpha_1")
    raise UnsupportedError(f"highest weight vectors are built for line and cotangent bundles, not {bundle}")


def conjecture_scan(bundle: BundleSpec, cutoff: int, data: RootSystemData, model=None,
                    probe_max_rank: int = 1, spec=None) -> ConjectureReport:
    """Compare the diagonal degree criterion with decided L^2 membership on the p_m (x) v family.

    The reference is the minor criterion when it proves membership, then
    U-dominance (a K-type of Poly^2 has a Phi^+-dominant highest weight, so a
    non-dominant lambda is excluded), then the minor criterion for line
    bundles. Remaining cases use a numerical norm probe on models of rank
    <= probe_max_rank and are reported as unknown beyond that. Nothing here
    asserts the conjecture.
    """
    from .errors import UnsupportedError
    from .jordan.model import MatrixModel
    from .jordan.sections import diagonal_degrees

    if not data.htype.classical or data.htype.family == "IV":
        raise UnsupportedError(f"no matrix model for {data.htype}")
    if model is None:
        model = MatrixModel(data.htype)
    rows = []
    for m in partitions(data.rank, cutoff):
        lam = gamma_weight(m, data) + bundle.mu
        p = highest_weight_polynomial(bundle, m, model)
        degs = tuple(diagonal_degrees(model, p))
        ok = degree_l2_necessary(lam, degs, data)
        lower = all(mi <= d for mi, d in zip(m, degs))
        dominant = is_dominant_U(lam, data)
        if minor_l2_condition(m, bundle):
            ref, source = True, "minor"
        elif not dominant:
            ref, source = False, "not-dominant"
        elif bundle.kind == LINE:
            ref, source = minor_l2_condition(m, bundle), "minor"
        elif data.rank <= probe_max_rank:
            from .integrals import CONVERGENT, DIVERGENT, QuadratureSpec, norm_probe

            verdict = norm_probe(model, bundle, p, spec or QuadratureSpec())
            ref = {CONVERGENT: True, DIVERGENT: False}.get(verdict.classification)
            source = "probe:" + verdict.classification
        else:
            ref, source = None, "none"
        status = "unknown" if ref is None else ("agree" if ref == ok else "disagree")
        rows.append(ConjectureRow(m, lam, degs, ok, lower, dominant, ref, source, status))
    return ConjectureReport(bundle, cutoff, rows)
