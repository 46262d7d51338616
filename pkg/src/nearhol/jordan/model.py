"""Matrix models of the classical Jordan pairs and their basic operations.

n+ is realized as p x q matrices (type I), antisymmetric (type II) or symmetric
(type III) n x n matrices; n- consists of the transposed shapes and z -> z^H is
the conjugation n+ -> n-. All functions accept leading batch axes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import unitary_group

from ..errors import DomainError, IntegrityError, SingularityError, UnsupportedError
from ..rootdata import HermitianType, build_root_data, structure_constants
from .polymap import Affine, Const, Det, Node, Pfaffian, PolyMap, VarY, pfaffian

PLUS = "plus"
MINUS = "minus"


@dataclass
class JordanPoint:
    """A value in n+ or n-; validated against `model` (shape and symmetry) when one is given."""

    value: np.ndarray
    side: str = PLUS
    model: "MatrixModel | None" = None

    def __post_init__(self):
        self.value = np.asarray(self.value, dtype=complex)
        if self.side not in (PLUS, MINUS):
            raise DomainError(f"unknown side {self.side}")
        if self.model is not None:
            self.model.check_point(self.value, self.side)


def _T(a):
    return np.swapaxes(a, -1, -2)


def _H(a):
    return np.conj(np.swapaxes(a, -1, -2))


def _haar(dim, size, rng):
    if dim == 1:
        return np.exp(2j * np.pi * rng.random((size, 1, 1)))
    return unitary_group.rvs(dim, size=size, random_state=rng).reshape(size, dim, dim)


class MatrixModel:
    """Classical matrix model for a Hermitian type I(p,q), II(n) or III(n)."""

    def __init__(self, htype: HermitianType):
        if htype.family not in ("I", "II", "III"):
            raise UnsupportedError(f"no matrix model for type {htype}")
        self.htype = htype
        self.family = htype.family
        self.data = build_root_data(htype)
        self.r, self.a, self.b, self.g, self.n = structure_constants(self.data)
        if self.family == "I":
            p, q = htype.params
            self.plus_shape = (p, q)
        else:
            (m,) = htype.params
            self.plus_shape = (m, m)
        self.minus_shape = self.plus_shape[::-1]
        self.basis_plus = self._basis()
        self.basis_minus = _H(self.basis_plus)
        if len(self.basis_plus) != self.n:
            raise IntegrityError("basis size disagrees with dim n+")
        self.frame = self._frame()

    def __repr__(self):
        return f"MatrixModel({self.htype})"

    # -- coordinates ---------------------------------------------------------

    def _basis(self):
        p, q = self.plus_shape
        out = []
        if self.family == "I":
            for i in range(p):
                for j in range(q):
                    e = np.zeros((p, q), complex)
                    e[i, j] = 1
                    out.append(e)
        else:
            s = 1 / np.sqrt(2)
            for i in range(p):
                for j in range(i, p):
                    e = np.zeros((p, p), complex)
                    if i == j:
                        if self.family == "II":
                            continue
                        e[i, i] = 1
                    else:
                        e[i, j] = s
                        e[j, i] = s if self.family == "III" else -s
                    out.append(e)
        return np.array(out)

    def _frame(self):
        out = []
        for i in range(self.r):
            e = np.zeros(self.plus_shape, complex)
            if self.family == "II":
                e[2 * i, 2 * i + 1] = 1
                e[2 * i + 1, 2 * i] = -1
            else:
                e[i, i] = 1
            out.append(e)
        return np.array(out)

    def _basis_for(self, side):
        return self.basis_plus if side == PLUS else self.basis_minus

    def coords(self, z, side=PLUS):
        """Coefficients in the orthonormal trace-form basis, (z|b_k) = tr(z b_k^H)."""
        return np.einsum("...ij,kij->...k", z, np.conj(self._basis_for(side)))

    def from_coords(self, c, side=PLUS):
        return np.einsum("...k,kij->...ij", c, self._basis_for(side))

    def inner(self, v, w):
        """Trace form (v|w) = tr(v w^H)."""
        return np.einsum("...ij,...ij->...", v, np.conj(w))

    def conj(self, z):
        return _H(z)

    def check_point(self, z, side=PLUS, tol=1e-12):
        z = np.asarray(z, dtype=complex)
        shape = self.plus_shape if side == PLUS else self.minus_shape
        if z.shape[-2:] != shape:
            raise DomainError(f"expected trailing shape {shape}, got {z.shape}")
        if self.family != "I":
            sign = -1 if self.family == "II" else 1
            scale = max(1.0, float(np.max(np.abs(z), initial=0)))
            if np.max(np.abs(z - sign * _T(z)), initial=0) > tol * scale:
                raise DomainError("value violates the family's (anti)symmetry")
        return z

    # -- random samples ------------------------------------------------------

    def random_plus(self, rng, size=(), scale=1.0):
        size = tuple(np.atleast_1d(size)) if size != () else ()
        z = rng.normal(size=size + self.plus_shape) + 1j * rng.normal(size=size + self.plus_shape)
        if self.family == "II":
            z = (z - _T(z)) / 2
        elif self.family == "III":
            z = (z + _T(z)) / 2
        return scale * z / np.sqrt(2)

    def random_minus(self, rng, size=(), scale=1.0):
        return _H(self.random_plus(rng, size, scale))

    def random_k(self, rng, size: int):
        """Haar-random K-witnesses (A, B) acting by z -> A z B."""
        p, q = self.plus_shape
        A = _haar(p, size, rng)
        if self.family == "I":
            B = _haar(q, size, rng)
        else:
            B = _T(A)
        return A, B

    def k_plus(self, k, z):
        A, B = k
        return A @ z @ B

    def k_minus(self, k, y):
        A, B = k
        return _H(B) @ y @ _H(A)

    # -- Jordan operations ---------------------------------------------------

    def triple(self, x, y, z):
        return x @ y @ z + z @ y @ x

    def quadratic(self, x, y):
        return x @ y @ x

    def dop(self, x, y, z):
        return self.triple(x, y, z)

    def bergman_apply(self, x, y, z):
        """B(x,y)z = (1 - xy) z (1 - yx), valid on either side."""
        m = x.shape[-2]
        k = y.shape[-2]
        return (np.eye(m) - x @ y) @ z @ (np.eye(k) - y @ x)

    def bergman(self, x, y, side=PLUS):
        """Matrix of B(x,y) in the orthonormal basis of n+ (side=PLUS, x in n+) or n- (x in n-)."""
        basis = self._basis_for(side)
        x = np.asarray(x, complex)
        y = np.asarray(y, complex)
        images = self.bergman_apply(x[..., None, :, :], y[..., None, :, :], basis)
        # M[k, l] = (B b_l | b_k)
        return np.einsum("...lij,kij->...kl", images, np.conj(basis))

    def delta(self, x, y):
        """Jordan pair determinant; det(1 - xy) for types I, III and the Pfaffian square root for II."""
        x = np.asarray(x, complex)
        y = np.asarray(y, complex)
        if self.family == "II":
            return self._sign_ii * pfaffian(self._block_ii(x, y))
        return np.linalg.det(np.eye(x.shape[-2]) - x @ y)

    @property
    def _sign_ii(self):
        m = self.plus_shape[0]
        return (-1) ** (m * (m - 1) // 2)

    def _block_ii_lin(self, x, y):
        # [[x, 0], [0, -y]]; the constant part [[0, 1], [-1, 0]] is added separately
        x, y = np.broadcast_arrays(x, y)
        zero = np.zeros_like(x)
        top = np.concatenate([x, zero], axis=-1)
        bot = np.concatenate([zero, -y], axis=-1)
        return np.concatenate([top, bot], axis=-2)

    def _block_ii_const(self):
        m = self.plus_shape[0]
        eye = np.eye(m)
        return np.block([[np.zeros((m, m)), eye], [-eye, np.zeros((m, m))]])

    def _block_ii(self, x, y):
        return self._block_ii_lin(x, y) + self._block_ii_const()

    def delta_node(self, x: Node, y: Node) -> Node:
        """Delta(x, y) as a PolyMap node."""
        if self.family == "II":
            blk = Affine(self._block_ii_lin, x, y, const=self._block_ii_const())
            return Pfaffian(blk) * self._sign_ii
        return Det(Const(np.eye(self.plus_shape[0])) - x @ y)

    def quasi_inverse(self, x, y, method="matrix"):
        """x^y = B(x,y)^{-1}(x - Q_x y); the matrix form is (1 - xy)^{-1} x."""
        x = np.asarray(x, complex)
        y = np.asarray(y, complex)
        m = x.shape[-2]
        if method == "matrix":
            a = np.eye(m) - x @ y
            self._check_invertible(a)
            return np.linalg.solve(a, x)
        side = PLUS if x.shape[-2:] == self.plus_shape else MINUS
        M = self.bergman(x, y, side)
        self._check_invertible(M)
        rhs = self.coords(x - self.quadratic(x, y), side)
        return self.from_coords(np.linalg.solve(M, rhs[..., None])[..., 0], side)

    @staticmethod
    def _check_invertible(a):
        c = np.linalg.cond(a)
        if np.any(~np.isfinite(c)) or np.any(c > 1e14):
            raise SingularityError("Bergman operator is numerically singular")

    def qmap(self, z):
        """q(z) = zbar^{-z} = (1 + z^H z)^{-1} z^H, evaluated through the SVD (stable for large z)."""
        U, sv, Vh = self._svd(z)
        return _H(Vh) @ self._sigma(sv / (1 + sv**2), MINUS) @ _H(U)

    def qmap_solve(self, z):
        """Same as qmap via a linear solve; used as an independent cross-check."""
        z = np.asarray(z, complex)
        zb = _H(z)
        return np.linalg.solve(np.eye(zb.shape[-2]) + zb @ z, zb)

    def _svd(self, z):
        return np.linalg.svd(np.asarray(z, complex), full_matrices=True)

    def _sigma(self, vals, side):
        shape = self.plus_shape if side == PLUS else self.minus_shape
        out = np.zeros(vals.shape[:-1] + shape, complex)
        k = min(shape)
        idx = np.arange(k)
        out[..., idx, idx] = vals[..., :k]
        return out

    def log_delta_conj(self, z):
        """log Delta(z, -zbar) = sum log(1 + t_i^2), from singular values."""
        sv = np.linalg.svd(np.asarray(z, complex), compute_uv=False)
        tot = np.sum(np.log1p(sv**2), axis=-1)
        return tot / 2 if self.family == "II" else tot

    # -- Lie algebra l -------------------------------------------------------
    # T in l is a pair (A, D) acting by z -> Az - zD on n+ and y -> Dy - yA on n-.

    def on_plus(self, T, z):
        A, D = T
        return A @ z - z @ D

    def on_minus(self, T, y):
        A, D = T
        return D @ y - y @ A

    def dop_element(self, z, w):
        """D_{z,w} as an element of l."""
        return (z @ w, -(w @ z))

    def grading_element(self):
        p, q = self.plus_shape
        return (0.5 * np.eye(p), -0.5 * np.eye(q))

    def cartan_element(self, tau):
        """Cartan element with epsilon-coordinates tau (matches the root data conventions)."""
        tau = np.asarray(tau, dtype=complex)
        p, q = self.plus_shape
        if self.family == "I":
            if tau.shape[-1] != p + q:
                raise DomainError("wrong number of coordinates")
            return (np.diag(tau[:p]), np.diag(tau[p:][::-1]))
        if tau.shape[-1] != p:
            raise DomainError("wrong number of coordinates")
        A = np.diag(tau)
        return (A, -A.T)

    def random_l(self, rng):
        p, q = self.plus_shape
        A = rng.normal(size=(p, p)) + 1j * rng.normal(size=(p, p))
        if self.family == "I":
            D = rng.normal(size=(q, q)) + 1j * rng.normal(size=(q, q))
        else:
            D = -A.T
        return (A / np.sqrt(2 * p), D / np.sqrt(2 * q))

    def trace_plus(self, T):
        """tr(ad T | n+)."""
        imgs = self.on_plus((T[0][..., None, :, :], T[1][..., None, :, :]), self.basis_plus)
        return np.einsum("...kij,kij->...", imgs, np.conj(self.basis_plus))

    def minus_weights(self):
        """Epsilon-weight of each basis vector of n- (diagonal Cartan action)."""
        out = []
        dim = self.data.dim
        for b in self.basis_minus:
            w = []
            for i in range(dim):
                tau = np.zeros(dim)
                tau[i] = 1
                img = self.on_minus(self.cartan_element(tau), b)
                w.append(np.real(self.inner(img, b)))
            out.append(tuple(int(round(x)) for x in w))
        return out

    # -- frames and polar decomposition --------------------------------------

    def z_t(self, t):
        t = np.asarray(t)
        return np.einsum("...i,ijk->...jk", t.astype(complex), self.frame)

    def epsilon(self, i):
        """epsilon_i = e_1 + ... + e_i."""
        return self.frame[:i].sum(axis=0)

    def polar_decompose(self, z):
        """Return ((A, B), t) with z = A z_t B and t sorted descending."""
        z = np.asarray(z, complex)
        batch = z.shape[:-2]
        flat = z.reshape((-1,) + z.shape[-2:])
        if self.family == "I":
            U, s, Vh = np.linalg.svd(flat)
            t = s[:, : self.r]
            A, B = U, Vh
        else:
            res = [self._takagi(m) for m in flat]
            A = np.array([x[0] for x in res])
            t = np.array([x[1] for x in res])
            B = _T(A)
        p, q = self.plus_shape
        return (A.reshape(batch + (p, p)), B.reshape(batch + (q, q))), t.reshape(batch + (self.r,))

    def _takagi(self, z):
        """z = Q D Q^T with D = sum t_i e_i, by deflation along top eigenvectors of z z^H."""
        m = z.shape[0]
        skew = self.family == "II"
        step = 2 if skew else 1
        tol = 1e-13 * max(1.0, np.linalg.norm(z))
        cols = []
        ts = []
        P = np.eye(m, dtype=complex)
        cur = z
        while len(cols) + step <= m and len(ts) < self.r:
            h = cur @ _H(cur)
            vals, vecs = np.linalg.eigh((h + _H(h)) / 2)
            sigma = np.sqrt(max(vals[-1], 0.0))
            q1 = vecs[:, -1]
            if sigma <= tol:
                break
            if skew:
                q2 = -cur @ np.conj(q1) / sigma
                new = [q1, q2 / np.linalg.norm(q2)]
            else:
                u1 = q1 + cur @ np.conj(q1) / sigma
                u2 = 1j * q1 - 1j * cur @ np.conj(q1) / sigma
                u = u1 if np.linalg.norm(u1) >= np.linalg.norm(u2) else u2
                new = [u / np.linalg.norm(u)]
            local = np.column_stack(new)
            full, _ = np.linalg.qr(np.column_stack([local, np.eye(cur.shape[0])]))
            full[:, : len(new)] = local
            rest = full[:, len(new):]
            cols.extend(P @ local[:, j] for j in range(len(new)))
            ts.append(sigma)
            cur = _H(rest) @ cur @ np.conj(rest)
            P = P @ rest
        ts += [0.0] * (self.r - len(ts))
        basis = np.column_stack(cols) if cols else np.zeros((m, 0), complex)
        if basis.shape[1] < m:
            # zero blocks: any orthonormal completion works
            q, _ = np.linalg.qr(np.column_stack([basis, np.eye(m)]))
            q[:, : basis.shape[1]] = basis
            basis = q[:, :m]
        return basis, np.array(ts)

    # -- bundles -------------------------------------------------------------

    def bergman_bundle_action(self, bundle, z, vec):
        """Apply rho(B(z,-zbar)^{-1/2}) to a fiber value (scalar for line bundles, n- for the cotangent bundle)."""
        from ..bundles import COTANGENT, LINE

        z = np.asarray(z, complex)
        if bundle.kind == LINE:
            d = self.delta(z, -_H(z))
            expo = -float(bundle.nu) * self.g / (2 * self.n)
            return np.real(d) ** expo * vec
        if bundle.kind == COTANGENT:
            U, sv, Vh = self._svd(z)
            d1, d2 = self._bergman_diagonals(sv)
            wp = Vh @ np.asarray(vec, complex) @ U
            wp = np.sqrt(d1[..., :, None] * d2[..., None, :]) * wp
            return _H(Vh) @ wp @ _H(U)
        raise UnsupportedError(f"rho(B) is implemented for line and cotangent bundles, not {bundle}")

    def _bergman_diagonals(self, sv):
        # with z = U S V^H: 1 + zbar z = V diag(d1) V^H and 1 + z zbar = U diag(d2) U^H
        p, q = self.plus_shape
        s2 = sv**2
        d1 = np.ones(sv.shape[:-1] + (q,))
        d2 = np.ones(sv.shape[:-1] + (p,))
        k = min(p, q)
        d1[..., :k] += s2[..., :k]
        d2[..., :k] += s2[..., :k]
        return d1, d2

    def cotangent_log_norm_sq(self, z, vec):
        """log |B(zbar,-z)^{1/2} vec|^2, computed in log-space."""
        U, sv, Vh = self._svd(z)
        d1, d2 = self._bergman_diagonals(sv)
        wp = Vh @ np.asarray(vec, complex) @ U
        with np.errstate(divide="ignore"):
            terms = np.log(d1)[..., :, None] + np.log(d2)[..., None, :] + np.log(np.abs(wp) ** 2)
        flat = terms.reshape(terms.shape[:-2] + (-1,))
        top = np.max(flat, axis=-1, keepdims=True)
        top = np.where(np.isfinite(top), top, 0.0)
        return (top + np.log(np.sum(np.exp(flat - top), axis=-1, keepdims=True)))[..., 0]

    def cotangent_sqrt(self, z):
        """Matrix of B(zbar,-z)^{1/2} on n- via Hermitian eigendecomposition (small |z| only)."""
        zb = _H(z)
        M = self.bergman(zb, -z, MINUS)
        scale = np.max(np.abs(M))
        if np.max(np.abs(M - _H(M))) > 1e-10 * scale:
            raise IntegrityError("Bergman operator is not Hermitian")
        vals, vecs = np.linalg.eigh((M + _H(M)) / 2)
        if np.any(vals <= 0):
            raise IntegrityError("Bergman operator is not positive definite")
        return vecs @ (np.sqrt(vals)[..., None] * _H(vecs))

    def bundle_norm_sq(self, bundle, z, values):
        """|rho(B(z,-zbar)^{-1/2}) values|^2 in the trace form."""
        out = self.bergman_bundle_action(bundle, z, values)
        if out.ndim == np.asarray(z).ndim:
            return np.real(self.inner(out, out))
        return np.abs(out) ** 2

    def kahler_potential(self, z):
        """Psi(z) = 2g log Delta(z, -zbar)."""
        return 2 * self.g * np.log(np.real(self.delta(z, -_H(z))))


def model_for(htype) -> MatrixModel:
    if isinstance(htype, str):
        htype = HermitianType.parse(htype)
    return MatrixModel(htype)


def minor_poly_node(model: MatrixModel, i: int, y: Node) -> Node:
    eps = model.epsilon(i)
    return model.delta_node(Const(eps), Const(_H(eps)) - y)


def minor(model: MatrixModel, y, i: int):
    """Delta_i(y) = Delta(eps_i, bar eps_i - y)."""
    if not 1 <= i <= model.r:
        raise DomainError(f"minor index {i} outside 1..{model.r}")
    eps = model.epsilon(i)
    y = np.asarray(y, complex)
    return model.delta(np.broadcast_to(eps, y.shape[:-2] + eps.shape), _H(eps) - y)


def minor_poly(model: MatrixModel, m) -> PolyMap:
    """p_m = Delta_1^{m_1-m_2} ... Delta_r^{m_r} as a PolyMap constant along n+."""
    from ..weights import Partition

    m = Partition(m)
    if len(m) != model.r:
        raise DomainError(f"signature length {len(m)} != rank {model.r}")
    Y = VarY()
    node: Node = Const(1.0)
    for i in range(model.r):
        e = m[i] - (m[i + 1] if i + 1 < model.r else 0)
        if e:
            node = node * (minor_poly_node(model, i + 1, Y) ** e)
    return PolyMap(node)
