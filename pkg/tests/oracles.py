"""Independent reference computations for the test suite.

Nothing here imports the package: characters come from semistandard
tableaux, tensor products from Klimyk's formula on gl_p x gl_q, volumes and
masses from closed forms or scipy quadrature.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from fractions import Fraction

import numpy as np
from scipy import integrate, special


# -- gl_n characters via semistandard tableaux ------------------------------


def ssyt_weights(shape, n):
    """Contents of all semistandard tableaux of a partition shape with entries 1..n."""
    shape = [x for x in shape if x > 0]
    cells = [(i, j) for i, row in enumerate(shape) for j in range(row)]
    out = Counter()
    fill = {}

    def rec(k):
        if k == len(cells):
            w = [0] * n
            for v in fill.values():
                w[v] += 1
            out[tuple(w)] += 1
            return
        i, j = cells[k]
        lo = 0
        if j > 0:
            lo = max(lo, fill[(i, j - 1)])
        if i > 0:
            lo = max(lo, fill[(i - 1, j)] + 1)
        for v in range(lo, n):
            fill[(i, j)] = v
            rec(k + 1)
        fill.pop((i, j), None)

    rec(0)
    return out


def gl_character(hw):
    """Weight multiset of the irreducible gl_n module with (possibly negative) highest weight hw."""
    hw = tuple(int(x) for x in hw)
    n = len(hw)
    if n == 0:
        return Counter({(): 1})
    c = -min(hw)
    base = ssyt_weights([x + c for x in hw], n)
    return Counter({tuple(x - c for x in w): m for w, m in base.items()})


def block_character(hw, blocks):
    """Character of gl_{n1} x gl_{n2} x ... with highest weight hw split into blocks."""
    parts, pos = [], 0
    for b in blocks:
        parts.append(gl_character(hw[pos:pos + b]))
        pos += b
    out = Counter()
    for combo in itertools.product(*[list(p.items()) for p in parts]):
        w = tuple(x for wt, _ in combo for x in wt)
        out[w] += math.prod(m for _, m in combo)
    return out


def _dot_dominant(v, blocks):
    """Straighten v + rho by sorting within each block; returns (sign, dominant) or (0, None)."""
    sign, out, pos = 1, [], 0
    for b in blocks:
        seg = [v[pos + i] + (b - 1 - i) for i in range(b)]
        if len(set(seg)) < b:
            return 0, None
        # sign of the sorting permutation = parity of inversions
        inv = sum(1 for i in range(b) for j in range(i + 1, b) if seg[i] < seg[j])
        sign *= -1 if inv % 2 else 1
        seg = sorted(seg, reverse=True)
        out += [seg[i] - (b - 1 - i) for i in range(b)]
        pos += b
    return sign, tuple(out)


def klimyk_tensor(hw, weights, blocks):
    """Decompose E_hw (x) W for a module W given by its weight list (Klimyk's formula)."""
    out = Counter()
    for w, m in weights.items():
        sign, dom = _dot_dominant(tuple(a + b for a, b in zip(hw, w)), blocks)
        if sign:
            out[dom] += sign * m
    return {k: v for k, v in out.items() if v}


def peel(char, blocks):
    """Decompose a character into irreducibles by repeatedly removing the top dominant weight."""
    char = Counter({k: v for k, v in char.items() if v})
    out = Counter()
    while char:
        top = max(char)
        out[top] += char[top]
        sub = block_character(top, blocks)
        mult = char[top]
        for w, m in sub.items():
            char[w] -= mult * m
            if char[w] == 0:
                del char[w]
    return dict(out)


# -- type I(p, q) specifics --------------------------------------------------


def type_i_gamma(m, p, q):
    """gamma_m = sum m_i (e_i - e_{p+q+1-i})."""
    v = [0] * (p + q)
    for i, mi in enumerate(m):
        v[i] += mi
        v[p + q - 1 - i] -= mi
    return tuple(v)


def type_i_minus_weights(p, q):
    """Weights of n- = e_{p+j} - e_i."""
    out = Counter()
    for i in range(p):
        for j in range(q):
            v = [0] * (p + q)
            v[p + j] += 1
            v[i] -= 1
            out[tuple(v)] += 1
    return out


def type_i_cotangent_tensor(m, p, q):
    """K-types of Poly_m(n-) (x) n- for I(p,q), by Klimyk and cross-checked by peeling."""
    hw = type_i_gamma(m, p, q)
    nminus = type_i_minus_weights(p, q)
    kl = klimyk_tensor(hw, nminus, (p, q))
    prod = Counter()
    for a, ma in block_character(hw, (p, q)).items():
        for b, mb in nminus.items():
            prod[tuple(x + y for x, y in zip(a, b))] += ma * mb
    if kl != peel(prod, (p, q)):
        raise AssertionError("Klimyk and peeling disagree")
    return kl


def partitions(r, max_total):
    for total in range(max_total + 1):
        for m in itertools.product(range(total + 1), repeat=r):
            if sum(m) == total and all(a >= b for a, b in zip(m, m[1:])):
                yield m


def type_i_cotangent_multiplicity(lam, p, q, cutoff):
    """M^lambda in Poly(n-) (x) n-, summing the tensor oracle over all m up to cutoff + 1."""
    lam = tuple(lam)
    return sum(type_i_cotangent_tensor(m, p, q).get(lam, 0) for m in partitions(min(p, q), cutoff + 1))


# -- Frobenius reciprocity for SU(2) and SU(3) --------------------------------


def frobenius_line_multiplicity(lam, k, q):
    """dim Hom_K(V_lam, C_{k lambda_1}) for U = SU(1+q), K = S(U(1) x U(q)), q in {1, 2}.

    Integer gl weights; the K-character has gl weight (k, 0, .., 0) up to the
    centre. For q = 2 the K-invariant count is mult(w) - mult(w + e_2 - e_3).
    """
    char = gl_character(lam)
    n = 1 + q
    total = sum(lam)
    if (total - k) % n:
        return 0
    c = (total - k) // n
    w = tuple([k + c] + [c] * q)
    if q == 1:
        return char.get(w, 0)
    up = (w[0], w[1] + 1, w[2] - 1)
    return char.get(w, 0) - char.get(up, 0)


def su_normalize(v):
    """Project onto sum-zero coordinates, as exact rationals."""
    v = [Fraction(x) for x in v]
    s = sum(v) / len(v)
    return tuple(x - s for x in v)


def frobenius_line_spectrum(k, q, max_pairing):
    """Sum-zero highest weights lam of SU(1+q) with Hom_K(V_lam, C_k) != 0 and lam(H_theta) <= max_pairing."""
    n = 1 + q
    out = {}
    for lam in itertools.product(range(max_pairing + 1), repeat=n - 1):
        lam = tuple(lam) + (0,)
        if any(a < b for a, b in zip(lam, lam[1:])) or lam[0] - lam[-1] > max_pairing:
            continue
        mult = frobenius_line_multiplicity(lam, k, q)
        if mult:
            out[su_normalize(lam)] = mult
    return out


# -- roots -------------------------------------------------------------------


def strongly_orthogonal_max(noncompact, roots):
    """Size of the largest set of pairwise strongly orthogonal roots, by brute force."""
    roots = set(roots)

    def ok(a, b):
        s = tuple(x + y for x, y in zip(a, b))
        d = tuple(x - y for x, y in zip(a, b))
        return s not in roots and d not in roots and sum(x * y for x, y in zip(a, b)) == 0

    best = 0
    nc = list(noncompact)
    for size in range(1, len(nc) + 1):
        found = any(all(ok(a, b) for a, b in itertools.combinations(c, 2))
                    for c in itertools.combinations(nc, size))
        if not found:
            break
        best = size
    return best


# -- integrals ---------------------------------------------------------------


def beta(a, b):
    return float(special.beta(a, b))


def selberg_numeric(r, alpha, beta_, gamma):
    """Selberg integral by scipy quadrature (r = 1 or 2)."""
    if r == 1:
        val, _ = integrate.quad(lambda s: s ** (alpha - 1) * (1 - s) ** (beta_ - 1), 0, 1)
        return val

    def f(y, x):
        return (x * y) ** (alpha - 1) * ((1 - x) * (1 - y)) ** (beta_ - 1) * abs(x - y) ** (2 * gamma)

    val, _ = integrate.dblquad(f, 0, 1, 0, 1, epsabs=1e-12, epsrel=1e-10)
    return val


def cp1_line_mass(m, k):
    """||p_m||^2 for L_k on CP^1: pi * B(m+1, m+k+1)."""
    return math.pi * beta(m + 1, m + k + 1)


def cp1_cotangent_mass(m):
    """||q^m (x) v||^2 for the cotangent bundle of CP^1: pi * B(m+1, m-1), infinite for m <= 1."""
    return math.inf if m <= 1 else math.pi * beta(m + 1, m - 1)


def grassmannian_volume(p, q):
    """Volume of Gr(p, p+q) in the normalization where CP^1 has volume pi."""
    return math.pi ** (p * q) * math.prod(
        math.factorial(i - 1) / math.factorial(q + i - 1) for i in range(1, p + 1)
    )


def singular_values(z):
    return np.linalg.svd(z, compute_uv=False)
