import math

import numpy as np
import pytest

from nearhol.bundles import cotangent_bundle, line_bundle
from nearhol.decomp import highest_weight_polynomial, minor_l2_condition
from nearhol.errors import DomainError, ParameterError
from nearhol.integrals import (
    CONVERGENT,
    DIVERGENT,
    INCONCLUSIVE,
    QuadratureSpec,
    classify_ladder,
    l2_density,
    monte_carlo_mass,
    norm_probe,
    selberg_bound,
    selberg_closed_form,
    selberg_exponents,
    selberg_quadrature,
)
from nearhol.jordan import minor_poly, model_for
from nearhol.jordan.polymap import Const, PolyMap
from nearhol.rootdata import HermitianType, build_root_data, structure_constants
from nearhol.weights import partitions
from oracles import cp1_cotangent_mass, cp1_line_mass, grassmannian_volume, selberg_numeric

ONE = PolyMap(Const(1.0))


def test_classify_ladder():
    radii = [1, 2, 4, 8]
    assert classify_ladder([1.0, 1.5, 1.5 + 1e-9, 1.5 + 2e-9], radii, 1e-6)[0] == CONVERGENT
    assert classify_ladder([1.0, 2.0, 3.0, 4.0], radii, 1e-6)[0] == DIVERGENT
    assert classify_ladder([1.0, 2.0, math.inf, math.inf], radii, 1e-6)[0] == DIVERGENT
    assert classify_ladder([1.0, 2.0, 2.5, 2.6], radii, 1e-6)[0] == INCONCLUSIVE
    _, slope = classify_ladder([1.0, 4.0, 16.0, 64.0], radii, 1e-6)
    assert np.isclose(slope, 2.0)


def test_quadrature_spec_validation():
    for bad in (dict(scheme="simpson"), dict(nodes=4), dict(radii=(1.0, 2.0)),
                dict(radii=(1.0, 4.0, 2.0)), dict(tol=0.0), dict(samples=0)):
        with pytest.raises(ParameterError):
            QuadratureSpec(**bad)


@pytest.mark.parametrize("r,alpha,beta,gamma", [
    (1, 1.0, 1.0, 0.0), (1, 2.5, 0.7, 0.0), (2, 1.0, 1.0, 1.0), (2, 3.0, 2.0, 0.5), (2, 2.0, 4.0, 1.5),
])
def test_selberg_closed_vs_numeric(r, alpha, beta, gamma):
    exact = selberg_closed_form(r, alpha, beta, gamma)
    assert exact == pytest.approx(selberg_numeric(r, alpha, beta, gamma), rel=1e-7)
    quad = selberg_quadrature(r, alpha, beta, gamma)
    assert quad.classification == CONVERGENT
    assert quad.value == pytest.approx(exact, rel=1e-6)


def test_selberg_divergent_exponent():
    assert selberg_closed_form(1, 1.0, 0.0, 0.0) == math.inf
    v = selberg_quadrature(1, 1.0, 0.0, 0.0)
    assert v.classification == DIVERGENT and v.value == math.inf


@pytest.mark.parametrize("space", ["I:1,1", "I:2,2", "I:1,3", "II:4", "III:2", "EVII"])
def test_selberg_bound_matches_minor_condition(space):
    data = build_root_data(HermitianType.parse(space))
    consts = structure_constants(data)
    for bundle in [line_bundle(k, data) for k in range(-3, 4)] + [cotangent_bundle(data)]:
        for mm in partitions(consts[0], 3):
            finite = selberg_bound(mm, bundle, consts).finite
            assert finite == minor_l2_condition(mm, bundle)


def test_selberg_exponents_errors():
    m = model_for("I:2,2")
    with pytest.raises(DomainError):
        selberg_exponents((1,), line_bundle(0, m.data), 2, 2, 0)
    with pytest.raises(ParameterError):
        selberg_bound((1, 0), line_bundle(0, m.data), structure_constants(m.data), method="guess")


def test_cp1_volume():
    m = model_for("I:1,1")
    v = norm_probe(m, line_bundle(0, m.data), ONE)
    assert v.classification == CONVERGENT
    assert abs(v.value - math.pi) < 1e-3


@pytest.mark.parametrize("mm", [0, 1, 2, 3])
@pytest.mark.parametrize("k", [0, 1, 2])
def test_cp1_line_masses(mm, k):
    m = model_for("I:1,1")
    v = norm_probe(m, line_bundle(k, m.data), minor_poly(m, (mm,)))
    assert v.value == pytest.approx(cp1_line_mass(mm, k), rel=1e-5)


@pytest.mark.parametrize("mm", [1, 2, 3])
def test_cp1_cotangent_masses(mm):
    m = model_for("I:1,1")
    cot = cotangent_bundle(m.data)
    v = norm_probe(m, cot, highest_weight_polynomial(cot, (mm,), m))
    want = cp1_cotangent_mass(mm)
    if math.isinf(want):
        assert v.classification == DIVERGENT
    else:
        assert v.classification == CONVERGENT
        assert v.value == pytest.approx(want, rel=1e-5)


@pytest.mark.parametrize("space,p,q", [("I:1,2", 1, 2), ("I:2,2", 2, 2), ("I:2,3", 2, 3)])
def test_grassmannian_volumes(space, p, q):
    m = model_for(space)
    v = norm_probe(m, line_bundle(0, m.data), ONE)
    assert v.classification == CONVERGENT
    assert v.value == pytest.approx(grassmannian_volume(p, q), rel=1e-5)


def test_density_at_origin():
    for space in ("I:1,1", "I:2,2", "III:2"):
        m = model_for(space)
        z = np.zeros((1,) + m.plus_shape)
        p = minor_poly(m, (2,) + (1,) * (m.r - 1))
        expected = abs(p(z, m.qmap(z))[0]) ** 2
        assert np.isclose(l2_density(m, line_bundle(1, m.data), p, z)[0], expected)
        v = np.ones((1,) + m.minus_shape)  # symmetric, so valid for III too
        cot = cotangent_bundle(m.data)
        dens = l2_density(m, cot, ONE.tensor(v[0]), z)[0]
        assert np.isclose(dens, np.real(m.inner(v, v))[0])


def test_cotangent_density_needs_vector_values():
    m = model_for("I:1,1")
    with pytest.raises(DomainError):
        l2_density(m, cotangent_bundle(m.data), ONE, np.zeros((1, 1, 1)))


def test_mc_vs_radial():
    m = model_for("I:1,2")
    spec = QuadratureSpec(scheme="mc", radii=(4, 16, 64, 256, 1024), tol=1e-3, samples=40000, seed=3)
    mc = monte_carlo_mass(m, line_bundle(0, m.data), ONE, spec)
    assert abs(mc.value - grassmannian_volume(1, 2)) < 4 * mc.stderr


def test_mc_thread_independent(monkeypatch):
    m = model_for("I:2,2")
    spec = QuadratureSpec(scheme="mc", radii=(2, 4, 8), tol=1.0, samples=5000, seed=9)
    monkeypatch.setenv("NEARHOL_THREADS", "1")
    a = monte_carlo_mass(m, line_bundle(0, m.data), ONE, spec)
    monkeypatch.setenv("NEARHOL_THREADS", "4")
    b = monte_carlo_mass(m, line_bundle(0, m.data), ONE, spec)
    assert a.ladder_estimates == b.ladder_estimates and a.stderr == b.stderr


def test_probe_rank3_uses_mc():
    m = model_for("III:3")
    spec = QuadratureSpec(scheme="mc", radii=(4, 16, 64, 256, 1024), tol=1e-2, samples=20000, seed=1)
    v = norm_probe(m, line_bundle(0, m.data), ONE, spec)
    assert v.stderr > 0
    assert v.classification == CONVERGENT
