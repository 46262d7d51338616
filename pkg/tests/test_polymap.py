import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nearhol.errors import DomainError
from nearhol.jordan.polymap import (
    Affine,
    Const,
    Det,
    MatMul,
    Mul,
    Pfaffian,
    PolyMap,
    Power,
    VarX,
    VarY,
    adjugate,
    pfaffian,
    pfaffian_gradient,
)


def antisym(rng, n, batch=3):
    a = rng.normal(size=(batch, n, n)) + 1j * rng.normal(size=(batch, n, n))
    return a - np.swapaxes(a, -1, -2)


@settings(max_examples=40, deadline=None)
@given(n=st.sampled_from([2, 4, 6]), seed=st.integers(0, 2**32 - 1))
def test_pfaffian_squared_is_det(n, seed):
    a = antisym(np.random.default_rng(seed), n)
    assert np.allclose(pfaffian(a) ** 2, np.linalg.det(a))


def test_pfaffian_small():
    a = np.array([[0, 2.0], [-2.0, 0]])
    assert pfaffian(a) == 2.0
    assert pfaffian(np.zeros((3, 3))) == 0
    # Pf of the standard symplectic block sum is 1
    j = np.kron(np.eye(2), np.array([[0, 1.0], [-1.0, 0]]))
    assert np.isclose(pfaffian(j), 1.0)


def test_pfaffian_gradient_fd():
    rng = np.random.default_rng(4)
    a, d = antisym(rng, 4, 1)[0], antisym(rng, 4, 1)[0]
    h = 1e-6
    fd = (pfaffian(a + h * d) - pfaffian(a - h * d)) / (2 * h)
    g = pfaffian_gradient(a)
    assert np.isclose(np.sum(np.triu(g, 1) * d), fd)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_adjugate(n):
    rng = np.random.default_rng(n)
    a = rng.normal(size=(5, n, n)) + 1j * rng.normal(size=(5, n, n))
    expected = np.linalg.inv(a) * np.linalg.det(a)[:, None, None]
    assert np.allclose(adjugate(a), expected)
    # singular input is still fine
    s = np.zeros((n, n)); s[0, 0] = 1.0
    assert np.all(np.isfinite(adjugate(s)))


def _fd(p, x, y, dx, dy, h=1e-6):
    return (p(x + h * dx, y + h * dy) - p(x - h * dx, y - h * dy)) / (2 * h)


def test_jvp_matches_finite_differences():
    rng = np.random.default_rng(0)
    shape = (4, 2, 3)
    x = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    y = rng.normal(size=(4, 3, 2)) + 1j * rng.normal(size=(4, 3, 2))
    dx = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    dy = rng.normal(size=(4, 3, 2)) + 1j * rng.normal(size=(4, 3, 2))
    eye = np.eye(2)
    delta = Det(Affine(lambda m: -m, MatMul(VarX(), VarY()), const=eye))
    p = PolyMap(Power(delta, 3) * Det(VarX() @ VarY()) + 2.0, y_only=False)
    val, tan = p.jvp(x, y, dx, dy)
    assert np.allclose(val, p(x, y))
    assert np.allclose(tan, _fd(p, x, y, dx, dy), rtol=1e-6, atol=1e-6)


def test_pfaffian_node_jvp():
    rng = np.random.default_rng(1)
    y, dy = antisym(rng, 4), antisym(rng, 4)
    x = np.zeros_like(y)
    p = PolyMap(Pfaffian(VarY()))
    val, tan = p.jvp(x, y, np.zeros_like(y), dy)
    assert np.allclose(val, pfaffian(y))
    assert np.allclose(tan, _fd(p, x, y, np.zeros_like(y), dy), atol=1e-6)


def test_constant_broadcasts_over_batch():
    p = PolyMap(Const(3.0))
    out = p(np.zeros((5, 1, 1)), np.zeros((5, 1, 1)))
    assert out.shape == (5,) and np.all(out == 3.0)
    _, tan = p.jvp(np.zeros((5, 1, 1)), np.zeros((5, 1, 1)), np.ones((5, 1, 1)), np.ones((5, 1, 1)))
    assert np.all(tan == 0)


def test_products_and_tensor():
    y = np.array([[[2.0]], [[-1.0 + 1j]]])
    x = np.zeros_like(y)
    p = PolyMap(Det(VarY()))
    q = p * p
    assert q.codomain == "scalar"
    assert np.allclose(q(x, y), y[:, 0, 0] ** 2)
    v = np.array([[1.0, 0.5]])
    t = p.tensor(v)
    assert t.codomain == "minus"
    assert np.allclose(t(x, y), y[:, 0, 0][:, None, None] * v)
    assert (t * p).codomain == "minus"
    assert p.y_only and not PolyMap(Det(VarX()), y_only=False).y_only


def test_arithmetic_operators():
    y = np.array([[[3.0]]])
    x = np.array([[[2.0]]])
    a, b = Det(VarX()), Det(VarY())
    assert np.isclose(PolyMap(a - b)(x, y)[0], -1)
    assert np.isclose(PolyMap(1 - b)(x, y)[0], -2)
    assert np.isclose(PolyMap(-a)(x, y)[0], -2)
    assert np.isclose(PolyMap(a ** 0)(x, y)[0], 1)


def test_invalid_constructions():
    with pytest.raises(DomainError):
        Power(Det(VarY()), -1)
    with pytest.raises(DomainError):
        Power(VarY(), 2)
    with pytest.raises(DomainError):
        Mul(VarX(), VarY())
    with pytest.raises(DomainError):
        Det(VarX()) + VarY()
    with pytest.raises(DomainError):
        PolyMap(Const(1.0), codomain="plus")
