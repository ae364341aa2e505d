import numpy as np
import pytest

from app.core.complexpoly import (
    ComplexPoly,
    antiderivative,
    derivative,
    l2_coeff_norm,
    random_sign_poly,
    rudin_shapiro,
    sup_modulus_on_circle,
    sup_norm_circle,
    truncate,
)
from app.core.errors import DegreeCapError


def test_trailing_zeros_are_stripped():
    p = ComplexPoly([1.0, 2.0, 0.0, 0.0])
    assert p.degree == 1
    assert ComplexPoly([0.0, 0.0]).degree == 0


def test_arithmetic():
    p = ComplexPoly([1.0, 1.0])
    q = ComplexPoly([1.0, -1.0])
    assert np.allclose((p * q).coeffs, [1.0, 0.0, -1.0])
    assert np.allclose((p + q).coeffs, [2.0])
    assert np.allclose((p - q).coeffs, [0.0, 2.0])
    assert np.allclose((2.0 * p).coeffs, [2.0, 2.0])


def test_circle_grid_folds_high_degrees(rng):
    coeffs = rng.standard_normal(40) + 1j * rng.standard_normal(40)
    p = ComplexPoly(coeffs)
    nodes = 16
    z = 0.9 * np.exp(2j * np.pi * np.arange(nodes) / nodes)
    assert np.allclose(p.on_circle_grid(0.9, nodes), p(z), atol=1e-10)
    assert np.allclose(p.on_circle_grid(0.9, nodes, np.array([3, 5])), p(z[[3, 5]]), atol=1e-10)


def test_derivative_and_antiderivative():
    p = ComplexPoly([1.0, 2.0, 3.0])
    assert np.allclose(derivative(p).coeffs, [2.0, 6.0])
    assert np.allclose(antiderivative(p, 5.0).coeffs, [5.0, 1.0, 1.0, 1.0])
    assert np.allclose(derivative(antiderivative(p)).coeffs, p.coeffs)
    assert derivative(ComplexPoly([4.0])).degree == 0
    assert p.deriv(1.0) == pytest.approx(8.0)


def test_truncate():
    assert np.allclose(truncate([1.0, 2.0, 3.0, 4.0], 1).coeffs, [1.0, 2.0])
    with pytest.raises(ValueError):
        truncate([1.0], -1)


def test_l2_coeff_norm():
    assert l2_coeff_norm(ComplexPoly([3.0, 4.0])) == pytest.approx(5.0)
    assert l2_coeff_norm(ComplexPoly([3.0, 4.0]), r=0.5) == pytest.approx(np.sqrt(9.0 + 4.0))


def test_sup_norm_circle():
    assert sup_norm_circle(ComplexPoly([1.0, 1.0])) == pytest.approx(2.0, abs=1e-12)
    assert sup_norm_circle(ComplexPoly([0.0, 0.0, 1.0]), r=0.5) == pytest.approx(0.25, abs=1e-12)
    with pytest.raises(ValueError):
        sup_norm_circle(ComplexPoly([1.0]), tol=0.0)


@pytest.mark.parametrize("d", [0, 7, 200])
def test_parseval(rng, d):
    p = ComplexPoly(rng.standard_normal(d + 1) + 1j * rng.standard_normal(d + 1))
    samples = p.on_circle_grid(1.0, 64 * (d + 1))
    rms = np.sqrt(np.mean(np.abs(samples) ** 2))
    assert rms == pytest.approx(l2_coeff_norm(p), rel=1e-10)


def test_sup_norm_is_nondecreasing_in_r(rng):
    p = ComplexPoly(rng.standard_normal(31) + 1j * rng.standard_normal(31))
    sups = [sup_norm_circle(p, r) for r in np.linspace(0.1, 1.0, 10)]
    for inner, outer in zip(sups, sups[1:]):
        assert outer >= inner * (1.0 - 1e-9)


@pytest.mark.parametrize("d", [5, 40])
@pytest.mark.parametrize("tol", [1e-6, 1e-10])
def test_sup_norm_meets_relative_tolerance(d, tol):
    # |1 + e^{ia} z^d| peaks at 2 where d theta = -a, off the sampling grid
    coeffs = np.zeros(d + 1, dtype=complex)
    coeffs[0], coeffs[d] = 1.0, np.exp(0.37j)
    assert abs(sup_norm_circle(ComplexPoly(coeffs), tol=tol) - 2.0) <= 2.0 * tol


def test_sup_refinement_finds_off_grid_maximum():
    # peak of |1 + e^{-i a} z| at theta = a, between grid nodes
    a = 0.123
    value = sup_modulus_on_circle(lambda z: 1.0 + np.exp(-1j * a) * z, 1.0, 16)
    assert value == pytest.approx(2.0, abs=1e-9)


@pytest.mark.parametrize("m", [0, 1, 4, 7])
def test_rudin_shapiro_pair(m):
    P, Q = rudin_shapiro(m)
    assert P.coeffs.size == 2 ** m
    assert np.all(np.abs(P.coeffs) == 1.0)
    z = np.exp(2j * np.pi * np.arange(64) / 64)
    assert np.allclose(np.abs(P(z)) ** 2 + np.abs(Q(z)) ** 2, 2.0 ** (m + 1))


def test_rudin_shapiro_order_cap():
    with pytest.raises(DegreeCapError):
        rudin_shapiro(23)


def test_random_sign_poly(rng):
    signs = random_sign_poly(32, rng)
    assert set(np.real(signs.coeffs)) <= {-1.0, 1.0}
    phases = random_sign_poly(32, rng, phases=True)
    assert np.allclose(np.abs(phases.coeffs), 1.0)
