import numpy as np
import pytest

from app.core.complexpoly import ComplexPoly
from app.core.domains import RegularPolygon, UnitDisk
from app.core.errors import PoleListUnavailableError, PoleProximityError, ZeroPoleCollisionError
from app.core.rational import (
    from_poles_zeros,
    from_polynomials,
    multiply,
    polynomial,
    taylor_coeffs,
    validate_poles_outside,
)


def test_factored_and_expanded_forms_agree():
    R = from_poles_zeros(zeros=[0.5, -0.2j], poles=[2.0, 1.5j], scale=3.0)
    assert R.factored
    assert R.degree == 2
    w = np.array([0.1, 0.3 - 0.7j, -1.2])
    expanded = R.numerator(w) / R.denominator(w)
    assert np.allclose(R(w), expanded)


def test_derivative_matches_finite_difference():
    R = from_poles_zeros(zeros=[0.5, 0.1 + 0.1j, 0.0], poles=[2.0, -1.5j])
    w0, h = 0.3 + 0.2j, 1e-6
    numeric = (R(w0 + h) - R(w0 - h)) / (2 * h)
    assert abs(R.deriv(w0) - numeric) < 1e-7
    expanded = from_polynomials(R.numerator, R.denominator)
    assert abs(expanded.deriv(w0) - R.deriv(w0)) < 1e-10


def test_collision_and_pole_guards():
    with pytest.raises(ZeroPoleCollisionError):
        from_poles_zeros(zeros=[1.0], poles=[1.0])
    with pytest.raises(ValueError):
        from_poles_zeros(zeros=[1.0], poles=[2.0], scale=0.0)
    R = from_poles_zeros(zeros=[], poles=[2.0])
    with pytest.raises(PoleProximityError):
        R(2.0)


def test_taylor_coefficients_by_series_division():
    R = from_polynomials(ComplexPoly([1.0]), ComplexPoly([1.0, -0.5]))
    assert np.allclose(taylor_coeffs(R, 5), 0.5 ** np.arange(6))
    with pytest.raises(PoleProximityError):
        taylor_coeffs(from_poles_zeros(zeros=[], poles=[0.0]), 3)


def test_multiply_keeps_factored_form():
    R1 = from_poles_zeros(zeros=[0.5], poles=[2.0])
    R2 = from_poles_zeros(zeros=[-0.5], poles=[-3.0], scale=2.0)
    R = multiply(R1, R2)
    assert R.factored
    w = np.array([0.2, 0.1j])
    assert np.allclose(R(w), R1(w) * R2(w))


def test_pole_validation_against_the_disk():
    d = UnitDisk()
    assert validate_poles_outside(d, polynomial(ComplexPoly([0.0, 1.0])))
    assert validate_poles_outside(d, from_poles_zeros(zeros=[0.0], poles=[2.0]))
    assert not validate_poles_outside(d, from_poles_zeros(zeros=[0.0], poles=[0.5]))
    assert not validate_poles_outside(d, from_poles_zeros(zeros=[0.0], poles=[1.05]), margin=0.1)
    with pytest.raises(PoleListUnavailableError):
        validate_poles_outside(d, from_polynomials(ComplexPoly([1.0]), ComplexPoly([2.0, -1.0])))


def test_pole_validation_against_a_polygon():
    square = RegularPolygon(4)
    # the vertex 1 lies on the boundary, 0.9 inside, 1.2 outside
    assert not validate_poles_outside(square, from_poles_zeros(zeros=[0.0], poles=[0.9]))
    assert not validate_poles_outside(square, from_poles_zeros(zeros=[0.0], poles=[1.0]))
    assert validate_poles_outside(square, from_poles_zeros(zeros=[0.0], poles=[1.2]))


def test_degree_is_additive_under_multiply(rng):
    def random_factor(k):
        zeros = 0.9 * rng.random(k) * np.exp(2j * np.pi * rng.random(k))
        poles = (1.5 + rng.random(k)) * np.exp(2j * np.pi * rng.random(k))
        return from_poles_zeros(zeros=zeros, poles=poles)

    R1, R2 = random_factor(2), random_factor(3)
    assert multiply(R1, R2).degree == R1.degree + R2.degree == 5
    expanded = multiply(from_polynomials(R1.numerator, R1.denominator), R2)
    assert expanded.degree == 5
    p = polynomial(ComplexPoly([1.0, 2.0, 3.0]))
    assert multiply(p, R2).degree == 2 + 3
