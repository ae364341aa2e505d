import numpy as np
import pytest

from app.config import settings
from app.core import blaschke, schur
from app.core.errors import DegreeCapError, NotSchurClassError, SchurEarlyTermination
from app.core.rational import taylor_coeffs


GAMMAS = np.array([0.5, -0.3j, 0.2 + 0.1j, -0.6])


def test_roundtrip_recovers_parameters():
    B = schur.reconstruct(schur.SchurParameters(GAMMAS))
    recovered = schur.schur_parameters(taylor_coeffs(B, GAMMAS.size - 1))
    assert np.allclose(recovered.gammas, GAMMAS, atol=1e-10)


def test_reconstruction_is_a_blaschke_product(unit_circle):
    B = schur.reconstruct(schur.SchurParameters(GAMMAS, tail_phase=1j))
    assert B.degree == GAMMAS.size
    assert B.denominator.coeffs[0] == pytest.approx(1.0)
    assert np.allclose(np.abs(B(unit_circle)), 1.0, atol=1e-12)


def test_nested_evaluation_matches_expanded_form():
    params = schur.SchurParameters(GAMMAS, tail_phase=np.exp(0.4j))
    B = schur.reconstruct(params)
    z = np.array([0.0, 0.3 + 0.4j, -0.9j, 0.95])
    assert np.allclose(params(z), B(z), atol=1e-12)
    assert np.allclose(params.deriv(z), B.deriv(z), atol=1e-10)
    assert isinstance(params.evaluate(0.5), complex)


def test_parameter_validation():
    with pytest.raises(ValueError):
        schur.SchurParameters([1.0])
    with pytest.raises(ValueError):
        schur.SchurParameters([0.5], tail_phase=0.5)


def test_early_termination_on_blaschke_input():
    # z has Taylor coefficients 0, 1, 0: a Blaschke product of degree 1
    with pytest.raises(SchurEarlyTermination) as info:
        schur.schur_parameters([0.0, 1.0, 0.0])
    assert info.value.step == 1
    assert info.value.params.degree == 1
    assert info.value.params.tail_phase == pytest.approx(1.0)


def test_not_schur_class():
    with pytest.raises(NotSchurClassError) as info:
        schur.schur_parameters([2.0, 0.0])
    assert info.value.step == 0


def test_length_cap():
    with pytest.raises(DegreeCapError):
        schur.schur_parameters(np.zeros(settings.SCHUR_MAX_LENGTH + 1))


def test_blaschke_from_taylor_matches_section():
    coeffs = [0.5, 0.25, -0.1]
    B = schur.blaschke_from_taylor(coeffs)
    assert np.allclose(taylor_coeffs(B, 2), coeffs, atol=1e-12)
    assert B.degree <= 3


def test_random_blaschke_product_roundtrip(rng, unit_circle):
    n = 5
    zeros = 0.35 * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))
    B = blaschke.from_zeros(zeros)
    with pytest.raises(SchurEarlyTermination) as info:
        schur.schur_parameters(blaschke.taylor_coeffs(B, n))
    assert info.value.step == n
    R = schur.reconstruct(info.value.params)
    assert R.degree == n
    z = np.concatenate([unit_circle, 0.5 * unit_circle, [0.0]])
    assert np.allclose(R(z), B(z), atol=1e-8)


@pytest.mark.parametrize("phase", [1.0, 1j, np.exp(2.0j), -1.0])
def test_tail_phase_leaves_parameters_and_section_unchanged(rng, phase):
    gammas = 0.7 * np.sqrt(rng.random(4)) * np.exp(2j * np.pi * rng.random(4))
    params = schur.SchurParameters(gammas).with_tail(phase)
    B = schur.reconstruct(params)
    assert np.allclose(schur.schur_parameters(taylor_coeffs(B, 3)).gammas, gammas, atol=1e-9)

    coeffs = taylor_coeffs(schur.reconstruct(schur.SchurParameters(gammas)), 3)
    rotated = schur.blaschke_from_taylor(coeffs, tail_phase=phase)
    assert np.allclose(taylor_coeffs(rotated, 3), coeffs, atol=1e-9)
    if phase != 1.0:
        assert abs(rotated(0.5) - schur.blaschke_from_taylor(coeffs)(0.5)) > 1e-6
