"""Schur algorithm: Taylor coefficients <-> Schur parameters <-> Blaschke products.

The forward recursion keeps f_j = u/v as a pair of truncated series, the same
generator-pair layout used by Toeplitz Cholesky/Levinson solvers, so each step
is O(length) and no series division is performed.
"""

from dataclasses import dataclass
from typing import Sequence
import logging

import numpy as np

from app.config import settings
from app.core.complexpoly import ComplexPoly
from app.core.errors import DegreeCapError, NotSchurClassError, SchurEarlyTermination
from app.core.rational import RationalFunction

logger = logging.getLogger(__name__)

DEGENERACY_GUARD = 1e-10
SCHUR_CLASS_SLACK = 1e-8
UNIMODULAR_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SchurParameters:
    """gamma_0..gamma_{m-1} inside the disk plus a unimodular tail gamma_m"""

    gammas: np.ndarray
    tail_phase: complex = 1.0

    def __post_init__(self):
        gammas = np.atleast_1d(np.asarray(self.gammas, dtype=complex)).ravel().copy()
        if gammas.size and np.max(np.abs(gammas)) > 1.0 - DEGENERACY_GUARD:
            raise ValueError("interior Schur parameters must satisfy |gamma| <= 1 - 1e-10")
        tail = complex(self.tail_phase)
        if abs(abs(tail) - 1.0) > UNIMODULAR_TOL:
            raise ValueError(f"tail phase {tail!r} is not unimodular")
        gammas.setflags(write=False)
        object.__setattr__(self, "gammas", gammas)
        object.__setattr__(self, "tail_phase", tail)

    @property
    def degree(self) -> int:
        return int(self.gammas.size)

    def with_tail(self, tail_phase: complex) -> "SchurParameters":
        return SchurParameters(gammas=self.gammas, tail_phase=tail_phase)

    def _nested(self, z):
        z = np.asarray(z, dtype=complex)
        f = np.full(z.shape, self.tail_phase, dtype=complex)
        fp = np.zeros(z.shape, dtype=complex)
        for g in self.gammas[::-1]:
            w = z * f
            wp = f + z * fp
            den = 1.0 + np.conj(g) * w
            f, fp = (g + w) / den, (1.0 - abs(g) ** 2) * wp / den ** 2
        return f, fp

    def evaluate(self, z):
        """B(z) by the nested recursion; every intermediate stays bounded by one"""
        f, _ = self._nested(z)
        return complex(f) if np.ndim(f) == 0 else f

    def deriv(self, z):
        _, fp = self._nested(z)
        return complex(fp) if np.ndim(fp) == 0 else fp

    __call__ = evaluate


def schur_parameters(coeffs: Sequence[complex]) -> SchurParameters:
    """Schur parameters of the series c_0 + c_1 z + ... + c_{m-1} z^{m-1}.

    Raises SchurEarlyTermination when some |gamma_j| reaches 1 - 1e-10; the
    exception carries the parameters found so far with gamma_j/|gamma_j| as tail.
    """
    u = np.atleast_1d(np.asarray(coeffs, dtype=complex)).ravel().copy()
    m = u.size
    if m > settings.SCHUR_MAX_LENGTH:
        raise DegreeCapError(f"Schur recursion capped at {settings.SCHUR_MAX_LENGTH} coefficients, got {m}")
    v = np.zeros(m, dtype=complex)
    if m:
        v[0] = 1.0

    gammas = np.zeros(m, dtype=complex)
    for j in range(m):
        gamma = u[0] / v[0]
        modulus = abs(gamma)
        if modulus > 1.0 + SCHUR_CLASS_SLACK:
            raise NotSchurClassError(j, modulus)
        if modulus >= 1.0 - DEGENERACY_GUARD:
            params = SchurParameters(gammas=gammas[:j], tail_phase=gamma / modulus)
            logger.info(f"Schur recursion terminated at step {j} of {m}")
            raise SchurEarlyTermination(j, params)
        gammas[j] = gamma
        u, v = (u - gamma * v)[1:], (v - np.conj(gamma) * u)[:-1]
        if u.size:
            scale = v[0]
            u, v = u / scale, v / scale

    return SchurParameters(gammas=gammas)


def reconstruct(params: SchurParameters) -> RationalFunction:
    """Blaschke product with the given parameters as an expanded rational function.

    Backward step: with f_{j+1} = N/D,
    f_j = (gamma_j D + z N) / (D + conj(gamma_j) z N).
    """
    num = np.array([params.tail_phase], dtype=complex)
    den = np.array([1.0], dtype=complex)
    for g in params.gammas[::-1]:
        zn = np.concatenate([[0.0], num])
        d_pad = np.concatenate([den, [0.0]])
        num, den = g * d_pad + zn, d_pad + np.conj(g) * zn
    return RationalFunction(numerator=ComplexPoly(num), denominator=ComplexPoly(den))


def blaschke_from_taylor(coeffs: Sequence[complex], tail_phase: complex = 1.0) -> RationalFunction:
    """Finite Blaschke product of degree <= m whose first m Taylor
    coefficients are ``coeffs``"""
    params = schur_parameters(coeffs)
    return reconstruct(params.with_tail(tail_phase))
