"""Finite Blaschke products"""

from dataclasses import dataclass
from typing import Callable, Sequence
import logging
import math

import numpy as np

from app.config import settings
from app.core.errors import FrontFactorError, TaylorBudgetError, ZeroProximityError

logger = logging.getLogger(__name__)

ZERO_GUARD = 1e-12
UNIMODULAR_TOL = 1e-12

# Taylor sections by sampling on |z| = r
TAYLOR_GUARD = 1e-5
TAYLOR_ALIAS_TOL = 1e-13
TAYLOR_R_MIN = 0.3
TAYLOR_R_MAX = 0.99


@dataclass(frozen=True, eq=False)
class BlaschkeProduct:
    """front_factor * prod_k f_k(z) with f_k(z) = (a_k - z)/(1 - conj(a_k) z),
    and f_k(z) = z for a_k = 0."""

    zeros: np.ndarray
    front_factor: complex = 1.0

    def __post_init__(self):
        zeros = np.atleast_1d(np.asarray(self.zeros, dtype=complex)).ravel().copy()
        zeros.setflags(write=False)
        object.__setattr__(self, "zeros", zeros)
        object.__setattr__(self, "front_factor", complex(self.front_factor))

    @property
    def degree(self) -> int:
        return int(self.zeros.size)

    def __call__(self, z):
        return evaluate(self, z)

    def deriv(self, z):
        return deriv(self, z)


def from_zeros(zeros: Sequence[complex], front_factor: complex = 1.0) -> BlaschkeProduct:
    zeros = np.atleast_1d(np.asarray(zeros, dtype=complex)).ravel()
    moduli = np.abs(zeros)
    bad = np.flatnonzero(moduli > 1.0 - ZERO_GUARD)
    if bad.size:
        raise ZeroProximityError(int(bad[0]), float(moduli[bad[0]]))
    if abs(abs(front_factor) - 1.0) > UNIMODULAR_TOL:
        raise FrontFactorError(f"front factor {front_factor!r} is not unimodular")
    return BlaschkeProduct(zeros=zeros, front_factor=front_factor)


def _chunks(z: np.ndarray, degree: int):
    step = max(1, settings.EVAL_CHUNK // max(degree, 1))
    for start in range(0, z.size, step):
        yield slice(start, start + step)


def _factors(B: BlaschkeProduct, z: np.ndarray):
    a = B.zeros[:, None]
    sign = np.where(B.zeros == 0, -1.0, 1.0)[:, None]
    denom = 1.0 - np.conj(a) * z[None, :]
    values = sign * (a - z[None, :]) / denom
    slopes = -sign * (1.0 - np.abs(a) ** 2) / denom ** 2
    return values, slopes


def product_rule(values: np.ndarray, slopes: np.ndarray) -> np.ndarray:
    """sum_k slopes_k * prod_{j != k} values_j along axis 0, without division"""
    ones = np.ones((1,) + values.shape[1:], dtype=complex)
    prefix = np.cumprod(np.vstack([ones, values[:-1]]), axis=0)
    suffix = np.cumprod(np.vstack([ones, values[::-1][:-1]]), axis=0)[::-1]
    return np.sum(slopes * prefix * suffix, axis=0)


def _as_output(flat: np.ndarray, z):
    z = np.asarray(z)
    if z.ndim == 0:
        return complex(flat[0])
    return flat.reshape(z.shape)


def evaluate(B: BlaschkeProduct, z):
    flat = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    out = np.full(flat.shape, B.front_factor, dtype=complex)
    if B.degree:
        for sl in _chunks(flat, B.degree):
            values, _ = _factors(B, flat[sl])
            out[sl] *= np.prod(values, axis=0)
    return _as_output(out, z)


def deriv(B: BlaschkeProduct, z):
    """B'(z) by the product rule with prefix/suffix products (no division by B)"""
    flat = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
    out = np.zeros(flat.shape, dtype=complex)
    if B.degree:
        for sl in _chunks(flat, B.degree):
            values, slopes = _factors(B, flat[sl])
            out[sl] = B.front_factor * product_rule(values, slopes)
    return _as_output(out, z)


def taylor_coeffs(B: BlaschkeProduct, m: int) -> np.ndarray:
    """c_0..c_m of B at 0 by discrete Fourier inversion on |z| = r"""
    if m < 0:
        raise ValueError("m must be non-negative")
    if B.degree == 0:
        out = np.zeros(m + 1, dtype=complex)
        out[0] = B.front_factor
        return out

    r = TAYLOR_R_MIN if m == 0 else max(TAYLOR_R_MIN, TAYLOR_GUARD ** (1.0 / m))
    if r > TAYLOR_R_MAX:
        raise TaylorBudgetError(f"m={m} needs sampling radius {r:.6f} > {TAYLOR_R_MAX}")
    alias_nodes = math.ceil(math.log(TAYLOR_ALIAS_TOL) / math.log(r))
    n_nodes = 1 << (max(4 * (m + 1), alias_nodes) - 1).bit_length()

    samples = evaluate(B, r * np.exp(2j * np.pi * np.arange(n_nodes) / n_nodes))
    coeffs = np.fft.fft(samples)[: m + 1] / n_nodes
    return coeffs / np.power(r, np.arange(m + 1))


@dataclass(frozen=True)
class BlochEstimate:
    """Grid lower bound for sup (1 - |z|^2) |f'(z)|"""

    value: float
    r_at: float
    theta_at: float
    radii_count: int
    angle_count: int


def bloch_seminorm(f_prime: Callable[[np.ndarray], np.ndarray], r_grid: Sequence[float], angle_count: int = 256) -> BlochEstimate:
    radii = np.asarray(r_grid, dtype=float)
    if radii.size == 0 or np.any(radii < 0) or np.any(radii >= 1):
        raise ValueError("r_grid must be a non-empty subset of [0, 1)")
    thetas = 2.0 * np.pi * np.arange(angle_count) / angle_count
    best = (0.0, float(radii[0]), 0.0)
    for r in radii:
        values = (1.0 - r * r) * np.abs(f_prime(r * np.exp(1j * thetas)))
        j = int(np.argmax(values))
        if values[j] > best[0]:
            best = (float(values[j]), float(r), float(thetas[j]))
    return BlochEstimate(
        value=best[0], r_at=best[1], theta_at=best[2], radii_count=int(radii.size), angle_count=angle_count
    )
