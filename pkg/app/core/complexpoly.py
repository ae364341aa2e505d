"""Dense complex polynomials and truncated power series"""

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple, Union
import logging

import numpy as np
from scipy.optimize import minimize_scalar

from app.core.errors import DegreeCapError

logger = logging.getLogger(__name__)

RUDIN_SHAPIRO_MAX_ORDER = 22

Coefficients = Union[Sequence[complex], np.ndarray]


@dataclass(frozen=True, eq=False)
class ComplexPoly:
    """Polynomial a_0 + a_1 z + ... + a_d z^d with trailing zeros stripped.

    The zero polynomial keeps a single coefficient, so ``degree`` is always
    the index of the last stored coefficient.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex)).ravel()
        nonzero = np.flatnonzero(c)
        if nonzero.size == 0:
            c = np.zeros(1, dtype=complex)
        else:
            c = c[: nonzero[-1] + 1].copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, z):
        return eval_poly(self, z)

    def deriv(self, z):
        return eval_poly(derivative(self), z)

    def on_circle_grid(self, r: float, n_nodes: int, idx: Optional[np.ndarray] = None) -> np.ndarray:
        """Values at r*exp(2*pi*i*j/n_nodes), j in ``idx`` (all nodes by default).

        Coefficients beyond ``n_nodes`` are folded onto their aliases, so the
        result is exact for any degree.
        """
        scaled = self.coeffs * np.power(float(r), np.arange(self.coeffs.size))
        pad = (-scaled.size) % n_nodes
        folded = np.concatenate([scaled, np.zeros(pad, dtype=complex)]).reshape(-1, n_nodes).sum(axis=0)
        values = n_nodes * np.fft.ifft(folded)
        return values if idx is None else values[idx]

    def __add__(self, other: "ComplexPoly") -> "ComplexPoly":
        n = max(self.coeffs.size, other.coeffs.size)
        out = np.zeros(n, dtype=complex)
        out[: self.coeffs.size] += self.coeffs
        out[: other.coeffs.size] += other.coeffs
        return ComplexPoly(out)

    def __neg__(self) -> "ComplexPoly":
        return ComplexPoly(-self.coeffs)

    def __sub__(self, other: "ComplexPoly") -> "ComplexPoly":
        return self + (-other)

    def __mul__(self, other) -> "ComplexPoly":
        if isinstance(other, ComplexPoly):
            return ComplexPoly(np.convolve(self.coeffs, other.coeffs))
        return ComplexPoly(self.coeffs * complex(other))

    __rmul__ = __mul__


def eval_poly(p: ComplexPoly, z):
    """Horner evaluation; accepts scalars or arrays"""
    return np.polyval(p.coeffs[::-1], z)


def derivative(p: ComplexPoly) -> ComplexPoly:
    if p.degree == 0:
        return ComplexPoly([0.0])
    return ComplexPoly(p.coeffs[1:] * np.arange(1, p.degree + 1))


def antiderivative(p: ComplexPoly, constant: complex = 0.0) -> ComplexPoly:
    tail = p.coeffs / np.arange(1, p.degree + 2)
    return ComplexPoly(np.concatenate([[constant], tail]))


def truncate(coeffs: Union[Coefficients, ComplexPoly], n: int) -> ComplexPoly:
    """First n+1 coefficients of a (truncated) power series"""
    if n < 0:
        raise ValueError("truncation order must be non-negative")
    if isinstance(coeffs, ComplexPoly):
        coeffs = coeffs.coeffs
    return ComplexPoly(np.asarray(coeffs, dtype=complex)[: n + 1])


def l2_coeff_norm(p: ComplexPoly, r: float = 1.0) -> float:
    """(sum |a_k|^2 r^(2k))^(1/2), computed in coefficient space"""
    weights = np.power(float(r), 2 * np.arange(p.coeffs.size))
    return float(np.sqrt(np.sum(np.abs(p.coeffs) ** 2 * weights)))


def sup_modulus_on_circle(
    f: Callable[[np.ndarray], np.ndarray],
    r: float,
    samples: int,
    tol: float = 1e-10,
    candidates: int = 3,
    values: Optional[np.ndarray] = None,
    degree: Optional[int] = None,
) -> float:
    """Max of |f| on |z| = r: equispaced sampling, then bounded Brent/golden
    refinement inside the brackets of the best ``candidates`` nodes.

    For a polynomial of known ``degree`` d, Bernstein's |dp/dtheta| <= d max|p|
    turns an angle error tol/d into a relative value error of at most tol;
    otherwise the angle tolerance is h * tol for node spacing h.

    The returned value is always an attained modulus, hence a lower bound.
    """
    thetas = 2.0 * np.pi * np.arange(samples) / samples
    if values is None:
        values = np.abs(f(r * np.exp(1j * thetas)))
    best = float(np.max(values))
    if r == 0.0 or best == 0.0:
        return best

    h = 2.0 * np.pi / samples
    xatol = tol / degree if degree else h * tol

    def negative_modulus(t: float) -> float:
        return -float(np.abs(f(np.array([r * np.exp(1j * t)])))[0])

    for j in np.argsort(values)[-candidates:]:
        res = minimize_scalar(
            negative_modulus,
            bounds=(thetas[j] - h, thetas[j] + h),
            method="bounded",
            options={"xatol": max(xatol, 1e-14)},
        )
        best = max(best, -float(res.fun))
    return best


def sup_norm_circle(p: ComplexPoly, r: float = 1.0, tol: float = 1e-10) -> float:
    """max over theta of |p(r e^{i theta})| to relative accuracy ``tol``"""
    if tol <= 0:
        raise ValueError("tol must be positive")
    samples = max(64, 16 * (p.degree + 1))
    values = np.abs(p.on_circle_grid(r, samples))
    return sup_modulus_on_circle(p, r, samples, tol=tol, values=values, degree=p.degree)


def rudin_shapiro(m: int) -> Tuple[ComplexPoly, ComplexPoly]:
    """Rudin-Shapiro pair (P_m, Q_m), each with 2^m coefficients equal to +-1"""
    if m < 0 or m > RUDIN_SHAPIRO_MAX_ORDER:
        raise DegreeCapError(f"Rudin-Shapiro order {m} outside [0, {RUDIN_SHAPIRO_MAX_ORDER}]")
    P = np.ones(1, dtype=complex)
    Q = np.ones(1, dtype=complex)
    for _ in range(m):
        P, Q = np.concatenate([P, Q]), np.concatenate([P, -Q])
    return ComplexPoly(P), ComplexPoly(Q)


def random_sign_poly(length: int, rng: np.random.Generator, phases: bool = False) -> ComplexPoly:
    """Random +-1 (or random unimodular) coefficients of the given length"""
    if phases:
        return ComplexPoly(np.exp(2j * np.pi * rng.random(length)))
    return ComplexPoly(rng.choice([-1.0, 1.0], size=length))
