"""Rational functions in the w-plane with pole bookkeeping"""

from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional, Sequence
import logging

import numpy as np
from scipy.signal import lfilter

from app.config import settings
from app.core.blaschke import product_rule
from app.core.complexpoly import ComplexPoly, derivative, eval_poly
from app.core.errors import PoleListUnavailableError, PoleProximityError, ZeroPoleCollisionError

if TYPE_CHECKING:
    from app.core.domains import DomainMap

logger = logging.getLogger(__name__)

POLE_GUARD = 1e-10
COLLISION_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class RationalFunction:
    """numerator/denominator, optionally with the factored form
    scale * prod(w - zeros) / prod(w - poles) recorded at construction.

    ``poles`` is None when the pole list is unknown; a polynomial always has
    an empty pole list.
    """

    numerator: ComplexPoly
    denominator: ComplexPoly
    zeros: Optional[np.ndarray] = None
    poles: Optional[np.ndarray] = None
    scale: complex = 1.0

    def __post_init__(self):
        if not np.any(self.denominator.coeffs):
            raise ValueError("denominator must be a nonzero polynomial")
        poles = self.poles
        if poles is None and self.denominator.degree == 0:
            poles = np.zeros(0, dtype=complex)
        for name, value in (("zeros", self.zeros), ("poles", poles)):
            if value is not None:
                value = np.atleast_1d(np.asarray(value, dtype=complex)).ravel().copy()
                value.setflags(write=False)
            object.__setattr__(self, name, value)
        object.__setattr__(self, "scale", complex(self.scale))

    @property
    def degree(self) -> int:
        return max(self.numerator.degree, self.denominator.degree)

    @property
    def factored(self) -> bool:
        return self.zeros is not None and self.poles is not None

    def __call__(self, w):
        return evaluate(self, w)

    def deriv(self, w):
        return deriv(self, w)

    def on_circle(self, r: float, n_nodes: int, center: complex = 0.0) -> np.ndarray:
        """Values at center + r*exp(2*pi*i*j/n_nodes)"""
        return evaluate(self, center + r * np.exp(2j * np.pi * np.arange(n_nodes) / n_nodes))


def from_polynomials(numerator: ComplexPoly, denominator: Optional[ComplexPoly] = None) -> RationalFunction:
    """Expanded form only; the pole list is known just for polynomials"""
    if denominator is None:
        denominator = ComplexPoly([1.0])
    return RationalFunction(numerator=numerator, denominator=denominator)


def polynomial(p: ComplexPoly) -> RationalFunction:
    """Polynomial as a rational function with its only pole at infinity"""
    return RationalFunction(numerator=p, denominator=ComplexPoly([1.0]))


def from_poles_zeros(zeros: Sequence[complex], poles: Sequence[complex], scale: complex = 1.0) -> RationalFunction:
    zeros = np.atleast_1d(np.asarray(zeros, dtype=complex)).ravel()
    poles = np.atleast_1d(np.asarray(poles, dtype=complex)).ravel()
    if scale == 0:
        raise ValueError("scale must be nonzero")
    if zeros.size and poles.size:
        gaps = np.abs(zeros[:, None] - poles[None, :])
        if np.min(gaps) <= COLLISION_TOL:
            i, j = np.unravel_index(int(np.argmin(gaps)), gaps.shape)
            raise ZeroPoleCollisionError(
                f"zero #{i} and pole #{j} coincide at {zeros[i]!r}; simplify before constructing"
            )
    # np.poly returns highest-first monic coefficients
    numerator = ComplexPoly(complex(scale) * np.poly(zeros)[::-1]) if zeros.size else ComplexPoly([scale])
    denominator = ComplexPoly(np.poly(poles)[::-1]) if poles.size else ComplexPoly([1.0])
    return RationalFunction(numerator=numerator, denominator=denominator, zeros=zeros, poles=poles, scale=scale)


def _check_poles(R: RationalFunction, w: np.ndarray) -> None:
    if R.poles is not None:
        if R.poles.size:
            for sl in _chunks(w.size, R.poles.size):
                gaps = np.min(np.abs(w[sl, None] - R.poles[None, :]), axis=1)
                if np.min(gaps) < POLE_GUARD:
                    k = int(np.argmin(gaps))
                    raise PoleProximityError(f"w={w[sl][k]!r} lies within {POLE_GUARD} of a pole")
        return
    den = np.abs(eval_poly(R.denominator, w))
    if np.any(den <= POLE_GUARD * np.sum(np.abs(R.denominator.coeffs))):
        k = int(np.argmin(den))
        raise PoleProximityError(f"denominator vanishes numerically at w={w[k]!r}")


def _chunks(size: int, degree: int):
    step = max(1, settings.EVAL_CHUNK // max(degree, 1))
    for start in range(0, size, step):
        yield slice(start, start + step)


def _factored_terms(R: RationalFunction, w: np.ndarray):
    """Pair each zero with a pole so partial products stay bounded.

    Returns per-factor values and slopes, shape (factors, points).
    """
    k = min(R.zeros.size, R.poles.size)
    z = R.zeros[:, None]
    p = R.poles[:, None]
    x = w[None, :]
    parts_v, parts_s = [], []
    if k:
        dp = x - p[:k]
        parts_v.append((x - z[:k]) / dp)
        parts_s.append((z[:k] - p[:k]) / dp ** 2)
    if R.zeros.size > k:
        extra = x - z[k:]
        parts_v.append(extra)
        parts_s.append(np.ones_like(extra))
    if R.poles.size > k:
        dp = x - p[k:]
        parts_v.append(1.0 / dp)
        parts_s.append(-1.0 / dp ** 2)
    if not parts_v:
        return np.ones((1, w.size), dtype=complex), np.zeros((1, w.size), dtype=complex)
    return np.vstack(parts_v), np.vstack(parts_s)


def _as_output(flat: np.ndarray, w):
    w = np.asarray(w)
    if w.ndim == 0:
        return complex(flat[0])
    return flat.reshape(w.shape)


def evaluate(R: RationalFunction, w):
    flat = np.atleast_1d(np.asarray(w, dtype=complex)).ravel()
    _check_poles(R, flat)
    if R.factored:
        out = np.empty(flat.shape, dtype=complex)
        for sl in _chunks(flat.size, R.degree):
            values, _ = _factored_terms(R, flat[sl])
            out[sl] = R.scale * np.prod(values, axis=0)
    else:
        out = eval_poly(R.numerator, flat) / eval_poly(R.denominator, flat)
    return _as_output(out, w)


def deriv(R: RationalFunction, w):
    """R'(w); factored form by the product rule, expanded form by the quotient rule"""
    flat = np.atleast_1d(np.asarray(w, dtype=complex)).ravel()
    _check_poles(R, flat)
    if R.factored:
        out = np.empty(flat.shape, dtype=complex)
        for sl in _chunks(flat.size, R.degree):
            values, slopes = _factored_terms(R, flat[sl])
            out[sl] = R.scale * product_rule(values, slopes)
    else:
        n = eval_poly(R.numerator, flat)
        d = eval_poly(R.denominator, flat)
        dn = eval_poly(derivative(R.numerator), flat)
        dd = eval_poly(derivative(R.denominator), flat)
        out = (dn * d - n * dd) / d ** 2
    return _as_output(out, w)


def multiply(R1: RationalFunction, R2: RationalFunction) -> RationalFunction:
    numerator = R1.numerator * R2.numerator
    denominator = R1.denominator * R2.denominator
    if R1.factored and R2.factored:
        return RationalFunction(
            numerator=numerator,
            denominator=denominator,
            zeros=np.concatenate([R1.zeros, R2.zeros]),
            poles=np.concatenate([R1.poles, R2.poles]),
            scale=R1.scale * R2.scale,
        )
    poles = None
    if R1.poles is not None and R2.poles is not None:
        poles = np.concatenate([R1.poles, R2.poles])
    return RationalFunction(numerator=numerator, denominator=denominator, poles=poles)


def taylor_coeffs(R: RationalFunction, m: int) -> np.ndarray:
    """c_0..c_m at w = 0 by power-series division"""
    if m < 0:
        raise ValueError("m must be non-negative")
    den = R.denominator.coeffs
    if abs(den[0]) <= POLE_GUARD * np.sum(np.abs(den)):
        raise PoleProximityError("R has a pole at the origin; no Taylor expansion there")
    impulse = np.zeros(m + 1, dtype=complex)
    impulse[0] = 1.0
    return lfilter(R.numerator.coeffs, den, impulse)


def validate_poles_outside(d: "DomainMap", R: RationalFunction, margin: float = 0.0) -> bool:
    """True iff every pole is off the closed domain with clearance >= margin"""
    if R.denominator.degree == 0:
        return True
    if R.poles is None:
        raise PoleListUnavailableError(
            "pole list unknown for an expanded-form rational function; clearance undecidable"
        )
    from app.core.domains import exterior_distance

    for pole in R.poles:
        gap = exterior_distance(d, complex(pole))
        if gap <= 0.0 or gap < margin:
            logger.debug(f"Pole {pole!r} has clearance {gap:.3e} < margin {margin}")
            return False
    return True
