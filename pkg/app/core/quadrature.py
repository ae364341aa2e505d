"""Circle means, weighted area integrals over the disk and Hardy norms.

Area measure is dA = dx dy / pi throughout, so the unit disk has area 1.
"""

from dataclasses import dataclass
from typing import Callable, Optional, Tuple
import logging
import math

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi

from app.config import settings
from app.core.complexpoly import ComplexPoly, derivative
from app.core.errors import NonIntegrableWeightError

logger = logging.getLogger(__name__)

MIN_CIRCLE_NODES = 64
# relative floor under which node-doubling differences are roundoff
ROUNDOFF_FLOOR = 1e-13
GAUSS_ORDERS = (4, 8, 16, 32, 64)
JACOBI_ORDERS = (12, 24)
# trapezoid node count after which circle means go adaptive
ADAPTIVE_SWITCH = 1 << 14
PANEL_ORDER = 8
MAX_PANELS = 1 << 13
MIN_PANEL_WIDTH = 1e-13


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    node_count: int
    converged: bool


@dataclass(frozen=True)
class HardyNorm:
    """Lower bound for the H^p norm read off the circle of radius r_max"""

    value: float
    r_max: float
    mean: QuadratureResult


def _circle_values(f, r: float, n_nodes: int, idx: np.ndarray) -> np.ndarray:
    grid = getattr(f, "on_circle_grid", None)
    if grid is not None:
        return np.asarray(grid(r, n_nodes, idx))
    return np.asarray(f(r * np.exp(2j * np.pi * idx / n_nodes)))


def _hint(f, hint_degree: int) -> int:
    return int(hint_degree or getattr(f, "degree", 0) or 0)


def circle_mean(f, r: float, p: float = 1.0, tol: float = None, hint_degree: int = 0) -> QuadratureResult:
    """(1/2pi) int |f(r e^{it})|^p dt by the periodic trapezoid rule.

    The node count doubles from max(64, 8*hint_degree), reusing the previous
    nodes, until two successive sums differ by at most ``tol``. Past
    max(ADAPTIVE_SWITCH, 4 * start) nodes the trapezoid hands over to
    adaptive_circle_mean, whose panels also split at ``f.singular_angles``.
    """
    if tol is None:
        tol = settings.QUADRATURE_TOL
    if p <= 0:
        raise ValueError("p must be positive")
    if r < 0 or r > 1:
        raise ValueError("radius must lie in [0, 1]")
    if r == 0.0:
        value = float(np.abs(_circle_values(f, 0.0, 1, np.arange(1))[0]) ** p)
        return QuadratureResult(value=value, abs_error_estimate=0.0, node_count=1, converged=True)

    n_nodes = max(MIN_CIRCLE_NODES, 8 * _hint(f, hint_degree))
    n_nodes = 1 << (n_nodes - 1).bit_length()
    n_nodes = min(n_nodes, settings.MAX_CIRCLE_NODES)
    switch = min(max(ADAPTIVE_SWITCH, 4 * n_nodes), settings.MAX_CIRCLE_NODES)
    total = math.fsum(np.abs(_circle_values(f, r, n_nodes, np.arange(n_nodes))) ** p)
    mean = total / n_nodes
    diff = math.inf

    while 2 * n_nodes <= switch:
        odd = np.arange(1, 2 * n_nodes, 2)
        total += math.fsum(np.abs(_circle_values(f, r, 2 * n_nodes, odd)) ** p)
        n_nodes *= 2
        refined = total / n_nodes
        diff = abs(refined - mean)
        mean = refined
        if not np.isfinite(mean):
            break
        if diff <= max(tol, ROUNDOFF_FLOOR * abs(mean)):
            return QuadratureResult(value=mean, abs_error_estimate=diff, node_count=n_nodes, converged=True)

    if r < 1.0 and np.isfinite(mean):
        logger.debug(f"Circle mean at r={r}: trapezoid change {diff:.3e} after {n_nodes} nodes, going adaptive")
        adaptive = adaptive_circle_mean(
            f, r, p, tol, start_panels=max(16, _hint(f, hint_degree)),
            breakpoints=getattr(f, "singular_angles", ()),
        )
        return QuadratureResult(
            value=adaptive.value,
            abs_error_estimate=adaptive.abs_error_estimate,
            node_count=n_nodes + adaptive.node_count,
            converged=adaptive.converged,
        )

    logger.warning(f"Circle mean at r={r} not converged after {n_nodes} nodes (last change {diff:.3e})")
    return QuadratureResult(value=mean, abs_error_estimate=diff, node_count=n_nodes, converged=False)


def _panel_sums(modulus: Callable[[np.ndarray], np.ndarray], a: np.ndarray, b: np.ndarray, x, w) -> np.ndarray:
    half = 0.5 * (b - a)
    theta = 0.5 * (a + b)[:, None] + half[:, None] * x[None, :]
    values = modulus(theta.ravel()).reshape(theta.shape)
    return half * (values @ w)


def adaptive_circle_mean(
    f, r: float, p: float = 1.0, tol: float = None, start_panels: int = 64, breakpoints=()
) -> QuadratureResult:
    """(1/2pi) int |f(r e^{it})|^p dt on Gauss-Legendre panels.

    Panels start as ``start_panels`` equal arcs cut again at ``breakpoints``;
    a panel is accepted once its rule and the rule on its two halves differ by
    at most tol times its width, otherwise both halves are refined further.
    Meant for integrands with peaks much narrower than the arc spacing, such as
    |phi'| next to a prevertex.
    """
    if tol is None:
        tol = settings.QUADRATURE_TOL
    x, w = leggauss(PANEL_ORDER)

    def modulus(theta: np.ndarray) -> np.ndarray:
        return np.abs(np.asarray(f(r * np.exp(1j * theta)))) ** p

    cuts = np.mod(np.concatenate([2.0 * np.pi * np.arange(start_panels) / start_panels,
                                  np.asarray(breakpoints, dtype=float)]), 2.0 * np.pi)
    edges = np.unique(cuts)
    a = edges
    b = np.append(edges[1:], edges[0] + 2.0 * np.pi)

    accepted, errors = [], []
    node_count = 0
    capped = False
    while a.size:
        m = 0.5 * (a + b)
        coarse = _panel_sums(modulus, a, b, x, w)
        fine = _panel_sums(modulus, a, m, x, w) + _panel_sums(modulus, m, b, x, w)
        node_count += 3 * PANEL_ORDER * a.size
        diff = np.abs(fine - coarse)
        done = (diff <= tol * (b - a)) | (diff <= ROUNDOFF_FLOOR * np.abs(fine)) | (b - a < MIN_PANEL_WIDTH)
        if 2 * np.count_nonzero(~done) > MAX_PANELS:
            # keep the open panels with their last disagreement as error
            capped = True
            done[:] = True
        accepted.extend(fine[done])
        errors.extend(diff[done])
        a, b, m = a[~done], b[~done], m[~done]
        a, b = np.concatenate([a, m]), np.concatenate([m, b])

    value = math.fsum(accepted) / (2.0 * np.pi)
    error = math.fsum(errors) / (2.0 * np.pi)
    converged = not capped and error <= max(tol, ROUNDOFF_FLOOR * abs(value))
    if not converged:
        logger.warning(f"Adaptive circle mean at r={r} not converged (error {error:.3e}, capped={capped})")
    return QuadratureResult(value=value, abs_error_estimate=error, node_count=node_count, converged=converged)


def radial_breakpoints(r_lo: float, r_hi: float) -> np.ndarray:
    """Cell edges: the breakpoints 1 - 2^-k inside (r_lo, r_hi), plus both ends"""
    depth = math.ceil(-math.log2(settings.RADIAL_TAIL))
    inner = 1.0 - 2.0 ** -np.arange(depth + 1)
    inner = inner[(inner > r_lo) & (inner < r_hi)]
    return np.concatenate([[r_lo], inner, [r_hi]])


def _radial_hint(hint: int, r: float) -> int:
    # |f| at radius r is resolved by O(1/(1-r)) nodes whatever the degree
    if r >= 1.0:
        return hint
    return min(hint, int(4.0 / (1.0 - r)))


class _RadialProfile:
    """r -> (2 r w(r) M_p(r), its error), recording circle-level work"""

    def __init__(self, f, p, hint, extra_weight):
        self.f = f
        self.p = p
        self.hint = hint
        self.extra_weight = extra_weight
        self.node_count = 0
        self.converged = True

    def __call__(self, r: float, tol: float) -> Tuple[float, float]:
        res = circle_mean(self.f, r, self.p, tol, _radial_hint(self.hint, r))
        self.node_count += res.node_count
        self.converged &= res.converged
        weight = 2.0 * r * (self.extra_weight(r) if self.extra_weight else 1.0)
        return weight * res.value, weight * res.abs_error_estimate


def _weighted_sum(profile: _RadialProfile, nodes, weights, scale: float, tol: float) -> Tuple[float, float]:
    samples = [profile(r, tol) for r in nodes]
    value = scale * math.fsum(w * s[0] for w, s in zip(weights, samples))
    error = scale * math.fsum(abs(w) * s[1] for w, s in zip(weights, samples))
    return value, error


def _weight_mass(a: float, b: float, beta: float) -> float:
    """int_a^b (1-r)^beta dr"""
    if abs(beta + 1.0) < 1e-12:
        return math.log((1.0 - a) / (1.0 - b))
    return ((1.0 - a) ** (beta + 1.0) - (1.0 - b) ** (beta + 1.0)) / (beta + 1.0)


def _gauss_cell(profile: _RadialProfile, a: float, b: float, beta: float, tol: float) -> Tuple[float, float]:
    """Gauss-Legendre sums of increasing order until two agree within tol"""
    half = 0.5 * (b - a)
    # circle errors are weighted by at most 2 int_a^b (1-r)^beta dr
    mass = 2.0 * _weight_mass(a, b, beta)
    circle_tol = 0.5 * tol / mass if mass > 0.0 else tol
    previous = None
    for order in GAUSS_ORDERS:
        x, w = leggauss(order)
        r = half * x + 0.5 * (b + a)
        value, circle_error = _weighted_sum(profile, r, w * (1.0 - r) ** beta, half, circle_tol)
        if previous is not None:
            rule_error = abs(value - previous)
            if rule_error <= tol:
                break
        previous = value
    return value, rule_error + circle_error


def _jacobi_tail(profile: _RadialProfile, a: float, beta: float, tol: float) -> Tuple[float, float]:
    """int_a^1 (1-r)^beta g(r) dr with the weight carried by Gauss-Jacobi nodes"""
    half = 0.5 * (1.0 - a)
    circle_tol = 0.25 * tol / _weight_mass(a, 1.0, beta)
    sums = []
    for order in JACOBI_ORDERS:
        x, w = roots_jacobi(order, beta, 0.0)
        sums.append(_weighted_sum(profile, a + half * (x + 1.0), w, half ** (beta + 1.0), circle_tol))
    (coarse, _), (fine, circle_error) = sums
    return fine, abs(fine - coarse) + circle_error


def disk_integral(
    f_prime,
    p: float,
    beta: float,
    r_lo: float = 0.0,
    r_hi: float = 1.0,
    tol: float = None,
    hint_degree: int = 0,
    extra_weight: Optional[Callable[[float], float]] = None,
) -> QuadratureResult:
    """int_{r_lo<|z|<r_hi} |f'(z)|^p (1-|z|)^beta w(|z|) dA(z), dA = dx dy / pi.

    Radial cells end at the breakpoints 1 - 2^-k; the cell touching r = 1
    uses a Gauss-Jacobi rule carrying the (1-r)^beta weight.
    """
    if tol is None:
        tol = settings.QUADRATURE_TOL
    if not 0.0 <= r_lo < r_hi <= 1.0:
        raise ValueError(f"need 0 <= r_lo < r_hi <= 1, got [{r_lo}, {r_hi}]")
    if r_hi == 1.0 and beta <= -1.0:
        raise NonIntegrableWeightError(f"(1-r)^{beta} is not integrable up to r = 1")

    edges = radial_breakpoints(r_lo, r_hi)
    cells = len(edges) - 1
    # each cell gets an equal share; thin cells near r = 1 tolerate coarser circle means
    cell_tol = 0.5 * tol / cells
    profile = _RadialProfile(f_prime, p, _hint(f_prime, hint_degree), extra_weight)

    pieces, errors = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        if b == 1.0 and 1.0 - a <= 2.0 * settings.RADIAL_TAIL:
            value, err = _jacobi_tail(profile, a, beta, cell_tol)
        else:
            value, err = _gauss_cell(profile, a, b, beta, cell_tol)
        pieces.append(value)
        errors.append(err)

    value = math.fsum(pieces)
    error = math.fsum(errors)
    converged = profile.converged and error <= tol
    if not converged:
        logger.warning(f"Disk integral not converged: estimate {error:.3e} > tol {tol:.1e}")
    return QuadratureResult(
        value=max(value, 0.0), abs_error_estimate=error, node_count=profile.node_count, converged=converged
    )


def I_of(B, tol: float = None) -> QuadratureResult:
    """int_D |B'| dA for anything exposing ``deriv`` and ``degree``"""
    return disk_integral(B.deriv, 1.0, 0.0, 0.0, 1.0, tol, hint_degree=B.degree)


def area_identity_check(p: ComplexPoly, tol: float = None) -> Tuple[QuadratureResult, float]:
    """int_D |p'|^2 (1-|z|^2) dA against sum_k k/(k+1) |a_k|^2"""
    k = np.arange(p.coeffs.size)
    coefficient_sum = math.fsum(k / (k + 1.0) * np.abs(p.coeffs) ** 2)
    integral = disk_integral(derivative(p), 2.0, 1.0, 0.0, 1.0, tol, extra_weight=lambda r: 1.0 + r)
    return integral, coefficient_sum


def hardy_norm(f, p: float, r_max: float, tol: float = None, hint_degree: int = 0) -> HardyNorm:
    if not 0.0 <= r_max < 1.0:
        raise ValueError("r_max must lie in [0, 1)")
    mean = circle_mean(f, r_max, p, tol, hint_degree)
    return HardyNorm(value=mean.value ** (1.0 / p), r_max=r_max, mean=mean)


POLYGON_ORDERS = (16, 32, 64, 128, 256, 512, 1024)


def star_polygon_integral(g: Callable[[np.ndarray], np.ndarray], vertices, tol: float = None) -> QuadratureResult:
    """(1/pi) int_P g(w) dx dy over a counterclockwise polygon star-shaped about 0.

    Every edge spans a triangle with the origin, integrated in polar
    coordinates with Gauss-Legendre nodes in the angle and along the ray up
    to the edge. Both orders double together until two sums agree within tol.
    """
    if tol is None:
        tol = settings.QUADRATURE_TOL
    starts = np.asarray(vertices, dtype=complex)
    ends = np.roll(starts, -1)
    edge = ends - starts
    normal = -1j * edge / np.abs(edge)
    heights = np.real(starts * np.conj(normal))
    if np.any(heights <= 0.0):
        raise ValueError("polygon must contain the origin in its interior")

    previous = None
    node_count = 0
    diff = math.inf
    for order in POLYGON_ORDERS:
        x, w = leggauss(order)
        pieces = []
        for a, b, h, nu in zip(starts, ends, heights, normal):
            t0 = math.atan2(a.imag, a.real)
            span = float(np.angle(b / a))
            theta = t0 + 0.5 * span * (x + 1.0)
            r_edge = h / np.cos(theta - np.angle(nu))
            r = 0.5 * r_edge[:, None] * (x[None, :] + 1.0)
            values = np.asarray(g(r * np.exp(1j * theta[:, None])), dtype=float)
            radial = 0.5 * r_edge * np.sum(w[None, :] * values * r, axis=1)
            pieces.append(0.5 * span * math.fsum(w * radial))
        node_count += order * order * starts.size
        value = math.fsum(pieces) / math.pi
        if previous is not None:
            diff = abs(value - previous)
            if diff <= max(tol, ROUNDOFF_FLOOR * abs(value)):
                return QuadratureResult(value=value, abs_error_estimate=diff, node_count=node_count, converged=True)
        previous = value

    logger.warning(f"Polygon integral not converged at order {POLYGON_ORDERS[-1]} (last change {diff:.3e})")
    return QuadratureResult(value=value, abs_error_estimate=diff, node_count=node_count, converged=False)
