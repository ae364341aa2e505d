"""Function families fed to the experiment drivers.

Blaschke zero laws in the disk, rational families in the w-plane of a target
domain, and the lacunary Bañuelos–Moore polynomial with its Schur-matched
Blaschke product.
"""

from dataclasses import dataclass, field
from typing import List, Optional
import logging
import math

import numpy as np

from app.config import settings
from app.core import blaschke, schur
from app.core.complexpoly import ComplexPoly, rudin_shapiro, random_sign_poly, sup_norm_circle
from app.core.domains import DomainMap
from app.core.errors import SchurEarlyTermination
from app.core.quadrature import QuadratureResult, I_of
from app.core.rational import RationalFunction, from_poles_zeros, from_polynomials

logger = logging.getLogger(__name__)

# keeps sampled zeros clear of the ZeroProximityError guard
ZERO_RADIUS_CAP = 1.0 - 1e-9
# q = p / (sup * (1 + margin)) stays inside the Schur class despite sup being a lower bound
SUP_MARGIN = 1e-8


def sample_zeros(n: int, law: str, rng: np.random.Generator, band_delta: Optional[float] = None) -> np.ndarray:
    """
    n random zeros in the disk

    uniform_disk: area-uniform.
    boundary_band: uniform angle, radius uniform in [1 - delta, 1 - delta/2].
    clustered: radii as boundary_band, angles within delta of one random point.
    delta defaults to 1/n.
    """
    if n == 0:
        return np.zeros(0, dtype=complex)
    delta = band_delta if band_delta is not None else 1.0 / n
    delta = min(delta, 1.0)
    if law == "uniform_disk":
        radius = np.sqrt(rng.random(n))
        angle = 2.0 * np.pi * rng.random(n)
    elif law == "boundary_band":
        radius = 1.0 - delta + 0.5 * delta * rng.random(n)
        angle = 2.0 * np.pi * rng.random(n)
    elif law == "clustered":
        radius = 1.0 - delta + 0.5 * delta * rng.random(n)
        angle = 2.0 * np.pi * rng.random() + delta * (rng.random(n) - 0.5)
    else:
        raise ValueError(f"unknown zero law '{law}'")
    return np.minimum(radius, ZERO_RADIUS_CAP) * np.exp(1j * angle)


def random_blaschke(n: int, law: str, rng: np.random.Generator, band_delta: Optional[float] = None) -> blaschke.BlaschkeProduct:
    return blaschke.from_zeros(sample_zeros(n, law, rng, band_delta))


def power_blaschke(n: int) -> blaschke.BlaschkeProduct:
    """B(z) = z^n"""
    return blaschke.from_zeros(np.zeros(n, dtype=complex))


def outer_radius(d: DomainMap) -> float:
    """max |w| over the closed domain"""
    s = np.concatenate([np.arange(settings.BOUNDARY_SAMPLES) / settings.BOUNDARY_SAMPLES, d.vertex_parameters()])
    return float(np.max(np.abs(d.boundary_points(s))))


def power_w_n(d: DomainMap, n: int) -> RationalFunction:
    """R(w) = (w / outer_radius)^n, so |R| <= 1 on the domain"""
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[n] = outer_radius(d) ** -n
    return from_polynomials(ComplexPoly(coeffs))


def random_blaschke_in_w(
    d: DomainMap, n: int, rng: np.random.Generator, law: str = "uniform_disk", band_delta: Optional[float] = None
) -> RationalFunction:
    """B(w / rho) for a random Blaschke product B, rho the outer radius of the domain.

    A factor (a - w/rho)/(1 - conj(a) w/rho) equals (w - rho a) / (conj(a) (w - rho/conj(a)));
    a zero at the origin contributes w/rho. Poles lie outside the disk of radius rho.
    """
    rho = outer_radius(d)
    zeros = sample_zeros(n, law, rng, band_delta)
    inner = zeros[zeros != 0]
    at_origin = int(np.sum(zeros == 0))
    scale = complex(np.prod(1.0 / np.conj(inner))) * rho ** -at_origin if inner.size else rho ** -at_origin
    return from_poles_zeros(
        zeros=np.concatenate([rho * inner, np.zeros(at_origin, dtype=complex)]),
        poles=rho / np.conj(inner),
        scale=scale,
    )


def boundary_pole_offset(d: DomainMap, n: int, band_delta: Optional[float] = None) -> float:
    """Distance of the boundary poles from the boundary: band_delta (default 1/(n+1)) times the inradius"""
    return (band_delta if band_delta is not None else 1.0 / (n + 1)) * d.inradius


def boundary_pole_rational(d: DomainMap, n: int, band_delta: Optional[float] = None) -> RationalFunction:
    """prod_k (w - z_k)/(w - p_k) with p_k at distance delta outside the boundary and
    z_k its mirror image across the boundary tangent.

    On a convex domain every factor has modulus <= 1, so |R| <= 1 there.
    """
    delta = boundary_pole_offset(d, n, band_delta)
    s = (np.arange(n) + 0.5) / max(n, 1)
    points = d.boundary_points(s)
    normals = d.boundary_normals(s)
    return from_poles_zeros(zeros=points - delta * normals, poles=points + delta * normals, scale=1.0)


def build_family(family: str, d: DomainMap, n: int, rng: Optional[np.random.Generator], **kwargs) -> RationalFunction:
    if family == "power_w_n":
        return power_w_n(d, n)
    if family == "random_blaschke_in_w":
        if rng is None:
            raise ValueError("random_blaschke_in_w needs a random generator")
        return random_blaschke_in_w(d, n, rng, kwargs.get("law", "uniform_disk"), kwargs.get("band_delta"))
    if family == "boundary_pole_rational":
        return boundary_pole_rational(d, n, kwargs.get("band_delta"))
    raise ValueError(f"family '{family}' is not a w-plane rational family")


@dataclass
class BanuelosMooreResult:
    """Lacunary polynomial p, its normalization q and the Blaschke product matching q"""

    poly: ComplexPoly
    q: ComplexPoly
    nominal_degree: int
    sup_norm: float
    entropy_ratio: float
    params: schur.SchurParameters
    blaschke: RationalFunction
    taylor_count: int
    taylor_achieved: int
    integral: Optional[QuadratureResult]
    block_sup_norms: List[float] = field(default_factory=list)


def block_band(j: int):
    """Coefficient range [4^j, 4^j + 2^(2j+1)) of block j inside [4^j, 4^(j+1))"""
    start = 4 ** j
    return start, start + 2 ** (2 * j + 1)


def banuelos_moore_blocks(
    j_max: int, strategy: str, sign_randomization: bool, rng: Optional[np.random.Generator]
) -> List[np.ndarray]:
    """Unshifted block coefficient vectors b_1..b_{j_max}, each with sup norm <= 1"""
    if (strategy != "rudin_shapiro_scaled" or sign_randomization) and rng is None:
        raise ValueError(f"strategy '{strategy}' with sign randomization={sign_randomization} needs a seed")
    blocks = []
    for j in range(1, j_max + 1):
        order = 2 * j + 1
        if strategy == "rudin_shapiro_scaled":
            P, Q = rudin_shapiro(order)
            coeffs = (Q if sign_randomization and rng.random() < 0.5 else P).coeffs
            # |P_m| <= 2^((m+1)/2) on the circle
            coeffs = coeffs * 2.0 ** (-(order + 1) / 2)
        elif strategy in ("random_signs", "random_phases"):
            raw = random_sign_poly(2 ** order, rng, phases=strategy == "random_phases")
            coeffs = raw.coeffs / sup_norm_circle(raw)
        else:
            raise ValueError(f"unknown block strategy '{strategy}'")
        if sign_randomization:
            coeffs = coeffs * rng.choice([-1.0, 1.0])
        blocks.append(np.asarray(coeffs, dtype=complex))
    return blocks


def banuelos_moore_polynomial(
    j_max: int, strategy: str = "rudin_shapiro_scaled", sign_randomization: bool = False,
    rng: Optional[np.random.Generator] = None,
) -> ComplexPoly:
    return _assemble(banuelos_moore_blocks(j_max, strategy, sign_randomization, rng))


def _assemble(blocks: List[np.ndarray]) -> ComplexPoly:
    coeffs = np.zeros(block_band(len(blocks))[1], dtype=complex)
    for j, block in enumerate(blocks, start=1):
        lo, hi = block_band(j)
        coeffs[lo:hi] = block
    return ComplexPoly(coeffs)


def entropy_ratio(p: ComplexPoly, r: float) -> float:
    """sum |a_k|^2 r^(2k) / log(1/(1-r))"""
    k = np.arange(p.coeffs.size)
    return float(np.sum(np.abs(p.coeffs) ** 2 * r ** (2 * k)) / math.log(1.0 / (1.0 - r)))


def banuelos_moore_construct(
    j_max: int,
    strategy: str = "rudin_shapiro_scaled",
    sign_randomization: bool = False,
    rng: Optional[np.random.Generator] = None,
    taylor_count: int = None,
    tol: float = None,
    integrate: bool = True,
) -> BanuelosMooreResult:
    """
    Lacunary polynomial p = sum_j b_j, q = p/||p||_inf and the Blaschke product
    whose first K Taylor coefficients are those of q

    Args:
        j_max: number of blocks (nominal degree 4^(j_max+1) - 1)
        strategy: block construction
        sign_randomization: random sign per block (and random choice of the RS twin)
        rng: generator for the randomized variants
        taylor_count: K, capped by Schur stability; early termination lowers it
        tol: quadrature tolerance for I(B)
        integrate: skip I(B) when False

    Returns:
        BanuelosMooreResult
    """
    if not 1 <= j_max <= 7:
        raise ValueError("j_max must lie in [1, 7]")
    taylor_count = taylor_count or settings.TAYLOR_COUNT
    blocks = banuelos_moore_blocks(j_max, strategy, sign_randomization, rng)
    block_sups = [sup_norm_circle(ComplexPoly(b)) for b in blocks]
    p = _assemble(blocks)
    nominal_degree = 4 ** (j_max + 1) - 1
    sup = sup_norm_circle(p)
    q = p * (1.0 / (sup * (1.0 + SUP_MARGIN)))

    k = min(taylor_count, nominal_degree + 1)
    section = np.zeros(k, dtype=complex)
    head = q.coeffs[:k]
    section[: head.size] = head
    try:
        params = schur.schur_parameters(section)
        achieved = k
    except SchurEarlyTermination as e:
        params = e.params
        achieved = e.step
        logger.warning(f"Schur recursion stopped at K={achieved} of {k} for j_max={j_max}")

    integral = I_of(params, tol) if integrate else None
    return BanuelosMooreResult(
        poly=p,
        q=q,
        nominal_degree=nominal_degree,
        sup_norm=sup,
        entropy_ratio=entropy_ratio(p, 1.0 - 1.0 / nominal_degree),
        params=params,
        blaschke=schur.reconstruct(params),
        taylor_count=k,
        taylor_achieved=achieved,
        integral=integral,
        block_sup_norms=block_sups,
    )
