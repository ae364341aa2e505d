"""Simply connected target domains given by conformal maps phi: D -> G, phi(0) = 0.

Kinds: the unit disk, a closed-form Hoelder model with phi' = (1-z)^-alpha,
regular polygons and rectangles (Schwarz-Christoffel maps whose prevertices
are fixed by symmetry).
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Optional
import logging
import math
import threading

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad
from scipy.optimize import brentq, minimize_scalar
from scipy.special import beta as beta_fn
from scipy.special import roots_jacobi

from app.config import settings
from app.core.errors import OutsideDomainError, PrevertexProximityError

logger = logging.getLogger(__name__)

PREVERTEX_GUARD = 1e-6
INSIDE_TOL = 1e-12
RAY_ORDER = 20
VERTEX_ORDER = 40
REFINE_CANDIDATES = 3


class HpClass(str, Enum):
    FINITE = "finite"
    INFINITE = "infinite"


@dataclass(frozen=True)
class BoundarySup:
    """max |f| over the sampled and refined boundary"""

    value: float
    samples: int
    s_at: float
    w_at: complex


def _as_output(flat: np.ndarray, z):
    if np.ndim(z) == 0:
        return flat.reshape(-1)[0].item()
    return flat.reshape(np.shape(z))


def _breakpoint(k: int) -> float:
    return 1.0 - 2.0 ** -k


def _segment_distance(w: np.ndarray, starts: np.ndarray, ends: np.ndarray) -> np.ndarray:
    """Distance from each w to the nearest of the segments [starts_k, ends_k]"""
    out = np.empty(w.shape, dtype=float)
    step = max(1, settings.EVAL_CHUNK // max(starts.size, 1))
    edge = ends - starts
    length2 = np.maximum(np.abs(edge) ** 2, 1e-300)
    for lo in range(0, w.size, step):
        x = w[lo : lo + step, None]
        t = np.clip(np.real((x - starts[None, :]) * np.conj(edge[None, :])) / length2[None, :], 0.0, 1.0)
        out[lo : lo + step] = np.min(np.abs(x - (starts[None, :] + t * edge[None, :])), axis=1)
    return out


class DomainMap(ABC):
    """Conformal map of the unit disk onto a bounded domain, with geometry of the image"""

    kind: str = ""
    # alpha in |phi'(z)| <= C (1-|z|)^-alpha
    holder_exponent: float = 0.0

    @abstractmethod
    def phi_prime(self, z):
        ...

    @abstractmethod
    def phi(self, z):
        ...

    @abstractmethod
    def signed_distance(self, w: np.ndarray) -> np.ndarray:
        """Distance to the boundary, negative outside"""

    @abstractmethod
    def exterior_distance(self, w: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def boundary_points(self, s: np.ndarray) -> np.ndarray:
        """Counterclockwise boundary parameterization over s in [0, 1)"""

    @abstractmethod
    def boundary_normals(self, s: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def hp_finite(self, p: float) -> bool:
        ...

    def vertices(self) -> np.ndarray:
        return np.zeros(0, dtype=complex)

    def vertex_parameters(self) -> np.ndarray:
        """Values of s at which boundary_points hits a vertex"""
        return np.zeros(0, dtype=float)

    @property
    def inradius(self) -> float:
        return float(self.signed_distance(np.zeros(1, dtype=complex))[0])

    @property
    def singular_angles(self) -> np.ndarray:
        """Arguments of the boundary points where phi' blows up"""
        return np.zeros(0, dtype=float)

    def phi_inside(self, z):
        """phi at quadrature nodes strictly inside the disk, however close to the circle"""
        return self.phi(z)

    def phi_on_grid(self, r: float, n_nodes: int, idx: Optional[np.ndarray] = None) -> np.ndarray:
        if idx is None:
            idx = np.arange(n_nodes)
        return np.asarray(self.phi(r * np.exp(2j * np.pi * np.asarray(idx) / n_nodes)), dtype=complex)

    def describe(self) -> str:
        return self.kind


class UnitDisk(DomainMap):
    kind = "unit_disk"

    def phi_prime(self, z):
        return _as_output(np.ones(np.size(z), dtype=complex), z)

    def phi(self, z):
        return _as_output(np.atleast_1d(np.asarray(z, dtype=complex)).ravel(), z)

    def signed_distance(self, w):
        return 1.0 - np.abs(w)

    def exterior_distance(self, w):
        return np.maximum(np.abs(w) - 1.0, 0.0)

    def boundary_points(self, s):
        return np.exp(2j * np.pi * np.asarray(s, dtype=float))

    def boundary_normals(self, s):
        return self.boundary_points(s)

    def hp_finite(self, p):
        return True


class ModelHolder(DomainMap):
    """phi(z) = (1 - (1-z)^(1-alpha)) / (1-alpha), so phi' = (1-z)^-alpha exactly"""

    kind = "model_holder"

    def __init__(self, alpha: float):
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
        self.alpha = float(alpha)
        self.holder_exponent = self.alpha
        self._polyline: Optional[np.ndarray] = None
        self._lock = threading.Lock()

    def __getstate__(self):
        return {"alpha": self.alpha, "holder_exponent": self.holder_exponent}

    def __setstate__(self, state):
        self.__init__(state["alpha"])

    def phi_prime(self, z):
        z = np.asarray(z, dtype=complex)
        return _as_output(np.power(1.0 - z, -self.alpha).reshape(-1), z)

    def phi(self, z):
        z = np.asarray(z, dtype=complex)
        a = self.alpha
        return _as_output(((1.0 - np.power(1.0 - z, 1.0 - a)) / (1.0 - a)).reshape(-1), z)

    def boundary_points(self, s):
        return np.asarray(self.phi(np.exp(2j * np.pi * np.asarray(s, dtype=float))), dtype=complex)

    def boundary_normals(self, s):
        # tangent of theta -> phi(e^{i theta}) is i z phi'(z); outward normal is -i times it
        z = np.exp(2j * np.pi * np.asarray(s, dtype=float))
        with np.errstate(divide="ignore", invalid="ignore"):
            normal = z * np.asarray(self.phi_prime(z))
            normal = normal / np.abs(normal)
        return np.where(np.isfinite(normal), normal, 1.0 + 0j)

    def vertices(self):
        return np.array([1.0 / (1.0 - self.alpha)], dtype=complex)

    def vertex_parameters(self):
        return np.zeros(1)

    @property
    def singular_angles(self):
        return np.zeros(1)

    @property
    def polyline(self) -> np.ndarray:
        """Closed boundary polyline with settings.BOUNDARY_SAMPLES vertices"""
        with self._lock:
            if self._polyline is None:
                n = settings.BOUNDARY_SAMPLES
                points = self.boundary_points(np.arange(n) / n)
                self._polyline = np.concatenate([points, points[:1]])
                self._polyline.setflags(write=False)
        return self._polyline

    def _inside(self, w: np.ndarray) -> np.ndarray:
        """Crossing-number test against the boundary polyline"""
        line = self.polyline
        a, b = line[:-1], line[1:]
        inside = np.zeros(w.shape, dtype=bool)
        step = max(1, settings.EVAL_CHUNK // a.size)
        for lo in range(0, w.size, step):
            x = w[lo : lo + step, None]
            straddles = (a.imag[None, :] > x.imag) != (b.imag[None, :] > x.imag)
            with np.errstate(divide="ignore", invalid="ignore"):
                cross = a.real + (x.imag - a.imag) * (b.real - a.real) / (b.imag - a.imag)
            inside[lo : lo + step] = np.sum(straddles & (x.real < cross), axis=1) % 2 == 1
        return inside

    def signed_distance(self, w):
        w = np.atleast_1d(np.asarray(w, dtype=complex)).ravel()
        line = self.polyline
        dist = _segment_distance(w, line[:-1], line[1:])
        return np.where(self._inside(w), dist, -dist)

    def exterior_distance(self, w):
        return np.maximum(-self.signed_distance(w), 0.0)

    def hp_finite(self, p):
        return p * self.alpha < 1.0

    def describe(self):
        return f"model_holder(alpha={self.alpha:g})"


class _SchwarzChristoffel(DomainMap):
    """Convex polygon image of a Schwarz-Christoffel map with symmetric prevertices.

    phi is integrated along rays through the radial breakpoints 1 - 2^-k;
    values at the breakpoints are cached per circle grid size.
    """

    prevertices: np.ndarray
    exponents: np.ndarray
    constant: float

    def _init_cache(self):
        self._ray_tables: Dict[int, np.ndarray] = {}
        self._lock = threading.Lock()

    def __getstate__(self):
        state = dict(self.__dict__)
        state.pop("_ray_tables", None)
        state.pop("_lock", None)
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._init_cache()

    def _ray_integral(self, theta: np.ndarray, lo: float, hi: np.ndarray) -> np.ndarray:
        """int_lo^hi phi'(t e^{i theta}) e^{i theta} dt, one Gauss-Legendre cell per ray"""
        x, w = leggauss(RAY_ORDER)
        half = 0.5 * (hi - lo)
        direction = np.exp(1j * theta)
        t = lo + half[None, :] * (x[:, None] + 1.0)
        values = np.asarray(self.phi_prime(t * direction[None, :]))
        return half * direction * np.sum(w[:, None] * values, axis=0)

    def phi(self, z):
        rho = np.abs(np.atleast_1d(np.asarray(z, dtype=complex)))
        if np.any(rho > 1.0 - PREVERTEX_GUARD):
            raise PrevertexProximityError(
                f"|z| = {rho.max():.12f} exceeds 1 - {PREVERTEX_GUARD}; too close to a prevertex"
            )
        return self.phi_inside(z)

    def phi_inside(self, z):
        flat = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
        rho = np.abs(flat)
        if np.any(rho >= 1.0):
            raise ValueError("phi_inside needs |z| < 1")
        theta = np.angle(flat)
        out = np.zeros(flat.shape, dtype=complex)
        k = 0
        while True:
            active = rho > _breakpoint(k)
            if not np.any(active):
                break
            upper = np.minimum(rho[active], _breakpoint(k + 1))
            out[active] += self._ray_integral(theta[active], _breakpoint(k), upper)
            k += 1
        return _as_output(out, z)

    def _ray_table(self, n_nodes: int, depth: int) -> np.ndarray:
        """phi(b_k e^{2 pi i j / n_nodes}) for k = 0..depth, b_k = 1 - 2^-k"""
        with self._lock:
            table = self._ray_tables.get(n_nodes)
            if table is None or table.shape[0] <= depth:
                theta = 2.0 * np.pi * np.arange(n_nodes) / n_nodes
                rows = [np.zeros(n_nodes, dtype=complex)] if table is None else list(table)
                while len(rows) <= depth:
                    k = len(rows) - 1
                    upper = np.full(n_nodes, _breakpoint(k + 1))
                    rows.append(rows[-1] + self._ray_integral(theta, _breakpoint(k), upper))
                table = np.vstack(rows)
                table.setflags(write=False)
                self._ray_tables[n_nodes] = table
                logger.debug(f"{self.describe()}: ray table N={n_nodes} extended to depth {depth}")
            return table

    def phi_on_grid(self, r, n_nodes, idx=None):
        if not 0.0 <= r < 1.0:
            raise ValueError("grid radius must lie in [0, 1)")
        if idx is None:
            idx = np.arange(n_nodes)
        idx = np.asarray(idx)
        if r == 0.0:
            return np.zeros(idx.shape, dtype=complex)
        depth = int(math.floor(-math.log2(1.0 - r)))
        while _breakpoint(depth) > r:
            depth -= 1
        table = self._ray_table(n_nodes, depth)
        theta = 2.0 * np.pi * idx / n_nodes
        return table[depth][idx] + self._ray_integral(theta, _breakpoint(depth), np.full(idx.shape, r))

    def vertex(self, k: int) -> complex:
        """phi at the k-th prevertex, by Gauss-Jacobi along the ray (endpoint singularity in the weight)"""
        zeta = complex(self.prevertices[k])
        alpha = float(self.exponents[k])
        x, w = roots_jacobi(VERTEX_ORDER, -alpha, 0.0)
        t = 0.5 * (x + 1.0)
        smooth = np.asarray(self.phi_prime(t * zeta)) * np.power(1.0 - t, alpha)
        return complex(zeta * 2.0 ** (alpha - 1.0) * np.sum(w * smooth))

    def _edges(self):
        v = self.vertices()
        return v, np.roll(v, -1)

    def signed_distance(self, w):
        w = np.atleast_1d(np.asarray(w, dtype=complex)).ravel()
        starts, ends = self._edges()
        edge = ends - starts
        normal = -1j * edge / np.abs(edge)
        # convex: the distance to the boundary is the smallest distance to an edge line
        heights = np.real((starts[None, :] - w[:, None]) * np.conj(normal[None, :]))
        return np.min(heights, axis=1)

    def exterior_distance(self, w):
        w = np.atleast_1d(np.asarray(w, dtype=complex)).ravel()
        starts, ends = self._edges()
        outside = self.signed_distance(w) < 0.0
        return np.where(outside, _segment_distance(w, starts, ends), 0.0)

    def _perimeter_params(self):
        starts, ends = self._edges()
        lengths = np.abs(ends - starts)
        cumulative = np.concatenate([[0.0], np.cumsum(lengths)])
        return starts, ends, cumulative / cumulative[-1]

    def vertex_parameters(self):
        return self._perimeter_params()[2][:-1]

    def boundary_points(self, s):
        s = np.mod(np.asarray(s, dtype=float), 1.0)
        starts, ends, knots = self._perimeter_params()
        k = np.clip(np.searchsorted(knots, s, side="right") - 1, 0, starts.size - 1)
        local = (s - knots[k]) / (knots[k + 1] - knots[k])
        return starts[k] + local * (ends[k] - starts[k])

    def boundary_normals(self, s):
        s = np.mod(np.asarray(s, dtype=float), 1.0)
        starts, ends, knots = self._perimeter_params()
        k = np.clip(np.searchsorted(knots, s, side="right") - 1, 0, starts.size - 1)
        edge = ends[k] - starts[k]
        return -1j * edge / np.abs(edge)

    def inner_polygon(self, rho: float) -> np.ndarray:
        """Vertices of G_rho: every edge line moved inward by rho, consecutive lines intersected"""
        if not 0.0 <= rho < self.inradius:
            raise ValueError(f"rho must lie in [0, {self.inradius:g})")
        starts, ends = self._edges()
        edge = ends - starts
        shifted = starts + rho * 1j * edge / np.abs(edge)
        prev_start, prev_edge = np.roll(shifted, 1), np.roll(edge, 1)

        def cross(u, v):
            return np.imag(np.conj(u) * v)

        t = cross(shifted - prev_start, edge) / cross(prev_edge, edge)
        return prev_start + t * prev_edge

    @property
    def singular_angles(self):
        return np.mod(np.angle(self.prevertices), 2.0 * np.pi)

    @property
    def perimeter(self) -> float:
        starts, ends = self._edges()
        return float(np.sum(np.abs(ends - starts)))


class RegularPolygon(_SchwarzChristoffel):
    """phi' = c (1 - z^N)^(-2/N); prevertices at N-th roots of unity, vertices R e^{2 pi i k/N}"""

    kind = "regular_polygon"

    def __init__(self, sides: int, circumradius: float = 1.0):
        if sides < 3:
            raise ValueError(f"a regular polygon needs at least 3 sides, got {sides}")
        if circumradius <= 0:
            raise ValueError("circumradius must be positive")
        self.sides = int(sides)
        self.circumradius = float(circumradius)
        self.holder_exponent = 2.0 / self.sides
        self.prevertices = np.exp(2j * np.pi * np.arange(self.sides) / self.sides)
        self.exponents = np.full(self.sides, self.holder_exponent)
        # phi(1) = c int_0^1 (1 - t^N)^(-2/N) dt = (c/N) B(1/N, 1 - 2/N)
        self.constant = self.circumradius * self.sides / beta_fn(1.0 / self.sides, 1.0 - 2.0 / self.sides)
        self._init_cache()

    def phi_prime(self, z):
        z = np.asarray(z, dtype=complex)
        return self.constant * np.power(1.0 - z ** self.sides, -self.holder_exponent)

    def vertices(self):
        return self.circumradius * self.prevertices

    @property
    def inradius(self) -> float:
        return self.circumradius * math.cos(math.pi / self.sides)

    def hp_finite(self, p):
        return 2.0 * p / self.sides < 1.0

    def describe(self):
        return f"regular_polygon(N={self.sides};R={self.circumradius:g})"


def _elliptic_profile(kappa: float) -> float:
    """int_0^1 (1 - 2 kappa t^2 + t^4)^(-1/2) dt"""
    value, _ = quad(lambda t: (1.0 - 2.0 * kappa * t * t + t ** 4) ** -0.5, 0.0, 1.0, limit=200)
    return value


class Rectangle(_SchwarzChristoffel):
    """Rectangle [-a, a] x [-b, b]; prevertices e^{+-i theta0}, -e^{-+i theta0}.

    phi' = c ((1 - z^2 e^{-2i theta0})(1 - z^2 e^{2i theta0}))^(-1/2), with
    b/a = F(-cos 2theta0) / F(cos 2theta0) solved for theta0.
    """

    kind = "rectangle"
    KAPPA_LIMIT = 1.0 - 1e-12

    def __init__(self, half_width: float, half_height: float):
        if half_width <= 0 or half_height <= 0:
            raise ValueError("half sides must be positive")
        self.half_width = float(half_width)
        self.half_height = float(half_height)
        self.holder_exponent = 0.5
        aspect = self.half_height / self.half_width

        def mismatch(kappa: float) -> float:
            return math.log(_elliptic_profile(-kappa) / _elliptic_profile(kappa)) - math.log(aspect)

        if aspect == 1.0:
            kappa = 0.0
        else:
            lo, hi = -self.KAPPA_LIMIT, self.KAPPA_LIMIT
            if mismatch(lo) * mismatch(hi) > 0:
                raise ValueError(f"aspect ratio {aspect:g} outside the supported range")
            kappa = brentq(mismatch, lo, hi, xtol=1e-15)
        self.theta0 = 0.5 * math.acos(kappa)
        self.constant = self.half_width / _elliptic_profile(kappa)
        t0 = self.theta0
        self.prevertices = np.exp(1j * np.array([t0, math.pi - t0, math.pi + t0, -t0]))
        self.exponents = np.full(4, 0.5)
        self._rotation = np.exp(2j * t0)
        self._init_cache()

    def phi_prime(self, z):
        z2 = np.asarray(z, dtype=complex) ** 2
        return self.constant * np.power(1.0 - z2 / self._rotation, -0.5) * np.power(1.0 - z2 * self._rotation, -0.5)

    def vertices(self):
        a, b = self.half_width, self.half_height
        return np.array([a + 1j * b, -a + 1j * b, -a - 1j * b, a - 1j * b])

    @property
    def inradius(self) -> float:
        return min(self.half_width, self.half_height)

    def hp_finite(self, p):
        return p < 2.0

    def describe(self):
        return f"rectangle(a={self.half_width:g};b={self.half_height:g})"


def domain_from_spec(kind: str, **params) -> DomainMap:
    """Build a domain from its kind name and parameters"""
    if kind == UnitDisk.kind:
        return UnitDisk()
    if kind == ModelHolder.kind:
        return ModelHolder(params["alpha"])
    if kind == RegularPolygon.kind:
        return RegularPolygon(params["sides"], params.get("circumradius") or 1.0)
    if kind == Rectangle.kind:
        return Rectangle(params["half_width"], params["half_height"])
    raise ValueError(f"unknown domain kind '{kind}'")


def phi_prime(d: DomainMap, z):
    return d.phi_prime(z)


def phi(d: DomainMap, z):
    return d.phi(z)


def phi_on_grid(d: DomainMap, r: float, n_nodes: int, idx: Optional[np.ndarray] = None) -> np.ndarray:
    return d.phi_on_grid(r, n_nodes, idx)


def contains(d: DomainMap, w) -> bool:
    return bool(np.all(d.signed_distance(np.atleast_1d(np.asarray(w, dtype=complex))) >= -INSIDE_TOL))


def dist_to_boundary(d: DomainMap, w: complex) -> float:
    distance = float(d.signed_distance(np.atleast_1d(np.asarray(w, dtype=complex)))[0])
    if distance < -INSIDE_TOL:
        raise OutsideDomainError(f"w={w!r} lies outside {d.describe()}")
    return max(distance, 0.0)


def exterior_distance(d: DomainMap, w: complex) -> float:
    return float(d.exterior_distance(np.atleast_1d(np.asarray(w, dtype=complex)))[0])


def hp_classification(d: DomainMap, p: float) -> HpClass:
    """Whether phi' lies in H^p"""
    if p <= 0:
        raise ValueError("p must be positive")
    return HpClass.FINITE if d.hp_finite(p) else HpClass.INFINITE


def boundary_points(d: DomainMap, s) -> np.ndarray:
    return d.boundary_points(s)


def boundary_normals(d: DomainMap, s) -> np.ndarray:
    return d.boundary_normals(s)


def inradius(d: DomainMap) -> float:
    return d.inradius


def vertices(d: DomainMap) -> np.ndarray:
    return d.vertices()


def vertex(d: DomainMap, k: int) -> complex:
    if isinstance(d, _SchwarzChristoffel):
        return d.vertex(k)
    return complex(d.vertices()[k])


def sup_on_boundary(d: DomainMap, f: Callable[[np.ndarray], np.ndarray], samples: int = 4096) -> BoundarySup:
    """max |f| on the boundary: uniform samples plus every vertex, then bounded
    refinement around the best candidates. Always an attained value."""
    s = np.unique(np.concatenate([np.arange(samples) / samples, d.vertex_parameters()]))
    values = np.abs(np.asarray(f(d.boundary_points(s))))
    j = int(np.argmax(values))
    best = (float(values[j]), float(s[j]))
    h = 1.0 / samples

    def negative_modulus(t: float) -> float:
        return -float(np.abs(np.asarray(f(d.boundary_points(np.array([t])))))[0])

    for j in np.argsort(values)[-REFINE_CANDIDATES:]:
        res = minimize_scalar(
            negative_modulus, bounds=(s[j] - h, s[j] + h), method="bounded", options={"xatol": 1e-12}
        )
        if -res.fun > best[0]:
            best = (-float(res.fun), float(res.x) % 1.0)
    w_at = complex(d.boundary_points(np.array([best[1]]))[0])
    return BoundarySup(value=best[0], samples=int(s.size), s_at=best[1], w_at=w_at)


class PullbackIntegrand:
    """z -> |R'(phi) phi'|^p |phi'|^s d_G(phi)^beta 1[d_G(phi) > rho] on the disk.

    With s = 2 - p its disk integral is int_G |R'|^p d_G^beta dA over the part
    of G farther than rho from the boundary.
    """

    def __init__(
        self,
        domain: DomainMap,
        R,
        p: float,
        phi_prime_power: float = None,
        beta: float = 0.0,
        rho: float = 0.0,
    ):
        self.domain = domain
        self.R = R
        self.p = float(p)
        self.phi_prime_power = 2.0 - self.p if phi_prime_power is None else float(phi_prime_power)
        self.beta = float(beta)
        self.rho = float(rho)
        self.degree = getattr(R, "degree", 0)
        self.singular_angles = domain.singular_angles

    def _combine(self, z: np.ndarray, w: np.ndarray) -> np.ndarray:
        dphi = np.asarray(self.domain.phi_prime(z))
        slope = np.asarray(self.R.deriv(w))
        modulus = np.abs(dphi)
        values = np.abs(slope * dphi) ** self.p * modulus ** self.phi_prime_power
        if self.beta != 0.0 or self.rho > 0.0:
            gap = np.maximum(self.domain.signed_distance(w), 0.0)
            if self.beta != 0.0:
                with np.errstate(divide="ignore"):
                    values = values * np.where(gap > 0.0, gap ** self.beta, 0.0)
            if self.rho > 0.0:
                values = np.where(gap > self.rho, values, 0.0)
        return values

    def on_circle_grid(self, r: float, n_nodes: int, idx: Optional[np.ndarray] = None) -> np.ndarray:
        if idx is None:
            idx = np.arange(n_nodes)
        z = r * np.exp(2j * np.pi * np.asarray(idx) / n_nodes)
        return self._combine(z, self.domain.phi_on_grid(r, n_nodes, idx))

    def __call__(self, z):
        flat = np.atleast_1d(np.asarray(z, dtype=complex)).ravel()
        return self._combine(flat, np.atleast_1d(self.domain.phi_inside(flat)))
