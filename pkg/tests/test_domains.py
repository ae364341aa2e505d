import math

import numpy as np
import pytest
from scipy.spatial import cKDTree
from scipy.special import beta as beta_fn

from app.core.complexpoly import ComplexPoly
from app.core.domains import (
    HpClass,
    ModelHolder,
    PullbackIntegrand,
    Rectangle,
    RegularPolygon,
    UnitDisk,
    boundary_normals,
    boundary_points,
    contains,
    dist_to_boundary,
    domain_from_spec,
    exterior_distance,
    hp_classification,
    sup_on_boundary,
    vertex,
)
from app.core.errors import OutsideDomainError, PrevertexProximityError
from app.core.quadrature import adaptive_circle_mean, disk_integral


@pytest.fixture(scope="module")
def square():
    return RegularPolygon(4)


def test_unit_disk():
    d = UnitDisk()
    assert d.phi(0.3 + 0.2j) == 0.3 + 0.2j
    assert d.phi_prime(0.5) == 1.0
    assert dist_to_boundary(d, 0.5) == pytest.approx(0.5)
    assert exterior_distance(d, 2.0) == pytest.approx(1.0)
    with pytest.raises(OutsideDomainError):
        dist_to_boundary(d, 2.0)
    assert d.inradius == pytest.approx(1.0)


@pytest.mark.parametrize("k", range(4))
def test_square_vertices(square, k):
    assert abs(vertex(square, k) - np.exp(2j * np.pi * k / 4)) < 1e-8


def test_polygon_phi(square):
    assert square.phi(0.0) == 0.0
    n = 64
    grid = square.phi_on_grid(0.9, n)
    direct = square.phi(0.9 * np.exp(2j * np.pi * np.arange(n) / n))
    assert np.allclose(grid, direct, atol=1e-10)
    # symmetric under rotation by a quarter turn
    assert square.phi(0.5j) == pytest.approx(1j * square.phi(0.5), abs=1e-12)
    with pytest.raises(PrevertexProximityError):
        square.phi(1.0 - 1e-8)


def test_polygon_phi_matches_derivative(square):
    z, h = 0.4 + 0.3j, 1e-6
    slope = (square.phi(z + h) - square.phi(z - h)) / (2 * h)
    assert slope == pytest.approx(square.phi_prime(z), rel=1e-6)


def test_polygon_geometry(square):
    assert square.inradius == pytest.approx(math.cos(math.pi / 4))
    assert contains(square, 0.5)
    assert not contains(square, 0.8 + 0.8j)
    assert exterior_distance(square, 2.0) == pytest.approx(1.0)
    assert exterior_distance(square, 0.1) == 0.0
    assert boundary_points(square, np.array([0.0]))[0] == pytest.approx(1.0)
    assert boundary_points(square, np.array([0.125]))[0] == pytest.approx(0.5 + 0.5j)
    assert boundary_normals(square, np.array([0.125]))[0] == pytest.approx((1 + 1j) / math.sqrt(2))


def test_inner_polygon(square):
    rho = 0.2
    inner = square.inner_polygon(rho)
    assert np.allclose(inner, (1 - rho / square.inradius) * square.vertices())
    with pytest.raises(ValueError):
        square.inner_polygon(1.0)


def test_rectangle():
    rect = Rectangle(1.0, 0.5)
    assert abs(vertex(rect, 0) - (1.0 + 0.5j)) < 1e-6
    assert abs(vertex(rect, 2) - (-1.0 - 0.5j)) < 1e-6
    assert rect.inradius == 0.5
    square = Rectangle(1.0, 1.0)
    assert square.theta0 == pytest.approx(math.pi / 4)
    assert abs(vertex(square, 1) - (-1.0 + 1.0j)) < 1e-6


def test_model_holder():
    d = ModelHolder(0.5)
    z, h = 0.3 - 0.2j, 1e-6
    slope = (d.phi(z + h) - d.phi(z - h)) / (2 * h)
    assert slope == pytest.approx(d.phi_prime(z), rel=1e-6)
    assert contains(d, 0.1)
    assert not contains(d, 5.0)
    assert list(d.singular_angles) == [0.0]
    with pytest.raises(ValueError):
        ModelHolder(1.5)


def test_hp_classification(square):
    assert hp_classification(UnitDisk(), 10.0) == HpClass.FINITE
    assert hp_classification(square, 1.5) == HpClass.FINITE
    assert hp_classification(square, 2.0) == HpClass.INFINITE
    assert hp_classification(Rectangle(1.0, 0.5), 2.0) == HpClass.INFINITE
    assert hp_classification(ModelHolder(0.5), 1.0) == HpClass.FINITE
    assert hp_classification(ModelHolder(0.5), 2.0) == HpClass.INFINITE
    with pytest.raises(ValueError):
        hp_classification(square, 0.0)


def test_domain_from_spec():
    assert isinstance(domain_from_spec("unit_disk"), UnitDisk)
    hexagon = domain_from_spec("regular_polygon", sides=6)
    assert hexagon.sides == 6 and hexagon.circumradius == 1.0
    assert domain_from_spec("rectangle", half_width=2.0, half_height=1.0).describe() == "rectangle(a=2;b=1)"
    with pytest.raises(ValueError):
        domain_from_spec("annulus")


def test_sup_on_boundary(square):
    disk_sup = sup_on_boundary(UnitDisk(), lambda w: 1.0 + w)
    assert disk_sup.value == pytest.approx(2.0, abs=1e-9)
    # attained at a vertex, which is always sampled
    corner = sup_on_boundary(square, np.abs, samples=100)
    assert corner.value == pytest.approx(1.0, abs=1e-12)


def test_pullback_on_disk_is_identity():
    integrand = PullbackIntegrand(UnitDisk(), ComplexPoly([0.0, 1.0]), p=1.0)
    assert np.allclose(integrand.on_circle_grid(0.5, 8), 1.0)
    assert disk_integral(integrand, 1.0, 0.0).value == pytest.approx(1.0, abs=1e-9)


@pytest.mark.slow
def test_pullback_recovers_square_area(square):
    # |phi'|^2 integrates to the area of the image
    integrand = PullbackIntegrand(square, ComplexPoly([0.0, 1.0]), p=2.0)
    area = disk_integral(integrand, 1.0, 0.0, tol=1e-6)
    assert area.value == pytest.approx(2.0 / math.pi, abs=1e-4)


def test_square_derivative_closed_form(square):
    c = 4.0 / beta_fn(0.25, 0.5)
    assert square.phi_prime(0.0) == pytest.approx(c)
    z = np.array([0.3, 0.5 + 0.4j, -0.7j, 0.99 * np.exp(0.1j)])
    factors = np.prod([np.power(1.0 - z * np.exp(-0.5j * np.pi * k), -0.5) for k in range(4)], axis=0)
    assert np.allclose(square.phi_prime(z), c * (1.0 - z ** 4) ** -0.5)
    assert np.allclose(square.phi_prime(z), c * factors)


@pytest.mark.parametrize("d", [RegularPolygon(4), RegularPolygon(6), ModelHolder(0.5)],
                         ids=["square", "hexagon", "model_holder"])
def test_holder_bound_on_a_grid(d):
    # |phi'(z)| (1 - |z|)^alpha stays below phi'(0) up to the circle
    radii = 1.0 - 2.0 ** -np.arange(1, 25)
    z = radii[:, None] * np.exp(2j * np.pi * np.arange(256) / 256)[None, :]
    scaled = np.abs(d.phi_prime(z)) * (1.0 - np.abs(z)) ** d.holder_exponent
    assert np.max(scaled) <= abs(d.phi_prime(0.0)) * (1.0 + 1e-12)
    # and does not decay to zero along the ray to a prevertex
    assert scaled[-1, 0] >= 0.5 * scaled[0, 0]


@pytest.mark.parametrize("d", [RegularPolygon(4), RegularPolygon(6), Rectangle(1.0, 0.5)],
                         ids=["square", "hexagon", "rectangle"])
def test_boundary_length_matches_perimeter(d):
    r = 1.0 - 1e-4
    mean = adaptive_circle_mean(d.phi_prime, r, 1.0, tol=1e-8, breakpoints=d.singular_angles)
    assert mean.converged
    length = 2.0 * math.pi * r * mean.value
    assert length == pytest.approx(d.perimeter, rel=0.01)
    # level curves of a convex domain are convex, so never longer than the boundary
    assert length <= d.perimeter * (1.0 + 1e-6)


@pytest.mark.parametrize("d", [UnitDisk(), RegularPolygon(4), RegularPolygon(6), Rectangle(1.0, 0.5)],
                         ids=["disk", "square", "hexagon", "rectangle"])
def test_distance_to_boundary_is_controlled_by_derivative(d):
    radii = np.array([0.0, 0.3, 0.6, 0.9, 0.99])[:, None]
    z = (radii * np.exp(2j * np.pi * (np.arange(32) + 0.25) / 32)[None, :]).ravel()
    distance = d.signed_distance(np.asarray(d.phi(z)))
    bound = np.abs(d.phi_prime(z)) * (1.0 - np.abs(z) ** 2)
    assert np.all(distance > 0.0)
    assert np.all(distance <= bound * (1.0 + 1e-9) + 1e-12)


@pytest.mark.parametrize("d", [RegularPolygon(4), Rectangle(1.0, 0.5), ModelHolder(0.5)],
                         ids=["square", "rectangle", "model_holder"])
def test_phi_is_injective_on_random_points(d):
    rng = np.random.default_rng(11)
    z = 0.99 * np.sqrt(rng.random(10_000)) * np.exp(2j * np.pi * rng.random(10_000))
    w = np.asarray(d.phi(z))
    separation, _ = cKDTree(np.column_stack([w.real, w.imag])).query(np.column_stack([w.real, w.imag]), k=2)
    assert np.min(separation[:, 1]) > 0.0
    assert all(contains(d, point) for point in w[:200])
