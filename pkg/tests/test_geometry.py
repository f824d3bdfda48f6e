import math

import numpy as np
import pytest
from hypothesis import given, settings

from tests.strategies import disc_points
from unidisc.errors import ConfigError, DomainError
from unidisc.geometry.disc import (
    CarlesonSquare, INFINITY, carleson_contains, chordal_distance, horodisc, horodisc_parameter, hyperbolic_distance,
    hyperbolic_midpoint, mobius, normalize_angle, pseudo_hyperbolic_distance, pseudohyperbolic_disc,
)
from unidisc.geometry.regions import Annulus, DiscRegion, HalfDisc, UNIT_DISC, ladder_radii, region_from_dict


@settings(max_examples=50, deadline=None, derandomize=True)
@given(a=disc_points(0.9), z=disc_points(0.95))
def test_automorphism_is_an_involution(a, z):
    assert abs(mobius(a, mobius(a, z)) - z) <= 1e-10


@settings(max_examples=50, deadline=None, derandomize=True)
@given(a=disc_points(0.9), z=disc_points(0.9), w=disc_points(0.9))
def test_hyperbolic_distance_is_invariant(a, z, w):
    before = hyperbolic_distance(z, w)
    after = hyperbolic_distance(mobius(a, z), mobius(a, w))
    assert after == pytest.approx(before, rel=1e-7, abs=1e-9)


@settings(max_examples=50, deadline=None, derandomize=True)
@given(z=disc_points(0.9), w=disc_points(0.9))
def test_midpoint_is_equidistant(z, w):
    xi = hyperbolic_midpoint(z, w)
    total = hyperbolic_distance(z, w)
    assert hyperbolic_distance(z, xi) == pytest.approx(total / 2, abs=1e-8)
    assert hyperbolic_distance(xi, w) == pytest.approx(total / 2, abs=1e-8)


def test_distance_from_origin():
    assert hyperbolic_distance(0j, 0.5) == pytest.approx(math.atanh(0.5))
    assert pseudo_hyperbolic_distance(0j, 0.5j) == pytest.approx(0.5)


def test_hyperbolic_distance_needs_interior_points():
    with pytest.raises(DomainError):
        hyperbolic_distance(0j, 1.0)


def test_pseudohyperbolic_disc_boundary():
    alpha, rho = 0.6 + 0.2j, 0.4
    disc = pseudohyperbolic_disc(alpha, rho)
    boundary = disc.boundary_points(32)
    assert np.allclose(pseudo_hyperbolic_distance(alpha, boundary), rho)


def test_horodisc_is_tangent_to_the_circle():
    disc = horodisc(math.pi / 3, 0.75)
    assert disc.is_horodisc
    assert disc.radius == pytest.approx(0.25)


def test_horodisc_parameter():
    assert horodisc_parameter(3.0) == pytest.approx(0.9375)
    assert horodisc_parameter(1.0) == pytest.approx(0.75)


def test_carleson_square_membership():
    square = CarlesonSquare(0.0, math.pi / 2)
    assert square.inner_radius == pytest.approx(0.75)
    assert carleson_contains(square, 0.9 + 0j)
    assert not carleson_contains(square, 0.5 + 0j)
    assert not carleson_contains(square, 0.9j)
    with pytest.raises(DomainError):
        carleson_contains(square, 1.2 + 0j)


def test_chordal_distance_to_infinity():
    assert chordal_distance(0j, INFINITY) == pytest.approx(1.0)
    assert chordal_distance(INFINITY, INFINITY) == 0.0
    assert chordal_distance(1 + 0j, -1 + 0j) == pytest.approx(1.0)


def test_normalize_angle():
    assert normalize_angle(-math.pi) == pytest.approx(math.pi)
    assert normalize_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)


def test_ladder_radii():
    assert np.allclose(ladder_radii(depth=3), [0.0, 0.5, 0.75, 0.875])
    assert ladder_radii(depth=40, r_cap=0.99)[-1] == pytest.approx(0.99)


def test_regions_from_records():
    assert region_from_dict(None) is UNIT_DISC
    horo = region_from_dict({"kind": "horodisc", "theta": 0.0, "a": 0.5})
    assert isinstance(horo, DiscRegion)
    assert horo.to_dict() == {"kind": "horodisc", "center": [0.5, 0.0], "radius": 0.5}
    annulus = region_from_dict({"kind": "annulus", "inner": 0.5, "outer": 0.9})
    assert annulus == Annulus(0.5, 0.9)
    assert isinstance(region_from_dict({"kind": "half_disc", "theta": 0.0}), HalfDisc)


@pytest.mark.parametrize("record", [
    {"kind": "triangle"},
    {"kind": "annulus", "inner": 0.9, "outer": 0.5},
    {"kind": "disc", "center": [0.8, 0], "radius": 0.5},
    {"kind": "carleson", "theta_center": 0.0},
    "disc",
])
def test_invalid_region_records(record):
    with pytest.raises(ConfigError):
        region_from_dict(record)


def test_samples_stay_inside_and_are_seeded():
    region = Annulus(0.5, 0.9)
    first = region.sample(200, seed=7)
    again = region.sample(200, seed=7)
    assert np.array_equal(first, again)
    modulus = np.abs(first)
    assert np.all((modulus >= 0.5) & (modulus < 0.9))


def test_halton_samples_fill_a_horodisc():
    region = DiscRegion(horodisc(0.0, 0.75))
    points = region.sample(500, seed=1, method="halton")
    assert len(points) > 400
    assert np.all(region.contains(points))


def test_grid_points_are_inside_the_region():
    region = HalfDisc(math.pi / 2, 0.2)
    grid = region.grid(depth=5)
    assert len(grid) > 0
    assert np.all(np.imag(grid) > 0.2)
