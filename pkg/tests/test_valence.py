import cmath
import math

import numpy as np
import pytest

from unidisc.analytic.expressions import Identity, Power, Scale, Sum, values
from unidisc.errors import ContourError
from unidisc.geometry.disc import CarlesonSquare, Disc
from unidisc.geometry.regions import DiscRegion
from unidisc.valence.boundary import (
    BoundaryTrace, is_simple, polyline_winding, scanline_windings, sign_changes_real, trace_boundary,
)
from unidisc.valence.counting import (
    PreimageSet, carleson_sum, counting_bound_profile, dyadic_carleson_squares, preimages, valence_estimate,
    winding_number,
)
from unidisc.valence.experiments import boundary_is_simple, critical_C, valence_slope


def circle(turns=1, count=400):
    return np.exp(2j * math.pi * turns * np.arange(count) / count)


def test_winding_number_of_the_square():
    assert winding_number(Power(2), 0j, 0.5) == 2
    assert winding_number(Identity(), 0.9, 0.5) == 0


@pytest.mark.parametrize("r", [0.0, 1.0, 1.5])
def test_contour_radius_must_be_inside(r):
    with pytest.raises(ContourError):
        winding_number(Identity(), 0j, r)


def test_preimages_of_the_square():
    found = preimages(Power(2), 0.25)
    assert len(found) == 2
    assert sorted(found.points.real) == pytest.approx([-0.5, 0.5], abs=1e-9)
    assert found.cross_checked
    assert found.winding_count == 2


def test_counting_bound_profile():
    profile = counting_bound_profile(Power(2), 0.25, [0.6, 0.9])
    assert profile[0] == pytest.approx((0.6, 2 * math.sqrt(0.4)))
    assert profile[1] == pytest.approx((0.9, 2 * math.sqrt(0.1)))


def test_dyadic_squares_halve():
    squares = dyadic_carleson_squares(0.0, 3)
    assert [s.arclength for s in squares] == pytest.approx([2 * math.pi, math.pi, math.pi / 2])


def test_carleson_sum_counts_members_only():
    found = PreimageSet(0.25 + 0j, np.array([0.5, 0.9j]), np.zeros(2))
    result = carleson_sum(found, CarlesonSquare(math.pi / 2, math.pi / 2))
    assert result["members"] == 1
    assert result["sum"] == pytest.approx(math.sqrt(0.1))
    assert result["ratio"] == pytest.approx(math.sqrt(0.1) / math.sqrt(math.pi / 2))


def test_figure_eight_is_not_simple():
    t = 2 * math.pi * (np.arange(200) + 0.5) / 200
    trace = BoundaryTrace.from_points(np.sin(t) + 0.5j * np.sin(2 * t))
    result = is_simple(trace)
    assert not result["simple"]
    assert result["first_intersection"] is not None


def test_identity_trace_is_a_simple_circle():
    trace = trace_boundary(Identity())
    assert trace.complete
    assert is_simple(trace)["simple"]
    assert np.allclose(np.abs(trace.points), 1.0)


def test_polyline_winding_counts_turns():
    assert polyline_winding(circle(turns=2), 0.05 + 0.02j) == 2
    assert polyline_winding(circle(), 1.5) == 0


def test_scanline_windings_of_a_circle():
    scan = scanline_windings(circle(), levels=64)
    assert scan["max_winding"] == 1
    assert abs(scan["at"]) < 1


def test_sign_changes_of_the_real_part():
    assert sign_changes_real(Identity()) == 1
    assert sign_changes_real(Identity(), half=False) == 2


def test_sign_count_estimate():
    estimate = valence_estimate(Power(3), "sign-count")
    assert estimate.value == 3
    assert estimate.details["full_circle"] == 6


def test_winding_estimate_of_the_identity():
    estimate = valence_estimate(Identity(), "winding")
    assert estimate.value == 1
    assert estimate.cross_checked


def test_preimage_estimate_needs_a_target():
    with pytest.raises(ValueError):
        valence_estimate(Identity(), "preimage")
    with pytest.raises(ValueError):
        valence_estimate(Identity(), "dowsing")


def random_polynomial(seed):
    """z + sum c_k z^k with sum k|c_k| <= 1/2, so f' stays off zero on the closed disc"""
    rng = np.random.default_rng(seed)
    degree = int(rng.integers(2, 6))
    coefficients = rng.normal(size=degree - 1) + 1j * rng.normal(size=degree - 1)
    weights = np.arange(2, degree + 1) * np.abs(coefficients)
    coefficients *= rng.uniform(0.1, 0.5) / np.sum(weights)
    terms = (Identity(),) + tuple(Scale(complex(c), Power(k)) for k, c in enumerate(coefficients, start=2))
    return Sum(terms), rng


def count_three_ways(expr, w, r=0.9):
    contour = winding_number(expr, w, r)
    polyline = polyline_winding(values(expr, r * circle(count=2048)), w)
    newton = len(preimages(expr, w, region=DiscRegion(Disc(0j, r))))
    return contour, polyline, newton


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_counting_methods_agree_for_powers(k):
    for j in range(5):
        w = 0.3 * cmath.exp(1j * (2 * math.pi * j / 5 + 0.1))
        assert count_three_ways(Power(k), w) == (k, k, k)


@pytest.mark.parametrize("seed", range(20))
def test_counting_methods_agree_for_random_polynomials(seed):
    expr, rng = random_polynomial(seed)
    starts = 0.5 * np.sqrt(rng.uniform(size=4)) * np.exp(2j * math.pi * rng.uniform(size=4))
    for w in list(values(expr, starts)) + [3.0]:
        expected = 0 if w == 3.0 else 1
        assert count_three_ways(expr, complex(w)) == (expected, expected, expected)


@pytest.mark.slow
@pytest.mark.parametrize("C,zeta,simple", [(1.0, -1j, True), (2.5, -1j, False), (6.5, 1 + 0j, False)])
def test_example_family_boundary_simpleness(C, zeta, simple):
    assert boundary_is_simple(C, zeta) is simple


@pytest.mark.slow
def test_critical_constant_toward_minus_i():
    assert 2.16 <= critical_C(-1j, 0.01) <= 2.26


@pytest.mark.slow
def test_valence_grows_with_the_constant():
    sweep = valence_slope(-1j, [1.0, 2.5, 5.0, 10.0])
    by_C = dict(sweep["per_C"])
    assert by_C[1.0] == 1
    assert by_C[2.5] >= 2
    assert sweep["monotone"]
    assert [c for c, _ in sweep["sign_counts"]] == [1.0, 2.5, 5.0, 10.0]
    assert sweep["reference_slope"] == pytest.approx(100 / 63)


def test_valence_slope_rejects_non_positive_constants():
    with pytest.raises(ValueError):
        valence_slope(-1j, [0.0])
