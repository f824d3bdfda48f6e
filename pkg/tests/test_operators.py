import numpy as np
import pytest
from hypothesis import given, settings

from tests.strategies import disc_points, real_points
from unidisc.analytic.expressions import Affine, Compose, ExampleFamily, Identity, Koebe, Mobius, OddPoly, Power
from unidisc.errors import CriticalPointError
from unidisc.operators.derivatives import (
    becker_quantity, compose_pre_schwarzian, hv_margin, koebe_bounds_check, koebe_converse_margin,
    log_derivative_lipschitz_check, nehari_quantity, pre_schwarzian, schwarzian, spherical_derivative,
)
from unidisc.operators.norms import (
    bloch_lipschitz_check, bloch_norm, norm_inequality_report, normal_norm, pre_schwarzian_norm, schwarzian_norm,
    weighted_sup_norm,
)


@settings(max_examples=50, deadline=None, derandomize=True)
@given(z=disc_points(0.9))
def test_koebe_closed_forms(z):
    p = pre_schwarzian(Koebe(), z)
    s = schwarzian(Koebe(), z)
    assert p == pytest.approx((4 + 2 * z) / (1 - z * z), rel=1e-10)
    assert s == pytest.approx(-6 / (1 - z * z) ** 2, rel=1e-9)


@settings(max_examples=50, deadline=None, derandomize=True)
@given(x=real_points(0.99))
def test_koebe_attains_six_on_the_real_axis(x):
    assert nehari_quantity(Koebe(), x) == pytest.approx(6.0, abs=1e-9)


@settings(max_examples=30, deadline=None, derandomize=True)
@given(z=disc_points(0.95))
def test_mobius_has_zero_schwarzian(z):
    assert abs(schwarzian(Mobius(0.3 + 0.2j), z)) <= 1e-8


def test_example_family_pre_schwarzian():
    z = 0.4 - 0.2j
    expr = ExampleFamily(3.0, -1j)
    assert pre_schwarzian(expr, z) == pytest.approx(1 / (1 - z * z) + 3.0 * -1j / 2, rel=1e-12)


@settings(max_examples=40, deadline=None, derandomize=True)
@given(z=disc_points(0.9))
def test_chain_rule_for_composition(z):
    inner = Affine(0.1j, 0.5)
    direct = pre_schwarzian(Compose(Koebe(), inner), z)
    assert compose_pre_schwarzian(Koebe(), inner, z) == pytest.approx(direct, rel=1e-10)


def test_vectorized_operators_keep_shape():
    z = np.array([0.1, 0.2j, -0.5 + 0.1j])
    assert becker_quantity(Koebe(), z).shape == (3,)
    assert nehari_quantity(Koebe(), z).shape == (3,)


def test_critical_point_is_reported():
    with pytest.raises(CriticalPointError) as info:
        pre_schwarzian(Power(2), np.array([0.5, 0.0]))
    assert info.value.point == 0


def test_spherical_derivative_of_identity():
    assert spherical_derivative(Identity(), 0j) == pytest.approx(1.0)
    assert spherical_derivative(Identity(), 0.5) == pytest.approx(1 / 1.25)


def test_growth_margin():
    # P = 0 for the identity, so the margin is the right-hand side
    assert hv_margin(Identity(), 2.0, 0.5) == pytest.approx(2.0)
    assert hv_margin(Koebe(), 1.0, 0j) == pytest.approx(-2.0)


def test_koebe_bounds_hold_for_univalent_maps():
    points = [0.5, -0.3 + 0.4j, 0.9j, 0.95]
    report = koebe_bounds_check(Koebe(), points)
    assert report["normalized"]
    assert report["holds"]
    assert report["worst_ratio"]["growth"] == pytest.approx(1.0)


def test_koebe_bounds_flag_unnormalized_maps():
    report = koebe_bounds_check(Affine(0, 3), [0.1])
    assert not report["normalized"]
    assert not report["holds"]


@settings(max_examples=40, deadline=None, derandomize=True)
@given(z=disc_points(0.9))
def test_converse_margin_is_nonnegative_for_koebe(z):
    assert koebe_converse_margin(Koebe(), z) >= -1e-9 * (1 + 1 / (1 - abs(z) ** 2))


def test_log_derivative_is_lipschitz_for_koebe():
    pairs = [(0.5, -0.5), (0.9j, 0.2), (0.1 + 0.1j, 0.7)]
    report = log_derivative_lipschitz_check(Koebe(), pairs, B=6.0, C=0.0)
    assert report["holds"]
    assert report["pairs_tested"] == 3


def test_pre_schwarzian_norm_of_koebe():
    estimate = pre_schwarzian_norm(Koebe(), depth=16)
    assert estimate.value == pytest.approx(6.0, abs=1e-3)
    assert estimate.value <= 6.0 + 1e-9
    assert estimate.ladder[0][0] == 0.0


def test_schwarzian_norm_of_koebe():
    estimate = schwarzian_norm(Koebe(), depth=10)
    assert estimate.value == pytest.approx(6.0, abs=1e-9)


def test_sharp_polynomial_bound():
    estimate = pre_schwarzian_norm(OddPoly(1), depth=16)
    assert estimate.value == pytest.approx(4.0, abs=1e-3)


def test_bloch_and_normal_norms_of_identity():
    assert bloch_norm(Identity(), depth=8).value == pytest.approx(1.0)
    assert normal_norm(Identity(), depth=8).value == pytest.approx(1.0)


def test_zero_field_converges():
    estimate = weighted_sup_norm(lambda z: np.zeros(np.shape(z)), depth=6)
    assert estimate.value == 0.0
    assert estimate.converged


def test_norm_inequalities_for_koebe():
    report = norm_inequality_report(Koebe(), depth=16)
    assert report["forward"]["holds"]
    assert report["converse"]["holds"]
    assert report["converse"]["gap"] == pytest.approx(0.0, abs=1e-2)


def test_bloch_lipschitz_check():
    norm = bloch_norm(Identity(), depth=8).value
    report = bloch_lipschitz_check(Identity(), [(0.1, 0.5), (0.3j, -0.6)], norm)
    assert report["holds"]
