import cmath

import numpy as np
import pytest
from hypothesis import given, settings

from tests.strategies import disc_points
from unidisc.analytic.expressions import (
    Affine, Compose, Constant, ExampleFamily, Exp, Identity, Koebe, Mobius, NegPower, OddPoly, Power, Product,
    Quotient, eval_derivative_jet, eval_jet, values,
)
from unidisc.analytic.jets import Jet2
from unidisc.errors import DomainError, SingularPointError


def central_difference(expr, z, h=1e-6):
    return (values(expr, z + h) - values(expr, z - h)) / (2 * h)


def test_jet_of_square():
    u = Jet2.variable(0.3 + 0.2j)
    square = (u * u).item()
    assert square.f == pytest.approx((0.3 + 0.2j) ** 2)
    assert square.df == pytest.approx(2 * (0.3 + 0.2j))
    assert square.d2f == pytest.approx(2)


@settings(max_examples=40, deadline=None, derandomize=True)
@given(z=disc_points(0.8))
def test_quotient_rule_matches_closed_form(z):
    # exp(z) / (1 + z): derivative exp(z) z / (1 + z)^2
    expr = Quotient(Exp(), Affine(1, 1))
    jet = eval_jet(expr, z)
    expected = cmath.exp(z) * z / (1 + z) ** 2
    assert abs(jet.df - expected) <= 1e-12 * (1 + abs(expected))


@settings(max_examples=40, deadline=None, derandomize=True)
@given(z=disc_points(0.8))
def test_first_derivative_matches_finite_difference(z):
    expr = Product((Exp(), Compose(Power(0.5), Affine(1, 1)), NegPower(1.5)))
    jet = eval_jet(expr, z)
    assert abs(jet.df - central_difference(expr, z)) <= 1e-5 * (1 + abs(jet.df))


@settings(max_examples=40, deadline=None, derandomize=True)
@given(z=disc_points(0.9))
def test_derivative_descriptor_agrees_with_jet(z):
    for expr in (Koebe(), Mobius(0.4 - 0.3j), OddPoly(2), NegPower(2.5)):
        jet = eval_jet(expr, z)
        derivative = eval_derivative_jet(expr, z)
        assert abs(derivative.f - jet.df) <= 1e-10 * (1 + abs(jet.df))
        assert abs(derivative.df - jet.d2f) <= 1e-10 * (1 + abs(jet.d2f))


@settings(max_examples=40, deadline=None, derandomize=True)
@given(z=disc_points(0.95))
def test_mobius_is_an_involution(z):
    phi = Mobius(0.5 + 0.25j)
    assert abs(values(phi, values(phi, z)) - z) <= 1e-12


def test_koebe_values():
    assert values(Koebe(), 0.5) == pytest.approx(2.0)
    assert values(Koebe(), -0.5) == pytest.approx(-2 / 9)


def test_points_outside_disc_are_rejected():
    with pytest.raises(DomainError):
        eval_jet(Identity(), 1.0)
    with pytest.raises(DomainError):
        eval_jet(Koebe(), np.array([0.1, 1.5j]))


def test_declared_singularity_is_rejected():
    with pytest.raises(SingularPointError) as info:
        eval_jet(Power(0.5), 0j)
    assert info.value.point == 0


def test_integer_powers_have_no_singularity():
    assert eval_jet(Power(3), 0j).f == 0
    assert Power(2).singularities() == ()


def test_compose_pulls_back_outer_singularities():
    points = Compose(Koebe(), Power(2)).singularities()
    assert len(points) == 2
    assert sorted(round(p.real, 8) for p in points) == [-1.0, 1.0]
    assert all(abs(p.imag) < 1e-8 for p in points)

    assert Compose(Koebe(), Affine(0, 0.5)).singularities() == ()
    points = Compose(Koebe(), Power(0.5)).singularities()
    assert 0j in points
    assert any(abs(p - 1) < 1e-8 for p in points)


def test_array_evaluation_keeps_shape():
    z = np.array([[0.1, 0.2j], [-0.3, 0.4 + 0.1j]])
    jet = eval_jet(Koebe(), z)
    assert jet.f.shape == (2, 2)


def test_example_family_rejects_zeta_off_the_circle():
    with pytest.raises(DomainError):
        ExampleFamily(1.0, 0.5)


def test_example_family_derivative():
    expr = ExampleFamily(2.0, -1j)
    z = 0.3 + 0.1j
    expected = -1j * cmath.sqrt((1 + z) / (1 - z)) * cmath.exp(2.0 * -1j * z / 2)
    assert eval_jet(expr.derivative(), z).f == pytest.approx(expected, rel=1e-12)


def test_example_family_values_are_a_primitive():
    expr = ExampleFamily(1.0, 1)
    z = 0.2 - 0.3j
    assert abs(central_difference(expr, z, 1e-4) - eval_jet(expr, z).df) <= 1e-5


def test_constant_has_zero_derivative():
    assert eval_jet(Constant(2 + 1j), 0.5).df == 0
