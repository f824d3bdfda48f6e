import math

import numpy as np
import pytest

from unidisc.analytic.expressions import Constant, ExampleFamily, Koebe, values
from unidisc.analytic.integration import circle_values, integrate_path, integrate_polyline
from unidisc.errors import DomainError


def test_constant_integrand():
    assert integrate_path(Constant(1), 0.1, 0.5 + 0.3j) == pytest.approx(0.4 + 0.3j, abs=1e-12)


def test_koebe_derivative_integrates_to_koebe():
    assert integrate_path(Koebe().derivative(), 0j, 0.5) == pytest.approx(2.0, rel=1e-10)


def test_integration_toward_singular_endpoint():
    # k' has a pole at 1, so the integral along [0, r] grows like 1/(1 - r)^2
    r = 0.99
    assert integrate_path(Koebe().derivative(), 0j, r) == pytest.approx(r / (1 - r) ** 2, rel=1e-9)


def test_polyline_is_path_independent():
    derivative = Koebe().derivative()
    direct = integrate_path(derivative, -0.5, 0.5j)
    around = integrate_polyline(derivative, [-0.5, -0.5j, 0.5, 0.5j])
    assert around == pytest.approx(direct, abs=1e-9)


def test_endpoint_outside_closed_disc():
    with pytest.raises(DomainError):
        integrate_path(Constant(1), 0j, 1.5)


def test_primitive_values_match_path_integrals():
    expr = ExampleFamily(1.0, 1)
    gap = values(expr, 0.3 + 0j) - values(expr, -0.2 + 0j)
    assert gap == pytest.approx(integrate_path(expr.derivative(), -0.2, 0.3), abs=1e-9)


def test_circle_values_of_a_primitive():
    expr = ExampleFamily(2.0, -1j)
    thetas = np.linspace(-math.pi, math.pi, 65)
    along = circle_values(expr, 0.5, thetas)
    direct = values(expr, 0.5 * np.exp(1j * thetas))
    assert np.max(np.abs(along - direct)) <= 1e-8


def test_circle_values_of_a_closed_form_map():
    thetas = np.linspace(0, math.pi, 9)
    expected = values(Koebe(), 0.7 * np.exp(1j * thetas))
    assert np.allclose(circle_values(Koebe(), 0.7, thetas), expected)
