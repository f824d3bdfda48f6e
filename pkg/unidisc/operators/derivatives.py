"""Pointwise differential operators: P(f), S(f), f# and the criterion quantities

All functions accept a complex scalar or an array of interior points and return
a matching scalar or array. P and S are computed from the jet of the derivative
descriptor, (f', f'', f'''), so maps defined through a primitive never need
their values here.
"""

import logging
from typing import Any, Dict, Iterable, Tuple

import numpy as np

from config.settings import settings
from unidisc.analytic.expressions import MapExpr, Quotient, eval_jet
from unidisc.analytic.integration import integrate_path
from unidisc.analytic.jets import Jet2
from unidisc.errors import CriticalPointError
from unidisc.geometry.disc import hyperbolic_distance

logger = logging.getLogger(__name__)


def _scalar_or_array(value, scalar: bool):
    return complex(value) if scalar else value


def derivative_jet(expr: MapExpr, z: Any) -> Jet2:
    """
    Jet of f' at z, i.e. (f', f'', f''')

    Raises:
        CriticalPointError: |f'| below settings.CRITICAL_POINT_EPS somewhere
    """
    jet = eval_jet(expr.derivative(), z)
    small = np.abs(jet.f) < settings.CRITICAL_POINT_EPS
    if np.any(small):
        point = complex(np.ravel(np.asarray(z, dtype=complex))[np.argmax(np.ravel(small))])
        raise CriticalPointError(f"f' vanishes at {point}", point)
    return jet


def pre_schwarzian_jet(expr: MapExpr, z: Any) -> Tuple[Any, Any]:
    """(P, P') at z"""
    jet = derivative_jet(expr, z)
    p = jet.df / jet.f
    dp = jet.d2f / jet.f - p ** 2
    return p, dp


def pre_schwarzian(expr: MapExpr, z: Any):
    """P(f) = f''/f'"""
    p, _ = pre_schwarzian_jet(expr, z)
    return _scalar_or_array(p, np.ndim(z) == 0)


def schwarzian(expr: MapExpr, z: Any):
    """S(f) = P' - P^2/2"""
    p, dp = pre_schwarzian_jet(expr, z)
    return _scalar_or_array(dp - 0.5 * p ** 2, np.ndim(z) == 0)


def spherical_derivative(expr: MapExpr, z: Any):
    """f#(z) = |f'(z)| / (1 + |f(z)|^2)"""
    jet = eval_jet(expr, z)
    value = np.abs(jet.df) / (1 + np.abs(jet.f) ** 2)
    return float(value) if np.ndim(z) == 0 else value


def disc_weight(z: Any, power: float = 1.0):
    """(1 - |z|^2)^power, factored to keep precision near the circle"""
    modulus = np.abs(np.asarray(z, dtype=complex))
    return ((1 - modulus) * (1 + modulus)) ** power


def _real_result(value, z):
    return float(value) if np.ndim(z) == 0 else value


def becker_quantity(expr: MapExpr, z: Any):
    """Unweighted Becker quantity |P(f)|(1 - |z|^2)"""
    p, _ = pre_schwarzian_jet(expr, z)
    return _real_result(np.abs(p) * disc_weight(z), z)


def becker_quantity_z(expr: MapExpr, z: Any):
    """|z P(f)|(1 - |z|^2)"""
    p, _ = pre_schwarzian_jet(expr, z)
    return _real_result(np.abs(np.asarray(z) * p) * disc_weight(z), z)


def nehari_quantity(expr: MapExpr, z: Any):
    """|S(f)|(1 - |z|^2)^2"""
    p, dp = pre_schwarzian_jet(expr, z)
    return _real_result(np.abs(dp - 0.5 * p ** 2) * disc_weight(z, 2), z)


def hv_margin(expr: MapExpr, C: float, z: Any):
    """(1 + C(1 - |z|)) - |P(f)|(1 - |z|^2); non-negative where the growth condition holds"""
    p, _ = pre_schwarzian_jet(expr, z)
    modulus = np.abs(np.asarray(z, dtype=complex))
    return _real_result(1 + C * (1 - modulus) - np.abs(p) * disc_weight(z), z)


def koebe_converse_margin(expr: MapExpr, z: Any):
    """4|z|/(1-|z|^2) - |z P(f) - 2|z|^2/(1-|z|^2)|; non-negative for univalent f"""
    p, _ = pre_schwarzian_jet(expr, z)
    z = np.asarray(z, dtype=complex)
    w = disc_weight(z)
    gap = np.abs(z * p - 2 * np.abs(z) ** 2 / w)
    return _real_result(4 * np.abs(z) / w - gap, z)


def compose_pre_schwarzian(outer: MapExpr, inner: MapExpr, z: Any):
    """
    P(f o T)(z) through the chain rule P(f)(T(z)) T'(z) + P(T)(z)

    Args:
        outer: f
        inner: T, mapping the points into the disc
    """
    t_jet = eval_jet(inner, z)
    p_outer, _ = pre_schwarzian_jet(outer, t_jet.f)
    p_inner = t_jet.d2f / t_jet.df
    return _scalar_or_array(p_outer * t_jet.df + p_inner, np.ndim(z) == 0)


def koebe_bounds_check(expr: MapExpr, zs: Iterable[complex]) -> Dict[str, Any]:
    """
    Growth and distortion bounds of a normalized univalent map against the Koebe function

    Checks |f| <= k(r), |f'| <= k'(r), |f'/f| <= k'(r)/k(r) and |f''/f'| <= k''(r)/k'(r),
    with r = |z|. The map is expected to satisfy f(0) = 0, f'(0) = 1.
    """
    zs = np.asarray(list(zs), dtype=complex)
    zs = zs[zs != 0]
    jet = eval_jet(expr, zs)
    r = np.abs(zs)
    k0 = r / (1 - r) ** 2
    k1 = (1 + r) / (1 - r) ** 3
    k2 = (4 + 2 * r) / (1 - r) ** 4
    ratios = {
        "growth": np.abs(jet.f) / k0,
        "distortion": np.abs(jet.df) / k1,
        "log_growth": np.abs(jet.df / jet.f) / (k1 / k0),
        "log_distortion": np.abs(jet.d2f / jet.df) / (k2 / k1),
    }
    normalized = abs(complex(eval_jet(expr, 0j).f)) < 1e-9 and abs(complex(eval_jet(expr, 0j).df) - 1) < 1e-9
    if not normalized:
        logger.warning("Koebe bounds assume f(0) = 0 and f'(0) = 1; the map is not normalized")
    worst = {name: float(np.max(values, initial=0.0)) for name, values in ratios.items()}
    return {
        "normalized": normalized,
        "worst_ratio": worst,
        "holds": all(v <= 1 + settings.CRITERION_TOL for v in worst.values()),
        "samples_evaluated": int(zs.size),
    }


def log_derivative_lipschitz_check(expr: MapExpr, pairs: Iterable[Tuple[complex, complex]], B: float, C: float) -> Dict[str, Any]:
    """
    Check |log f'(z) - log f'(w)| <= B d_H + C (1 - |z+w|/2 + |z-w|/2) d_H over pairs

    log f' is continued along the segment by integrating P(f).
    """
    derivative = expr.derivative()
    log_derivative = Quotient(derivative.derivative(), derivative)
    worst_margin, worst_pair = np.inf, None
    count = 0
    for z, w in pairs:
        count += 1
        change = abs(integrate_path(log_derivative, w, z))
        d = hyperbolic_distance(z, w)
        bound = B * d + C * (1 - abs(z + w) / 2 + abs(z - w) / 2) * d
        margin = bound - change
        if margin < worst_margin:
            worst_margin, worst_pair = margin, (complex(z), complex(w))
    return {
        "holds": bool(worst_margin >= -settings.CRITERION_TOL),
        "worst_margin": float(worst_margin),
        "worst_pair": worst_pair,
        "pairs_tested": count,
    }
