"""Weighted sup-norms over the disc and the norm inequalities"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from config.settings import settings
from unidisc.analytic.expressions import MapExpr, eval_jet
from unidisc.geometry.disc import chordal_distances, hyperbolic_distance
from unidisc.geometry.regions import ladder_radii, ring_points, ring_size
from unidisc.operators.derivatives import pre_schwarzian_jet

logger = logging.getLogger(__name__)

ScalarField = Callable[[np.ndarray], np.ndarray]


@dataclass
class NormEstimate:
    """Lower estimate of sup |g(z)|(1 - |z|^2)^p with the per-ring maxima"""
    value: float
    argmax: complex
    ladder: List[Tuple[float, float]] = field(default_factory=list)
    converged: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "argmax": [self.argmax.real, self.argmax.imag],
            "ladder": [[r, v] for r, v in self.ladder],
            "converged": self.converged,
        }


def _weighted(field_fn: ScalarField, p: float) -> ScalarField:
    def weighted(z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            values = np.asarray(field_fn(z), dtype=float) * (1 - np.abs(z) ** 2) ** p
        return np.where(np.isfinite(values), values, -np.inf)
    return weighted


def _polish(weighted: ScalarField, point: complex, value: float, radii: np.ndarray, r_cap: float) -> Tuple[complex, float]:
    """Alternate bounded radial and angular searches around the best grid point"""
    for _ in range(settings.POLISH_ROUNDS):
        r, theta = abs(point), math.atan2(point.imag, point.real)
        position = int(np.searchsorted(radii, r))
        lo = radii[max(position - 1, 0)]
        hi = min(radii[min(position + 1, len(radii) - 1)], r_cap)
        if hi > lo:
            radial = minimize_scalar(
                lambda s: -float(weighted(np.array([s * np.exp(1j * theta)]))[0]),
                bounds=(lo, hi), method="bounded", options={"xatol": (hi - lo) * 1e-7},
            )
            if -radial.fun > value:
                value, point = -radial.fun, complex(radial.x * np.exp(1j * theta))
                r = radial.x
        if r > 0:
            width = 2 * math.pi / ring_size(r)
            angular = minimize_scalar(
                lambda a: -float(weighted(np.array([r * np.exp(1j * a)]))[0]),
                bounds=(theta - width, theta + width), method="bounded", options={"xatol": width * 1e-7},
            )
            if -angular.fun > value:
                value, point = -angular.fun, complex(r * np.exp(1j * angular.x))
    return point, value


def weighted_sup_norm(field_fn: ScalarField, p: float = 1.0, tol: Optional[float] = None,
                      r_cap: Optional[float] = None, depth: Optional[int] = None) -> NormEstimate:
    """
    Estimate sup over the disc of field(z) (1 - |z|^2)^p

    Args:
        field_fn: Vectorized non-negative scalar field
        p: Weight exponent
        tol: Relative change between successive rings that counts as converged
        r_cap: Largest radius evaluated
        depth: Number of dyadic rings

    Returns:
        NormEstimate; ``converged`` is False when the last ring still moved the estimate
    """
    tol = settings.NORM_TOL if tol is None else tol
    r_cap = settings.R_CAP if r_cap is None else r_cap
    weighted = _weighted(field_fn, p)
    radii = ladder_radii(depth, r_cap)

    best_value, best_point = -np.inf, 0j
    ladder: List[Tuple[float, float]] = []
    previous = -np.inf
    for r in radii:
        points = ring_points(float(r))
        values = weighted(points)
        index = int(np.argmax(values))
        ring_sup = float(values[index])
        ladder.append((float(r), ring_sup))
        previous = best_value
        if ring_sup > best_value:
            best_value, best_point = ring_sup, complex(points[index])

    if not np.isfinite(best_value):
        logger.warning("Weighted field is not finite anywhere on the grid")
        return NormEstimate(float("nan"), best_point, ladder, False)

    grid_value = best_value
    best_point, best_value = _polish(weighted, best_point, best_value, radii, r_cap)
    scale = max(abs(grid_value), 1e-300)
    converged = abs(grid_value - previous) <= tol * scale if np.isfinite(previous) else grid_value == 0
    if not converged:
        logger.warning(f"Sup-norm estimate still moving at r={radii[-1]:.3g}: {previous:.6g} -> {grid_value:.6g}")
    return NormEstimate(float(best_value), best_point, ladder, bool(converged))


def pre_schwarzian_norm(expr: MapExpr, **kwargs) -> NormEstimate:
    """||P(f)|| with weight (1 - |z|^2)"""
    return weighted_sup_norm(lambda z: np.abs(pre_schwarzian_jet(expr, z)[0]), 1.0, **kwargs)


def schwarzian_norm(expr: MapExpr, **kwargs) -> NormEstimate:
    """||S(f)|| with weight (1 - |z|^2)^2"""
    def field_fn(z):
        p, dp = pre_schwarzian_jet(expr, z)
        return np.abs(dp - 0.5 * p ** 2)
    return weighted_sup_norm(field_fn, 2.0, **kwargs)


def bloch_norm(expr: MapExpr, **kwargs) -> NormEstimate:
    """sup |f'(z)|(1 - |z|^2)"""
    derivative = expr.derivative()
    return weighted_sup_norm(lambda z: np.abs(eval_jet(derivative, z).f), 1.0, **kwargs)


def normal_norm(expr: MapExpr, **kwargs) -> NormEstimate:
    """sup f#(z)(1 - |z|^2)"""
    def field_fn(z):
        jet = eval_jet(expr, z)
        return np.abs(jet.df) / (1 + np.abs(jet.f) ** 2)
    return weighted_sup_norm(field_fn, 1.0, **kwargs)


def norm_inequality_report(expr: MapExpr, **kwargs) -> Dict[str, Any]:
    """
    Both sides of ||S|| <= 4||P|| + ||P||^2/2 and ||P|| <= 2 + 2 sqrt(1 + ||S||/2)
    """
    p_norm = pre_schwarzian_norm(expr, **kwargs)
    s_norm = schwarzian_norm(expr, **kwargs)
    p, s = p_norm.value, s_norm.value
    forward_rhs = 4 * p + 0.5 * p ** 2
    converse_rhs = 2 + 2 * math.sqrt(1 + 0.5 * s)
    slack = settings.CRITERION_TOL
    return {
        "pre_schwarzian_norm": p_norm.to_dict(),
        "schwarzian_norm": s_norm.to_dict(),
        "forward": {"lhs": s, "rhs": forward_rhs, "holds": s <= forward_rhs * (1 + slack) + slack},
        "converse": {
            "lhs": p,
            "rhs": converse_rhs,
            "gap": converse_rhs - p,
            "holds": p <= converse_rhs * (1 + slack) + slack,
        },
        "converged": p_norm.converged and s_norm.converged,
    }


def bloch_lipschitz_check(expr: MapExpr, pairs: Iterable[Tuple[complex, complex]], norm: float, tol: float = 1e-6) -> Dict[str, Any]:
    """|f(z) - f(w)| <= (||f||_B + tol) d_H(z, w) over the pairs"""
    z, w = (np.asarray(side, dtype=complex) for side in zip(*pairs))
    gaps = np.abs(eval_jet(expr, z).f - eval_jet(expr, w).f)
    bound = (norm + tol) * hyperbolic_distance(z, w)
    return _lipschitz_record(bound - gaps, z, w)


def normal_lipschitz_check(expr: MapExpr, pairs: Iterable[Tuple[complex, complex]], norm: float, tol: float = 1e-6) -> Dict[str, Any]:
    """chi(f(z), f(w)) <= (||f||_N + tol) d_H(z, w) over the pairs"""
    z, w = (np.asarray(side, dtype=complex) for side in zip(*pairs))
    gaps = chordal_distances(eval_jet(expr, z).f, eval_jet(expr, w).f)
    bound = (norm + tol) * hyperbolic_distance(z, w)
    return _lipschitz_record(bound - gaps, z, w)


def _lipschitz_record(margins: np.ndarray, z: np.ndarray, w: np.ndarray) -> Dict[str, Any]:
    index = int(np.argmin(margins))
    return {
        "holds": bool(margins[index] >= 0),
        "worst_margin": float(margins[index]),
        "worst_pair": [[z[index].real, z[index].imag], [w[index].real, w[index].imag]],
        "pairs_tested": int(margins.size),
    }
