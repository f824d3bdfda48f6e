"""Path integration for maps that are given through their derivative

Interior values of a primitive are integrated along straight segments from a
fixed interior anchor. Boundary values are integrated along the unit circle
from a boundary anchor, passing through cached checkpoints spaced
``settings.checkpoint_step`` apart, so a query only integrates over the last
short arc.
"""

import logging
import math
from functools import lru_cache
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad_vec

from config.settings import settings
from unidisc.analytic.jets import Jet2
from unidisc.errors import BudgetExceededError, ConvergenceError, DomainError

logger = logging.getLogger(__name__)

_GL_NODES, _GL_WEIGHTS = leggauss(8)
_MAX_BREAKPOINT_DEPTH = 50
_ANCHOR_CANDIDATES = (0j, 0.25 + 0j, -0.25 + 0j, 0.25j, -0.25j)
_BOUNDARY_ANCHOR_CANDIDATES = (math.pi, math.pi / 2, -math.pi / 2, 0.0)


def _derivative_values(expr, z: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return expr.apply(Jet2.variable(z)).f


def _wrap(angle):
    """Map angles into (-pi, pi]"""
    wrapped = np.mod(np.asarray(angle, dtype=float) + math.pi, 2 * math.pi) - math.pi
    return np.where(wrapped == -math.pi, math.pi, wrapped)


def _geometric_points(gap_ratio: float, at_end: bool = True) -> List[float]:
    """Breakpoints 1 - 2^-k (or 2^-k) down to the scale of the gap"""
    if not gap_ratio < 0.5:
        return []
    depth = int(math.ceil(math.log2(1.0 / max(gap_ratio, 1e-300)))) + 2
    depth = min(depth, _MAX_BREAKPOINT_DEPTH)
    points = [2.0 ** -k for k in range(1, depth + 1)]
    return [1.0 - p for p in points] if at_end else points


def _quad_complex(integrand, points: Sequence[float], tol: float) -> np.ndarray:
    """Integrate a complex vector-valued integrand over s in [0, 1]"""

    def split(s):
        values = integrand(s)
        return np.concatenate([values.real, values.imag])

    result, error, info = quad_vec(
        split, 0.0, 1.0,
        epsabs=tol, epsrel=1e-12, norm="max",
        limit=settings.PATH_SUBDIVISION_LIMIT,
        points=sorted(set(points)) or None,
        full_output=True,
    )
    if not np.all(np.isfinite(result)):
        raise ConvergenceError("Path integral produced non-finite values")
    allowed = max(tol, 1e-12 * float(np.max(np.abs(result), initial=0.0)))
    if error > allowed:
        raise BudgetExceededError(
            f"Path integral missed tolerance {tol:g} (error estimate {error:.3g}, "
            f"{info.intervals.shape[0]} subintervals)"
        )
    half = result.shape[0] // 2
    return result[:half] + 1j * result[half:]


def integrate_segments(derivative_expr, starts, ends, tol: Optional[float] = None) -> np.ndarray:
    """
    Integrate a derivative along many straight segments at once

    Args:
        derivative_expr: Descriptor of f'
        starts: Segment starting points (broadcast against ends)
        ends: Segment end points

    Returns:
        Complex array of integrals, one per segment
    """
    tol = settings.PATH_TOL if tol is None else tol
    starts, ends = np.broadcast_arrays(
        np.atleast_1d(np.asarray(starts, dtype=complex)),
        np.atleast_1d(np.asarray(ends, dtype=complex)),
    )
    delta = ends - starts
    length = np.where(np.abs(delta) > 0, np.abs(delta), 1.0)

    points: List[float] = []
    for singular in derivative_expr.singularities():
        points += _geometric_points(float(np.min(np.abs(ends - singular) / length)), at_end=True)
        points += _geometric_points(float(np.min(np.abs(starts - singular) / length)), at_end=False)

    def integrand(s):
        return _derivative_values(derivative_expr, starts + s * delta) * delta

    return _quad_complex(integrand, points, tol)


def integrate_path(derivative_expr, z0: complex, z1: complex, tol: Optional[float] = None) -> complex:
    """
    Integrate f' along the straight segment [z0, z1]

    Args:
        derivative_expr: Descriptor of f'
        z0: Start point, |z0| <= 1
        z1: End point, |z1| <= 1
        tol: Absolute tolerance (settings.PATH_TOL by default)

    Returns:
        f(z1) - f(z0)
    """
    for point in (z0, z1):
        if abs(point) > 1 + 1e-12:
            raise DomainError(f"Path endpoint {point} lies outside the closed disc")
    return complex(integrate_segments(derivative_expr, z0, z1, tol)[0])


def integrate_polyline(derivative_expr, vertices: Sequence[complex], tol: Optional[float] = None) -> complex:
    """Integrate f' along a polyline through the given vertices"""
    vertices = np.asarray(vertices, dtype=complex)
    pieces = integrate_segments(derivative_expr, vertices[:-1], vertices[1:], tol)
    return complex(np.sum(pieces))


@lru_cache(maxsize=128)
def _interior_anchor(prim) -> Tuple[complex, complex]:
    singular = prim.expr.singularities()
    for anchor in _ANCHOR_CANDIDATES:
        if all(abs(anchor - s) > 1e-3 for s in singular):
            break
    else:
        raise DomainError("No admissible interior anchor for the primitive")
    if anchor == prim.basepoint:
        return anchor, complex(prim.base_value)
    value = prim.base_value + integrate_path(prim.expr, prim.basepoint, anchor)
    logger.debug(f"Primitive anchor at {anchor}: {value}")
    return anchor, value


@lru_cache(maxsize=128)
def _boundary_anchor(prim) -> Tuple[float, complex]:
    if abs(abs(prim.basepoint) - 1) < 1e-12:
        return float(np.angle(prim.basepoint)), complex(prim.base_value)
    singular = prim.expr.singularities()
    anchor, anchor_value = _interior_anchor(prim)
    for t in _BOUNDARY_ANCHOR_CANDIDATES:
        point = complex(math.cos(t), math.sin(t))
        if all(abs(point - s) > 1e-3 for s in singular):
            return t, anchor_value + integrate_path(prim.expr, anchor, point)
    raise DomainError("No admissible boundary anchor for the primitive")


def _singular_limits(prim, t_anchor: float) -> Tuple[float, float]:
    """Offsets from the anchor (positive and negative side) where the first singular parameter sits"""
    upper, lower = math.pi, -math.pi
    for s in prim.expr.singularities():
        if abs(abs(s) - 1) > 1e-12:
            continue
        offset = float(_wrap(np.angle(s) - t_anchor))
        upper = min(upper, offset if offset > 0 else offset + 2 * math.pi)
        lower = max(lower, offset if offset < 0 else offset - 2 * math.pi)
    return upper, lower


def _integrate_arcs(derivative_expr, t_anchor: float, d_start, d_end, limits, tol) -> np.ndarray:
    d_start, d_end = np.broadcast_arrays(np.atleast_1d(d_start), np.atleast_1d(d_end))
    span = d_end - d_start
    size = np.where(np.abs(span) > 0, np.abs(span), 1.0)
    points: List[float] = []
    for limit in limits:
        points += _geometric_points(float(np.min(np.abs(d_end - limit) / size)), at_end=True)

    def integrand(s):
        z = np.exp(1j * (t_anchor + d_start + s * span))
        return _derivative_values(derivative_expr, z) * 1j * z * span

    return _quad_complex(integrand, points, tol)


@lru_cache(maxsize=64)
def boundary_checkpoints(prim) -> dict:
    """
    Cumulative primitive values on both sides of the boundary anchor

    Returns:
        Dict with the anchor parameter, the singular limits and, per side,
        checkpoint offsets with their primitive values
    """
    t_anchor, anchor_value = _boundary_anchor(prim)
    upper, lower = _singular_limits(prim, t_anchor)
    step = settings.checkpoint_step
    ladder = {"t_anchor": t_anchor, "upper": upper, "lower": lower}
    for side, limit, sign in (("positive", upper, 1.0), ("negative", lower, -1.0)):
        count = int(math.floor(abs(limit) / step - 1e-9))
        offsets = sign * step * np.arange(count + 1)
        if count:
            pieces = _integrate_arcs(prim.expr, t_anchor, offsets[:-1], offsets[1:], (upper, lower), settings.PATH_TOL)
            cumulative = anchor_value + np.concatenate([[0j], np.cumsum(pieces)])
        else:
            cumulative = np.array([anchor_value])
        ladder[side] = (offsets, cumulative)
    logger.debug(f"Built {len(ladder['positive'][0]) + len(ladder['negative'][0])} boundary checkpoints")
    return ladder


def boundary_primitive_values(prim, t) -> np.ndarray:
    """Primitive values at e^{it} from the nearest checkpoint on the anchor side"""
    ladder = boundary_checkpoints(prim)
    offsets = np.atleast_1d(_wrap(np.asarray(t, dtype=float) - ladder["t_anchor"]))
    result = np.empty(offsets.shape, dtype=complex)
    step = settings.checkpoint_step
    for side, mask in (("positive", offsets >= 0), ("negative", offsets < 0)):
        if not np.any(mask):
            continue
        checkpoint_offsets, checkpoint_values = ladder[side]
        index = np.minimum(np.floor(np.abs(offsets[mask]) / step).astype(int), len(checkpoint_offsets) - 1)
        start = checkpoint_offsets[index]
        tail = _integrate_arcs(
            prim.expr, ladder["t_anchor"], start, offsets[mask],
            (ladder["upper"], ladder["lower"]), settings.PATH_TOL,
        )
        result[mask] = checkpoint_values[index] + tail
    return result


def primitive_values(prim, z) -> np.ndarray:
    """
    Values of a PrimitiveOf descriptor at points of the closed disc

    Interior points integrate from the cached interior anchor, points on the
    unit circle go through the boundary checkpoints.
    """
    z = np.asarray(z, dtype=complex)
    flat = z.ravel()
    result = np.empty(flat.shape, dtype=complex)
    on_circle = np.abs(flat) >= 1 - 1e-12
    inside = ~on_circle
    if np.any(inside):
        anchor, anchor_value = _interior_anchor(prim)
        result[inside] = anchor_value + integrate_segments(prim.expr, anchor, flat[inside])
    if np.any(on_circle):
        result[on_circle] = boundary_primitive_values(prim, np.angle(flat[on_circle]))
    return result.reshape(z.shape)


def circle_values(expr, r: float, thetas: Any) -> np.ndarray:
    """
    Values of f on the circle |z| = r at increasing angles

    Maps without primitives are evaluated directly. For primitives the value at
    the first angle is integrated from the anchor and the rest is accumulated
    panel by panel with Gauss-Legendre rules along the circle.
    """
    thetas = np.asarray(thetas, dtype=float)
    z = r * np.exp(1j * thetas)
    if not expr.has_primitive():
        with np.errstate(divide="ignore", invalid="ignore"):
            return expr.apply(Jet2.variable(z)).f
    derivative = expr.derivative()
    if derivative.has_primitive() or len(thetas) < 2:
        with np.errstate(divide="ignore", invalid="ignore"):
            return expr.apply(Jet2.variable(z)).f

    with np.errstate(divide="ignore", invalid="ignore"):
        start = complex(expr.apply(Jet2.variable(np.asarray(z[:1]))).f[0])

    # Sub-panels keep each Gauss-Legendre panel short against the distance to
    # the nearest singularity
    distance = min([abs(abs(s) - r) for s in derivative.singularities()] or [1.0])
    widths = np.diff(thetas)
    sub = int(min(64, max(1, math.ceil(float(np.max(widths)) * r / (0.5 * max(distance, 1e-12))))))
    edges = thetas[:-1, None] + widths[:, None] * (np.arange(sub + 1)[None, :] / sub)
    left, right = edges[:, :-1], edges[:, 1:]
    half = (right - left) / 2
    nodes = (left + right)[..., None] / 2 + half[..., None] * _GL_NODES
    zn = r * np.exp(1j * nodes)
    values = _derivative_values(derivative, zn) * 1j * zn
    panels = np.sum(values * _GL_WEIGHTS, axis=-1) * half
    increments = np.sum(panels, axis=-1)
    return start + np.concatenate([[0j], np.cumsum(increments)])
