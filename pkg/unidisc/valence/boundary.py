"""Boundary curves: adaptive traces, simpleness, scanline windings and sign counts

A trace is a closed polyline through f(e^{it}) for increasing t in (-pi, pi].
Singular boundary parameters are excluded by a collar and bridged by a chord.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import cKDTree

from config.settings import settings
from unidisc.analytic.expressions import MapExpr, boundary_jet
from unidisc.geometry.disc import normalize_angle

logger = logging.getLogger(__name__)

TWO_PI = 2 * math.pi


@dataclass
class BoundaryTrace:
    """Polyline through boundary values, in parameter order"""
    t: np.ndarray
    points: np.ndarray
    adaptive: bool = True
    chord_tol: Optional[float] = None
    bridges: Optional[np.ndarray] = None
    complete: bool = True
    singular_parameters: Tuple[float, ...] = ()
    expr: Optional[MapExpr] = field(default=None, repr=False)

    def __post_init__(self):
        if self.bridges is None:
            self.bridges = np.zeros(len(self.t), dtype=bool)

    @classmethod
    def from_points(cls, points: Sequence[complex]) -> "BoundaryTrace":
        """Closed polyline with evenly spaced nominal parameters"""
        points = np.asarray(points, dtype=complex)
        t = -math.pi + TWO_PI * (np.arange(len(points)) + 1) / len(points)
        return cls(t, points, adaptive=False)

    @property
    def steps(self) -> np.ndarray:
        """Parameter length of every segment, the closing one included"""
        return np.diff(np.append(self.t, self.t[0] + TWO_PI))

    def to_rows(self) -> List[Tuple[float, float, float]]:
        return [(float(t), float(p.real), float(p.imag)) for t, p in zip(self.t, self.points)]

    def summary(self) -> Dict[str, Any]:
        return {
            "points": int(len(self.t)),
            "adaptive": self.adaptive,
            "chord_tol": self.chord_tol,
            "complete": self.complete,
            "singular_parameters": list(self.singular_parameters),
            "bridges": int(np.count_nonzero(self.bridges)),
        }


def singular_parameters(expr: MapExpr) -> Tuple[float, ...]:
    """Parameters t with e^{it} a declared singularity"""
    params = {float(normalize_angle(np.angle(s))) for s in expr.singularities() if abs(abs(s) - 1) < 1e-12}
    return tuple(sorted(params))


def _bridge_flags(t: np.ndarray, singular: Sequence[float]) -> np.ndarray:
    """True for segments whose parameter interval contains a singular parameter"""
    ends = np.append(t[1:], t[0] + TWO_PI)
    flags = np.zeros(len(t), dtype=bool)
    for s in singular:
        for candidate in (s, s + TWO_PI):
            flags |= (t < candidate) & (candidate < ends)
    return flags


def _initial_parameters(singular: Sequence[float], collar: float, count: int) -> np.ndarray:
    t = -math.pi + TWO_PI * (np.arange(count) + 1) / count
    extra = []
    for s in singular:
        t = t[np.abs(normalize_angle(t - s)) > collar]
        extra += [normalize_angle(s - collar), normalize_angle(s + collar)]
    return np.unique(np.concatenate([t, np.asarray(extra, dtype=float)]))


def boundary_values(expr: MapExpr, t: np.ndarray) -> np.ndarray:
    return np.asarray(boundary_jet(expr, np.asarray(t, dtype=float)).f, dtype=complex)


def _turning(points: np.ndarray, bridges: np.ndarray) -> np.ndarray:
    """Turning angle at every vertex; vertices next to a bridge do not count"""
    vectors = np.roll(points, -1) - points
    previous = np.roll(vectors, 1)
    with np.errstate(invalid="ignore"):
        turn = np.abs(np.angle(vectors * np.conj(previous)))
    turn[(vectors == 0) | (previous == 0)] = 0.0
    turn[bridges | np.roll(bridges, 1)] = 0.0
    return turn


def trace_boundary(expr: MapExpr, chord_tol: Optional[float] = None, collar: Optional[float] = None,
                   budget: Optional[int] = None) -> BoundaryTrace:
    """
    Adaptive trace of the boundary curve t -> f(e^{it})

    Segments are halved until every chord is at most chord_tol and the turning
    at both ends is at most settings.MAX_TURN (turning is not refined below
    settings.TRACE_MIN_STEP).

    Args:
        expr: Map descriptor with continuous boundary values off its singular set
        chord_tol: Largest image chord; by default a fraction of the image diameter
        collar: Parameter half-width excluded around singular parameters
        budget: Largest number of points

    Returns:
        BoundaryTrace; ``complete`` is False when the budget ran out
    """
    collar = settings.TRACE_COLLAR if collar is None else collar
    budget = settings.TRACE_POINT_BUDGET if budget is None else budget
    singular = singular_parameters(expr)
    t = _initial_parameters(singular, collar, settings.TRACE_INITIAL_POINTS)
    points = boundary_values(expr, t)
    if chord_tol is None:
        extent = max(float(np.ptp(points.real)), float(np.ptp(points.imag)), 1e-12)
        chord_tol = settings.TRACE_RELATIVE_CHORD * extent

    bridges = _bridge_flags(t, singular)
    complete = True
    while True:
        steps = np.diff(np.append(t, t[0] + TWO_PI))
        chords = np.abs(np.roll(points, -1) - points)
        turn = _turning(points, bridges)
        sharp = (turn > settings.MAX_TURN) | (np.roll(turn, -1) > settings.MAX_TURN)
        split = ~bridges & ((chords > chord_tol) | (sharp & (steps > settings.TRACE_MIN_STEP)))
        if not np.any(split):
            break
        if len(t) + np.count_nonzero(split) > budget:
            complete = False
            logger.warning(f"Trace budget of {budget} points exhausted; trace is partial")
            break
        new_t = normalize_angle(t[split] + steps[split] / 2)
        new_t = np.atleast_1d(new_t)
        t = np.concatenate([t, new_t])
        points = np.concatenate([points, boundary_values(expr, new_t)])
        order = np.argsort(t, kind="stable")
        t, points = t[order], points[order]
        bridges = _bridge_flags(t, singular)

    logger.debug(f"Trace of {expr.kind}: {len(t)} points, chord tolerance {chord_tol:.3g}")
    return BoundaryTrace(t, points, True, float(chord_tol), bridges, complete, singular, expr)


def _cross(o, a, b):
    return (a - o).real * (b - o).imag - (a - o).imag * (b - o).real


def _segment_hits(a, b, c, d):
    """Proper crossings of segments ab and cd (vectorized); returns mask, s on ab, u on cd, crossing angle"""
    d1, d2 = _cross(c, d, a), _cross(c, d, b)
    d3, d4 = _cross(a, b, c), _cross(a, b, d)
    hit = (d1 * d2 < 0) & (d3 * d4 < 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        s = d1 / (d1 - d2)
        u = d3 / (d3 - d4)
        sine = np.abs(_cross(0j, b - a, d - c)) / (np.abs(b - a) * np.abs(d - c))
    return hit, s, u, np.arcsin(np.clip(sine, 0.0, 1.0))


def segment_crossings(a: np.ndarray, b: np.ndarray):
    """
    Proper crossings between non-adjacent segments of the closed polyline

    Long segments are cut into pieces no longer than the common segment length,
    so a single KD-tree radius query finds every candidate pair.

    Returns:
        Segment indices i < j, the crossing position along each, and the crossing angle
    """
    n = len(a)
    lengths = np.abs(b - a)
    reach = max(float(np.quantile(lengths, 0.99)), 1e-300)
    counts = np.minimum(np.maximum(np.ceil(lengths / reach), 1), 4096).astype(int)
    parent = np.repeat(np.arange(n), counts)
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    local = np.arange(len(parent)) - starts[parent]
    fraction = local / counts[parent]
    step = 1.0 / counts[parent]
    delta = (b - a)[parent]
    pa = a[parent] + delta * fraction
    pb = a[parent] + delta * (fraction + step)
    mids = (pa + pb) / 2
    tree = cKDTree(np.column_stack([mids.real, mids.imag]))
    pairs = tree.query_pairs(1.0000001 * float(np.max(np.abs(pb - pa))), output_type="ndarray")
    if len(pairs) == 0:
        empty = np.zeros(0)
        return empty.astype(int), empty.astype(int), empty, empty, empty
    p, q = pairs[:, 0], pairs[:, 1]
    i, j = parent[p], parent[q]
    gap = np.abs(i - j)
    keep = (gap > 1) & (gap < n - 1)
    p, q = p[keep], q[keep]
    hit, s, u, angle = _segment_hits(pa[p], pb[p], pa[q], pb[q])
    p, q, s, u, angle = p[hit], q[hit], s[hit], u[hit], angle[hit]
    s_parent = fraction[p] + step[p] * s
    u_parent = fraction[q] + step[q] * u
    i, j = parent[p], parent[q]
    swap = i > j
    i, j = np.where(swap, j, i), np.where(swap, i, j)
    s_parent, u_parent = np.where(swap, u_parent, s_parent), np.where(swap, s_parent, u_parent)
    return i, j, s_parent, u_parent, angle


def _confirm(expr: MapExpr, t0: float, dt0: float, t1: float, dt1: float, samples: int = 129):
    """Re-sample two parameter intervals finely and look for a crossing between them"""
    s = np.linspace(0.0, 1.0, samples)
    first = boundary_values(expr, normalize_angle(t0 + dt0 * s))
    second = boundary_values(expr, normalize_angle(t1 + dt1 * s))
    a, b = first[:-1, None], first[1:, None]
    c, d = second[None, :-1], second[None, 1:]
    hit, sa, sc, _ = _segment_hits(a, b, c, d)
    if not np.any(hit):
        return None
    k, m = np.argwhere(hit)[0]
    return (float(normalize_angle(t0 + dt0 * (s[k] + sa[k, m] / (samples - 1)))),
            float(normalize_angle(t1 + dt1 * (s[m] + sc[k, m] / (samples - 1)))))


def is_simple(trace: BoundaryTrace, expr: Optional[MapExpr] = None) -> Dict[str, Any]:
    """
    Self-intersection test of the closed trace polyline

    Near-tangent crossings, and crossings of segments at most two steps apart,
    are re-sampled from the map before they are accepted.
    """
    expr = expr if expr is not None else trace.expr
    a = trace.points
    b = np.roll(a, -1)
    n = len(a)
    if n < 4:
        return {"simple": True, "first_intersection": None, "crossings_examined": 0}
    i, j, s, u, angle = segment_crossings(a, b)
    steps = trace.steps
    bridges = trace.bridges
    order = np.argsort(i, kind="stable")
    for k in order:
        ii, jj = int(i[k]), int(j[k])
        separation = min(jj - ii, n - (jj - ii))
        doubtful = angle[k] < settings.TANGENCY_ANGLE or separation <= 2
        if doubtful and expr is not None and not (bridges[ii] or bridges[jj]):
            refined = _confirm(expr, trace.t[ii], steps[ii], trace.t[jj], steps[jj])
            if refined is None:
                logger.debug(f"Discarded near-tangent crossing at segments {ii}, {jj}")
                continue
            first = refined
        else:
            first = (float(normalize_angle(trace.t[ii] + s[k] * steps[ii])),
                     float(normalize_angle(trace.t[jj] + u[k] * steps[jj])))
        return {"simple": False, "first_intersection": first, "crossings_examined": int(len(i))}
    return {"simple": True, "first_intersection": None, "crossings_examined": int(len(i))}


def _scan(a: np.ndarray, b: np.ndarray, y: float) -> Tuple[np.ndarray, np.ndarray]:
    """Crossing abscissae of the level y with their orientation signs, sorted by x"""
    up = (a.imag <= y) & (b.imag > y)
    down = (b.imag <= y) & (a.imag > y)
    mask = up | down
    ya, yb = a.imag[mask], b.imag[mask]
    x = a.real[mask] + (y - ya) * (b.real[mask] - a.real[mask]) / (yb - ya)
    signs = np.where(up[mask], 1, -1)
    order = np.argsort(x, kind="stable")
    return x[order], signs[order]


def polyline_winding(points: np.ndarray, w: complex) -> int:
    """Winding number of the closed polyline about w, from crossings of the ray to the right"""
    points = np.asarray(points, dtype=complex)
    x, signs = _scan(points, np.roll(points, -1), complex(w).imag)
    return int(np.sum(signs[x > complex(w).real]))


def scanline_windings(points: np.ndarray, levels: Optional[int] = None,
                      extra_levels: Sequence[float] = ()) -> Dict[str, Any]:
    """
    Winding numbers of the plane regions cut out by a closed polyline

    Each horizontal scan level is split at its crossings; the winding number on
    an interval is the signed count of crossings to its right.

    Returns:
        Dict with the largest winding, a sample point inside the widest interval
        attaining it, and the total scanned length per winding value
    """
    points = np.asarray(points, dtype=complex)
    a, b = points, np.roll(points, -1)
    levels = settings.SCANLINES if levels is None else levels
    lo, hi = float(np.min(points.imag)), float(np.max(points.imag))
    ys = lo + (hi - lo) * (np.arange(levels) + 0.5) / levels
    ys = np.concatenate([ys, np.asarray(extra_levels, dtype=float)])

    best_winding, best_width, best_point = 0, -1.0, None
    lengths: Dict[int, float] = {}
    for y in ys:
        x, signs = _scan(a, b, float(y))
        if len(x) < 2:
            continue
        suffix = np.cumsum(signs[::-1])[::-1]
        windings = suffix[1:]
        widths = np.diff(x)
        for value in np.unique(windings):
            lengths[int(value)] = lengths.get(int(value), 0.0) + float(np.sum(widths[windings == value]))
        top = int(np.max(windings))
        candidates = np.flatnonzero(windings == top)
        widest = candidates[np.argmax(widths[candidates])]
        if top > best_winding or (top == best_winding and widths[widest] > best_width):
            best_winding, best_width = top, float(widths[widest])
            best_point = complex((x[widest] + x[widest + 1]) / 2, float(y))
    return {"max_winding": int(best_winding), "at": best_point, "length_by_winding": lengths}


def sign_changes_real(expr: MapExpr, half: bool = True, collar: Optional[float] = None,
                      budget: Optional[int] = None) -> int:
    """
    Number of sign changes of t -> Re f(e^{it}) on (0, pi] (or on the whole circle)

    Same-sign intervals whose values are too small for the local slope to rule
    out a hidden pair of zeros are halved until settings.TRACE_MIN_STEP.
    """
    return len(real_part_crossings(expr, half, collar, budget, localize=False))


def real_part_crossings(expr: MapExpr, half: bool = True, collar: Optional[float] = None,
                        budget: Optional[int] = None, localize: bool = True) -> List[float]:
    """Parameters where Re f(e^{it}) changes sign; bisection-localized when ``localize``"""
    collar = settings.TRACE_COLLAR if collar is None else collar
    budget = settings.TRACE_POINT_BUDGET if budget is None else budget
    singular = singular_parameters(expr)
    lower = 0.0 if half else -math.pi
    t = lower + (math.pi - lower) * np.arange(1, settings.SIGN_GRID + 1) / settings.SIGN_GRID
    for s in singular:
        t = t[np.abs(normalize_angle(t - s)) > collar]
        edge = s + collar
        if lower < edge <= math.pi:
            t = np.append(t, edge)
        edge = s - collar
        if lower < edge <= math.pi:
            t = np.append(t, edge)
    t = np.unique(t)

    def sample(params):
        jet = boundary_jet(expr, params)
        z = np.exp(1j * params)
        return np.real(jet.f), np.real(1j * z * jet.df)

    u, v = sample(t)
    while True:
        gaps = np.diff(t)
        same = np.sign(u[:-1]) == np.sign(u[1:])
        slope = np.maximum(np.abs(v[:-1]), np.abs(v[1:]))
        unsafe = same & (np.minimum(np.abs(u[:-1]), np.abs(u[1:])) <= 0.5 * gaps * slope)
        bridged = _bridge_flags_open(t, singular)
        unsafe &= (gaps > settings.TRACE_MIN_STEP) & ~bridged
        if not np.any(unsafe) or len(t) + np.count_nonzero(unsafe) > budget:
            if np.any(unsafe):
                logger.warning("Sign-count budget exhausted; count may be low")
            break
        new_t = t[:-1][unsafe] + gaps[unsafe] / 2
        nu, nv = sample(new_t)
        t = np.concatenate([t, new_t])
        u = np.concatenate([u, nu])
        v = np.concatenate([v, nv])
        order = np.argsort(t, kind="stable")
        t, u, v = t[order], u[order], v[order]

    scale = float(np.max(np.abs(u), initial=0.0))
    keep = np.abs(u) > 1e-9 * scale
    t, u = t[keep], u[keep]
    bridged = _bridge_flags_open(t, singular)
    changes = np.flatnonzero((np.sign(u[:-1]) != np.sign(u[1:])) & ~bridged)
    if not localize:
        return [float(t[k]) for k in changes]

    def real_part(x):
        return float(np.real(boundary_jet(expr, x).f))

    return [float(brentq(real_part, t[k], t[k + 1], xtol=1e-12)) for k in changes]


def _bridge_flags_open(t: np.ndarray, singular: Sequence[float]) -> np.ndarray:
    """Flags for consecutive pairs (non-cyclic) that straddle a singular parameter"""
    flags = np.zeros(max(len(t) - 1, 0), dtype=bool)
    for s in singular:
        flags |= (t[:-1] < s) & (s < t[1:])
    return flags
