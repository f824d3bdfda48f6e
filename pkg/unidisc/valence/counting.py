"""Valence counting: winding numbers, preimages, Carleson sums and counting profiles"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from config.settings import settings
from unidisc.analytic.expressions import MapExpr, eval_jet
from unidisc.analytic.integration import circle_values
from unidisc.errors import ContourError
from unidisc.geometry.disc import CarlesonSquare, pseudo_hyperbolic_distance
from unidisc.geometry.regions import Region, UNIT_DISC
from unidisc.valence.boundary import (BoundaryTrace, segment_crossings, scanline_windings, sign_changes_real,
                                      trace_boundary)

logger = logging.getLogger(__name__)

_INITIAL_CONTOUR_POINTS = 256


@dataclass
class PreimageSet:
    """Solutions of f(z) = target found by seeded Newton runs"""
    target: complex
    points: np.ndarray
    residuals: np.ndarray
    cross_checked: bool = False
    winding_count: Optional[int] = None
    contour_radius: Optional[float] = None

    def __len__(self) -> int:
        return len(self.points)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "target": [self.target.real, self.target.imag],
            "points": [[p.real, p.imag] for p in self.points],
            "residuals": [float(r) for r in self.residuals],
            "cross_checked": self.cross_checked,
            "winding_count": self.winding_count,
            "contour_radius": self.contour_radius,
        }


@dataclass
class ValenceEstimate:
    """A valence count together with how it was obtained"""
    method: str
    value: int
    at: Any = None
    cross_checked: bool = False
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        at = self.at
        if isinstance(at, complex):
            at = [at.real, at.imag]
        return {
            "method": self.method,
            "value": self.value,
            "at": at,
            "cross_checked": self.cross_checked,
            "details": self.details,
        }


def _contour(expr: MapExpr, w: complex, r: float, count: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    thetas = -math.pi + 2 * math.pi * np.arange(count) / count
    z = r * np.exp(1j * thetas)
    values = circle_values(expr, r, thetas)
    derivative = eval_jet(expr.derivative(), z).f
    return z, values - w, derivative


def _admissible(gaps: np.ndarray, values: np.ndarray) -> bool:
    scale = 1.0 + float(np.max(np.abs(values)))
    return float(np.min(np.abs(gaps))) > 1e-8 * scale


def _winding_at(expr: MapExpr, w: complex, r: float) -> Tuple[int, float, int]:
    count = _INITIAL_CONTOUR_POINTS
    previous = None
    while count <= settings.WINDING_MAX_POINTS:
        z, gaps, derivative = _contour(expr, w, r, count)
        if not _admissible(gaps, gaps + w):
            raise ContourError(f"Contour |z|={r} passes too close to {w}")
        # trapezoid rule on the periodic integrand f'/(f - w) i z
        estimate = complex(np.mean(derivative * z / gaps))
        rounded = int(round(estimate.real))
        residual = abs(estimate - rounded)
        if residual < settings.WINDING_RESIDUAL and rounded == previous:
            return rounded, residual, count
        previous = rounded if residual < settings.WINDING_RESIDUAL else None
        count *= 2
    raise ContourError(f"Winding number about {w} on |z|={r} did not settle within {settings.WINDING_MAX_POINTS} points")


def winding_number(expr: MapExpr, w: complex, r: float) -> int:
    """
    Number of solutions of f(z) = w in |z| < r by the argument principle

    The radius is nudged when the image of the circle passes too close to w.

    Raises:
        ContourError: no admissible radius within settings.CONTOUR_NUDGES nudges
    """
    w = complex(w)
    if not 0 < r < 1:
        raise ContourError(f"Contour radius must lie in (0, 1), got {r}")
    step = 1e-3 * min(r, 1 - r)
    for attempt in range(settings.CONTOUR_NUDGES + 1):
        offset = ((attempt + 1) // 2) * step * (1 if attempt % 2 else -1)
        radius = r + offset
        try:
            value, residual, count = _winding_at(expr, w, radius)
        except ContourError as e:
            logger.warning(f"{e}; nudging the contour")
            continue
        if attempt:
            logger.info(f"Winding about {w} taken on nudged radius {radius:.12g}")
        logger.debug(f"Winding {value} about {w} on |z|={radius:.6g} ({count} points, residual {residual:.2g})")
        return value
    raise ContourError(f"No admissible contour near |z|={r} avoids {w}")


def preimages(expr: MapExpr, w: complex, region: Region = UNIT_DISC, n_seeds: Optional[int] = None,
              tol: float = 1e-10, seed: Optional[int] = None) -> PreimageSet:
    """
    Solutions of f(z) = w in the region by Newton iteration from Halton seeds

    Roots closer than settings.DEDUP_THRESHOLD in the pseudo-hyperbolic metric
    are merged. For the whole disc the count is compared with the winding number
    on a circle enclosing every root found.
    """
    w = complex(w)
    n_seeds = settings.NEWTON_SEEDS if n_seeds is None else n_seeds
    seed = settings.DEFAULT_SEED if seed is None else seed
    z = region.sample(n_seeds, seed, method="halton")
    alive = np.ones(len(z), dtype=bool)
    residual = np.full(len(z), np.inf)
    for _ in range(settings.NEWTON_MAX_ITER):
        if not np.any(alive):
            break
        index = np.flatnonzero(alive)
        jet = eval_jet(expr, z[index])
        gap = jet.f - w
        residual[index] = np.abs(gap)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = gap / jet.df
        candidate = z[index] - step
        inside = np.isfinite(candidate) & (np.abs(candidate) < 1) & region.contains(candidate)
        z[index[inside]] = candidate[inside]
        residual[index[~inside]] = np.inf
        alive[index[~inside]] = False
        settled = np.abs(step[inside]) < 1e-14 * (1 + np.abs(candidate[inside]))
        alive[index[inside][settled]] = False

    finite = np.isfinite(residual)
    if np.any(finite):
        residual[finite] = np.abs(eval_jet(expr, z[finite]).f - w)
    converged = np.flatnonzero(residual <= tol * (1 + abs(w)))
    order = converged[np.argsort(residual[converged], kind="stable")]
    roots: List[complex] = []
    errors: List[float] = []
    for k in order:
        if all(pseudo_hyperbolic_distance(z[k], root) >= settings.DEDUP_THRESHOLD for root in roots):
            roots.append(complex(z[k]))
            errors.append(float(residual[k]))
    points = np.asarray(roots, dtype=complex)
    found = PreimageSet(w, points, np.asarray(errors))

    if region == UNIT_DISC:
        outer = float(np.max(np.abs(points), initial=0.0))
        radius = 1 - (1 - outer) / 2 if len(points) else 0.5
        try:
            count = winding_number(expr, w, radius)
        except ContourError as e:
            logger.warning(f"Preimage count not validated: {e}")
        else:
            found.winding_count = count
            found.contour_radius = radius
            found.cross_checked = count == len(points)
            if not found.cross_checked:
                logger.warning(f"Preimage search found {len(points)} roots of f = {w}, winding says {count}")
    return found


def carleson_sum(pre: PreimageSet, square: CarlesonSquare) -> Dict[str, float]:
    """Sum of (1 - |z_n|)^(1/2) over preimages in Q, and its ratio to l(Q)^(1/2)"""
    points = np.asarray(pre.points, dtype=complex)
    members = points[square.contains(points)] if len(points) else points
    total = float(np.sum(np.sqrt(1 - np.abs(members))))
    return {"sum": total, "ratio": total / math.sqrt(square.arclength), "members": int(len(members))}


def counting_bound_profile(expr: MapExpr, w: complex, r_ladder: Sequence[float]) -> List[Tuple[float, float]]:
    """(r, n(f, r, w) sqrt(1 - r)) along the ladder"""
    profile = []
    for r in r_ladder:
        n = winding_number(expr, w, float(r))
        profile.append((float(r), n * math.sqrt(1 - float(r))))
    return profile


def dyadic_carleson_squares(theta_center: float, levels: int) -> List[CarlesonSquare]:
    """Nested squares with arc lengths 2 pi 2^-k centred at theta_center"""
    return [CarlesonSquare(theta_center, 2 * math.pi * 2.0 ** -k) for k in range(levels)]


def _crossing_levels(points: np.ndarray, limit: int = 256) -> List[float]:
    """Scan levels just above and below the self-crossings of a polyline"""
    a, b = points, np.roll(points, -1)
    i, _, s, _, _ = segment_crossings(a, b)
    if len(i) == 0:
        return []
    crossings = a[i] + s * (b[i] - a[i])
    heights = np.unique(crossings.imag)[:limit]
    offset = 1e-6 * max(float(np.ptp(points.imag)), 1e-12)
    return list(np.concatenate([heights - offset, heights + offset]))


def valence_estimate(expr: MapExpr, method: str = "winding", trace: Optional[BoundaryTrace] = None,
                     w: Optional[complex] = None, contour_radius: float = 0.999,
                     seed: Optional[int] = None) -> ValenceEstimate:
    """
    Valence of the map by one of three methods

    "winding" takes the largest winding number of the boundary trace over a
    scanline sample of the image and re-counts it by the argument principle at
    the point where it was attained. "sign-count" counts sign changes of
    Re f(e^{it}) on (0, pi]. "preimage" counts the solutions of f = w.

    Raises:
        ValueError: Unknown method, or "preimage" without a target
    """
    if method == "sign-count":
        half = sign_changes_real(expr, half=True)
        full = sign_changes_real(expr, half=False)
        logger.info(f"Sign changes of Re f: {half} on (0, pi], {full} on the circle")
        return ValenceEstimate("sign-count", half, at=[0.0, math.pi], details={"full_circle": full})

    if method == "preimage":
        if w is None:
            raise ValueError("The preimage method needs a target value w")
        found = preimages(expr, w, seed=seed)
        return ValenceEstimate("preimage", len(found), at=complex(w), cross_checked=found.cross_checked,
                               details=found.to_dict())

    if method != "winding":
        raise ValueError(f"Unknown valence method: {method}")

    trace = trace if trace is not None else trace_boundary(expr)
    scan = scanline_windings(trace.points, extra_levels=_crossing_levels(trace.points))
    estimate = ValenceEstimate("winding", scan["max_winding"], at=scan["at"],
                               details={"trace": trace.summary(),
                                        "length_by_winding": {str(k): v for k, v in sorted(scan["length_by_winding"].items())}})
    if scan["at"] is None:
        return estimate
    try:
        count = winding_number(expr, scan["at"], contour_radius)
    except ContourError as e:
        logger.warning(f"Valence not cross-checked: {e}")
        return estimate
    estimate.details["contour_count"] = count
    estimate.cross_checked = count == estimate.value
    if not estimate.cross_checked:
        logger.warning(f"Trace winding {estimate.value} and contour count {count} disagree at {scan['at']}")
    return estimate
