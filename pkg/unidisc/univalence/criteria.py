"""Univalence criteria evaluated over regions of the disc"""

import logging
import math
from typing import Any, Callable, Dict, Optional

import numpy as np

from config.settings import settings
from unidisc.analytic.expressions import Affine, MapExpr
from unidisc.errors import (
    ConditionViolatedError, CriticalPointError, DegenerateDilatationError, DomainError, InapplicableError,
    SingularPointError,
)
from unidisc.geometry.disc import horodisc_parameter
from unidisc.geometry.regions import Annulus, Region, UNIT_DISC
from unidisc.operators.derivatives import (
    becker_quantity, becker_quantity_z, compose_pre_schwarzian, hv_margin, nehari_quantity, disc_weight,
)
from unidisc.univalence.reports import CriterionReport

logger = logging.getLogger(__name__)

MarginFn = Callable[[np.ndarray], np.ndarray]

CLUSTERING = "preimage-clustering guaranteed"
NO_CONCLUSION = "no conclusion"
LOCALLY_UNIVALENT = "locally-univalent-compatible"

CONVERSE_MODES = {"th2": "th2", "th3": "th3", "horodisc": "th2", "tangent-disc": "th3"}
CONVERSE_CRITERIA = {
    "th2-bound": "th2", "th3-bound": "th3", "horodisc-bound": "th2", "tangent-disc-bound": "th3",
}

_CHUNK = 1 << 18


def grid_verdict(criterion: str, region: Region, margin_fn: MarginFn, tol: float,
                 points: Optional[np.ndarray] = None, sub_rings: Optional[int] = None,
                 depth: Optional[int] = None, details: Optional[Dict[str, Any]] = None) -> CriterionReport:
    """
    Evaluate a margin over the region grid and keep the smallest value

    Critical, singular and degenerate points turn into a failed verdict with the point as witness.
    """
    if points is None:
        sub_rings = settings.VERDICT_SUB_RINGS if sub_rings is None else sub_rings
        points = region.grid(sub_rings=sub_rings, depth=depth)
    worst_margin, worst_point = np.inf, None
    try:
        for start in range(0, len(points), _CHUNK):
            chunk = points[start:start + _CHUNK]
            with np.errstate(over="ignore", invalid="ignore"):
                margins = np.asarray(margin_fn(chunk), dtype=float)
            margins = np.where(np.isnan(margins), -np.inf, margins)
            index = int(np.argmin(margins))
            if margins[index] < worst_margin:
                worst_margin, worst_point = float(margins[index]), complex(chunk[index])
    except (CriticalPointError, SingularPointError, DegenerateDilatationError) as e:
        logger.info(f"{criterion}: {e}")
        return CriterionReport(criterion, region.to_dict(), False, e.point, float("-inf"), int(len(points)),
                               {**(details or {}), "error": str(e)})
    holds = bool(worst_margin >= -tol)
    logger.debug(f"{criterion} over {region.to_dict()}: worst margin {worst_margin:.6g} at {worst_point}")
    return CriterionReport(criterion, region.to_dict(), holds, worst_point, worst_margin, int(len(points)), details or {})


def becker_verdict(expr: MapExpr, region: Region = UNIT_DISC, tol: Optional[float] = None,
                   criterion: str = "becker-z", **grid_kwargs) -> CriterionReport:
    """
    Becker criterion: the quantity stays at most 1 on the region

    Args:
        expr: Map descriptor
        region: Region to grid
        tol: Slack on the verdict
        criterion: "becker-z" for |zP|(1-|z|^2), "becker" for |P|(1-|z|^2)
    """
    tol = settings.CRITERION_TOL if tol is None else tol
    quantity = becker_quantity_z if criterion == "becker-z" else becker_quantity
    threshold = settings.UNIVALENCE_THRESHOLD
    return grid_verdict(criterion, region, lambda z: threshold - quantity(expr, z), tol, **grid_kwargs)


def nehari_verdict(expr: MapExpr, region: Region = UNIT_DISC, tol: Optional[float] = None, **grid_kwargs) -> CriterionReport:
    """Nehari criterion |S(f)|(1-|z|^2)^2 <= 2"""
    tol = settings.CRITERION_TOL if tol is None else tol
    return grid_verdict("nehari", region, lambda z: 2.0 - nehari_quantity(expr, z), tol, **grid_kwargs)


def hv_reduction_max(C: float, count: int = 100001) -> float:
    """max over r in [0, 1] of r(1 + C(1 - r)); at most 1 exactly when C <= 1"""
    r = np.linspace(0.0, 1.0, count)
    return float(np.max(r * (1 + C * (1 - r))))


def hv_verdict(expr: MapExpr, C: float, tol: Optional[float] = None, **grid_kwargs) -> Dict[str, Any]:
    """
    Growth-condition verdict

    The condition is first checked on a grid over the disc. For C <= 1 it implies
    the Becker criterion; otherwise the map is univalent on every horodisc
    D(a e^{i theta}, 1 - a) with a = 1 - (1 + C)^-2.

    Raises:
        ConditionViolatedError: the growth condition fails at some grid point
    """
    tol = settings.CRITERION_TOL if tol is None else tol
    report = grid_verdict("hv", UNIT_DISC, lambda z: hv_margin(expr, C, z), tol, **grid_kwargs)
    if not report.holds:
        raise ConditionViolatedError(
            f"Growth condition with C={C} fails at {report.worst_point} (margin {report.worst_margin:.3g})",
            witness=report.worst_point, margin=report.worst_margin,
        )
    a = horodisc_parameter(C)
    reduction = hv_reduction_max(C)
    holds_on_disc = C <= 1 and reduction <= 1 + 1e-12
    guarantee = "univalent on the disc" if holds_on_disc else f"univalent on every horodisc D(a e^(i theta), 1 - a), a = {a:.12g}"
    return {
        "criterion": "hv",
        "C": C,
        "holds_on_disc": bool(holds_on_disc),
        "horodisc_a": a,
        "guarantee": guarantee,
        "reduction_max": reduction,
        "condition": report.to_dict(),
    }


def horodisc_map(C: float, theta: float) -> Affine:
    """T(z) = e^{i theta}(a + (1 - a) z), mapping the disc onto the horodisc for C"""
    a = horodisc_parameter(C)
    rotation = complex(math.cos(theta), math.sin(theta))
    return Affine(rotation * a, rotation * (1 - a))


def horodisc_transform_check(expr: MapExpr, C: float, theta: float = 0.0, tol: Optional[float] = None,
                             **grid_kwargs) -> CriterionReport:
    """
    Unweighted Becker quantity of g = f o T over the disc, T the horodisc map

    The growth condition with constant C forces this to stay at most 1.
    """
    tol = settings.CRITERION_TOL if tol is None else tol
    T = horodisc_map(C, theta)

    def margin(z):
        return 1.0 - np.abs(compose_pre_schwarzian(expr, T, z)) * disc_weight(z)

    report = grid_verdict("horodisc-transform", UNIT_DISC, margin, tol, **grid_kwargs)
    report.details.update({"C": C, "theta": theta, "a": horodisc_parameter(C), "max": 1.0 - report.worst_margin})
    return report


def horodisc_majorant(C: float, z: Any):
    """(1 + C(1 - t))(1 - |z|^2) / ((1 + C)^2 (1 - t^2)) with t = |a + z/(1 + C)^2|"""
    z = np.asarray(z, dtype=complex)
    b = (1 + C) ** -2
    a = 1 - b
    t = np.abs(a + b * z)
    weight = disc_weight(z)
    # 1 - t^2 expanded with a + b = 1 to avoid cancellation at the tangency point
    one_minus_t2 = 2 * a * b * (1 - np.real(z)) + b ** 2 * weight
    one_minus_t = one_minus_t2 / (1 + t)
    return (1 + C * one_minus_t) * weight / ((1 + C) ** 2 * one_minus_t2)


def majorant_grid(n_radial: int = 512, n_angular: int = 512, tail: int = 30) -> np.ndarray:
    """Polar grid with linear radii plus a geometric tail toward the circle"""
    radii = np.concatenate([np.arange(n_radial) / n_radial, 1 - 2.0 ** -np.arange(10, tail + 1)])
    angles = 2 * np.pi * np.arange(n_angular) / n_angular - np.pi
    return (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()


def horodisc_majorant_max(C: float, grid: Optional[np.ndarray] = None) -> float:
    """Largest value of the horodisc majorant over the grid; bounded by 1 for C > 1"""
    if C <= 1:
        raise InapplicableError(f"The horodisc majorant is stated for C > 1, got {C}")
    grid = majorant_grid() if grid is None else grid
    return float(np.max(horodisc_majorant(C, grid)))


def majorant_critical_radius(C: float) -> float:
    """Root t_C of -C t^2 + 2(1 + C) t - C in (0, 1)"""
    return (1 + C - math.sqrt(1 + 2 * C)) / C


def majorant_profile(C: float, t: Any):
    """h(t) = (1 + C(1 - t)) / (1 - t^2)"""
    t = np.asarray(t, dtype=float)
    return (1 + C * (1 - t)) / ((1 - t) * (1 + t))


def majorant_profile_slope(C: float, t: Any):
    """Numerator of h'(t); carries the sign of the derivative"""
    t = np.asarray(t, dtype=float)
    return -C * t ** 2 + 2 * (1 + C) * t - C


def local_becker_limsup(expr: MapExpr, zeta: complex, n_points: Optional[int] = None) -> Dict[str, Any]:
    """
    Radial limsup of |P(f)|(1 - |w|^2) toward a boundary point

    Values are taken at w = (1 - 2^-k) zeta; the estimate is the max over the last
    third of the ladder.
    """
    n_points = settings.LIMSUP_POINTS if n_points is None else n_points
    zeta = complex(zeta)
    if abs(abs(zeta) - 1) > 1e-12:
        raise DomainError(f"Limsup direction must lie on the unit circle, got {zeta}")
    radii = 1 - 2.0 ** -np.arange(1, n_points + 1)
    values = becker_quantity(expr, radii * zeta)
    tail = values[-int(math.ceil(n_points / 3)):]
    estimate = float(np.max(tail))
    if estimate > settings.CLUSTERING_THRESHOLD:
        classification = CLUSTERING
    elif estimate < settings.UNIVALENCE_THRESHOLD:
        classification = LOCALLY_UNIVALENT
    else:
        classification = NO_CONCLUSION
    return {
        "zeta": [zeta.real, zeta.imag],
        "limsup_estimate": estimate,
        "classification": classification,
        "ladder": [[float(r), float(v)] for r, v in zip(radii, values)],
    }


def converse_disc_radius(a_modulus: float, C: float) -> float:
    """r_a with r_a^2 = (|a| - C/(1+C)) / (|a| (1 - |a| C/(1+C)))"""
    k = C / (1 + C)
    if not k < a_modulus < 1:
        raise InapplicableError(f"|a| must lie in ({k:.6g}, 1), got {a_modulus}")
    return math.sqrt((a_modulus - k) / (a_modulus * (1 - a_modulus * k)))


def converse_bound_check(expr: MapExpr, mode: str, params: Dict[str, Any], tol: Optional[float] = None,
                         **grid_kwargs) -> CriterionReport:
    """
    Converse bounds for maps univalent in horodiscs

    mode "th3" (alias "tangent-disc"): |P(f)|(1-|z|^2) <= 2 + 4/r_|z| on C/(1+C) < |z| < 1, where the map is
    univalent in the discs D(C/(1+C) e^{i theta}, 1/(1+C)).
    mode "th2" (alias "horodisc"): |P(f)|(1-|z|) <= 4 on a <= |z| < 1, where the map is univalent in
    the horodiscs D(a e^{i theta}, 1 - a).
    """
    tol = settings.CRITERION_TOL if tol is None else tol
    canonical = CONVERSE_MODES.get(mode)
    if canonical == "th2":
        a = float(params.get("a", 0.0))
        region = Annulus(a, 1.0)

        def margin(z):
            modulus = np.abs(z)
            return 4.0 - becker_quantity(expr, z) / (1 + modulus)

        report = grid_verdict("th2-bound", region, margin, tol, **grid_kwargs)
        report.details.update({"a": a, "bound": 4.0})
        return report

    if canonical == "th3":
        C = float(params["C"])
        k = C / (1 + C)
        region = Annulus(k, 1.0)

        def margin(z):
            modulus = np.abs(z)
            inside = modulus > k
            safe = np.where(inside, modulus, 0.5 * (1 + k))
            r_a = np.sqrt((safe - k) / (safe * (1 - safe * k)))
            bound = np.where(inside, 2 + 4 / np.where(inside, r_a, 1.0), np.inf)
            return bound - becker_quantity(expr, z)

        report = grid_verdict("th3-bound", region, margin, tol, **grid_kwargs)
        report.details.update({"C": C, "inner_radius": k})
        return report

    raise InapplicableError(f"Unknown converse bound mode '{mode}'")


def criterion_verdict(expr: MapExpr, criterion: str, region: Region = UNIT_DISC,
                      params: Optional[Dict[str, Any]] = None, tol: Optional[float] = None,
                      **grid_kwargs) -> Dict[str, Any]:
    """Dispatch a criterion id to its verdict and return the JSON record"""
    params = params or {}
    if criterion in ("becker", "becker-z"):
        return becker_verdict(expr, region, tol, criterion=criterion, **grid_kwargs).to_dict()
    if criterion == "nehari":
        return nehari_verdict(expr, region, tol, **grid_kwargs).to_dict()
    if criterion == "hv":
        C = float(params["C"])
        record = hv_verdict(expr, C, tol, **grid_kwargs)
        if not record["holds_on_disc"]:
            record["majorant_max"] = horodisc_majorant_max(C)
            record["horodisc_transform"] = horodisc_transform_check(
                expr, C, float(params.get("theta", 0.0)), tol, **grid_kwargs
            ).to_dict()
        # the horodisc guarantee only counts when its numerical chain also checks out
        record["holds"] = bool(
            record["condition"]["holds"]
            and record.get("majorant_max", 1.0) <= 1 + 1e-9
            and record.get("horodisc_transform", {}).get("holds", True)
        )
        return record
    if criterion in CONVERSE_CRITERIA:
        return converse_bound_check(expr, CONVERSE_CRITERIA[criterion], params, tol, **grid_kwargs).to_dict()
    raise InapplicableError(f"Unknown criterion '{criterion}'")
