"""Experiments on the example family: the critical constant and valence growth"""

import logging
from typing import Any, Dict, Optional, Sequence

import numpy as np

from config.settings import settings
from unidisc.analytic.expressions import ExampleFamily
from unidisc.errors import ConvergenceError, PredicateNoiseError
from unidisc.valence.boundary import is_simple, sign_changes_real, trace_boundary
from unidisc.valence.counting import valence_estimate

logger = logging.getLogger(__name__)

_MAX_BRACKET = 256.0


def boundary_is_simple(C: float, zeta: complex, chord_tol: Optional[float] = None) -> bool:
    """Whether the boundary curve of the example family is a simple closed curve"""
    expr = ExampleFamily(C, zeta)
    trace = trace_boundary(expr, chord_tol=chord_tol)
    result = is_simple(trace, expr)
    logger.debug(f"C={C:.6g}, zeta={zeta}: simple={result['simple']} ({len(trace.t)} points)")
    return result["simple"]


def critical_C(zeta: complex, tol_C: Optional[float] = None, lo: float = 1.0) -> float:
    """
    Smallest C at which the boundary curve stops being simple, by bisection

    Args:
        zeta: Point of the unit circle
        tol_C: Width of the final bracket
        lo: A value of C known to give a simple curve

    Returns:
        Midpoint of the final bracket

    Raises:
        PredicateNoiseError: Finer traces disagree with the final bracket
        ConvergenceError: No non-simple C found below the bracket cap
    """
    tol_C = settings.CRITICAL_C_TOL if tol_C is None else tol_C
    zeta = complex(zeta)
    if not boundary_is_simple(lo, zeta):
        raise PredicateNoiseError(f"Boundary curve is not simple at the lower end C={lo}", (lo, lo))

    hi = 2 * lo
    while boundary_is_simple(hi, zeta):
        lo, hi = hi, 2 * hi
        if hi > _MAX_BRACKET:
            raise ConvergenceError(f"Boundary curve stayed simple up to C={lo} for zeta={zeta}")
    logger.info(f"Bracket for zeta={zeta}: [{lo}, {hi}]")

    while hi - lo > tol_C:
        mid = (lo + hi) / 2
        if boundary_is_simple(mid, zeta):
            lo = mid
        else:
            hi = mid

    # recheck both ends with half the chord tolerance
    checks = []
    for C in (lo, hi):
        coarse = trace_boundary(ExampleFamily(C, zeta))
        checks.append(boundary_is_simple(C, zeta, chord_tol=coarse.chord_tol / 2))
    if checks != [True, False]:
        raise PredicateNoiseError(f"Simpleness is not monotone across [{lo:.6g}, {hi:.6g}]", (lo, hi))

    result = (lo + hi) / 2
    logger.info(f"Critical C for zeta={zeta}: {result:.4f} (bracket width {hi - lo:.3g})")
    return result


def valence_slope(zeta: complex, C_list: Sequence[float]) -> Dict[str, Any]:
    """
    Valence of the example family for each C and its least-squares slope through the origin

    The slope is logged against settings.SLOPE_REFERENCE and never asserted.
    """
    zeta = complex(zeta)
    per_C = []
    sign_counts = []
    cross_checked = []
    for C in C_list:
        if C <= 0:
            raise ValueError(f"C must be positive, got {C}")
        expr = ExampleFamily(float(C), zeta)
        estimate = valence_estimate(expr, method="winding")
        per_C.append((float(C), estimate.value))
        sign_counts.append((float(C), sign_changes_real(expr)))
        cross_checked.append(estimate.cross_checked)
        logger.info(f"C={C}: valence {estimate.value}, sign changes {sign_counts[-1][1]}")

    cs = np.array([c for c, _ in per_C], dtype=float)
    vs = np.array([v for _, v in per_C], dtype=float)
    slope = float(np.dot(cs, vs) / np.dot(cs, cs)) if len(cs) else float("nan")
    logger.info(f"Valence slope {slope:.4f} against reference {settings.SLOPE_REFERENCE:.4f}")
    return {
        "zeta": [zeta.real, zeta.imag],
        "per_C": per_C,
        "slope": slope,
        "reference_slope": settings.SLOPE_REFERENCE,
        "sign_counts": sign_counts,
        "cross_checked": cross_checked,
        "monotone": bool(np.all(np.diff(vs[np.argsort(cs, kind="stable")]) >= 0)),
    }
