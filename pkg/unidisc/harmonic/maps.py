"""Harmonic maps f = h + conj(g) of the disc

Dilatation, Jacobian, the harmonic pre-Schwarzian and Schwarzian, the harmonic
Becker criterion, the hyperbolic separation of preimages and the Omega-map of a
starlike decomposition.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Union

import numpy as np

from config.settings import settings
from unidisc.analytic.codec import decode_expr, encode_expr
from unidisc.analytic.expressions import Constant, Identity, MapExpr, Quotient, Sum, eval_jet
from unidisc.errors import ConfigError, DegenerateDilatationError, InapplicableError
from unidisc.geometry.disc import hyperbolic_distance, hyperbolic_midpoint
from unidisc.geometry.regions import Region, UNIT_DISC
from unidisc.operators.derivatives import derivative_jet, disc_weight, pre_schwarzian_jet
from unidisc.univalence.criteria import grid_verdict
from unidisc.univalence.reports import CriterionReport

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HarmonicMap:
    """f = h + conj(g) with h, g analytic"""
    h: MapExpr = Identity()
    g: MapExpr = Constant(0)

    @property
    def omega(self) -> MapExpr:
        """Dilatation descriptor g'/h'"""
        return Quotient(self.g.derivative(), self.h.derivative())

    def normalized(self) -> "HarmonicMap":
        """Same map with g(0) = 0"""
        g0 = complex(eval_jet(self.g, 0j).f)
        if g0 == 0:
            return self
        return HarmonicMap(Sum((self.h, Constant(g0.conjugate()))), Sum((self.g, Constant(-g0))))

    def values(self, z: Any):
        return eval_jet(self.h, z).f + np.conj(eval_jet(self.g, z).f)

    def to_dict(self) -> Dict[str, Any]:
        return {"h": encode_expr(self.h), "g": encode_expr(self.g)}

    @classmethod
    def from_dict(cls, record: Dict[str, Any]) -> "HarmonicMap":
        if not isinstance(record, dict) or "h" not in record:
            raise ConfigError("Harmonic map needs an 'h' descriptor", field="map.h")
        g = decode_expr(record["g"]) if "g" in record else Constant(0)
        return cls(decode_expr(record["h"]), g).normalized()


@dataclass(frozen=True)
class SeparationQuery:
    z1: complex
    z2: complex
    C: float


def _dilatation_jet(hmap: HarmonicMap, z: Any):
    """(omega, omega', omega''), after checking that h' does not vanish"""
    derivative_jet(hmap.h, z)
    return eval_jet(hmap.omega, z)


def _check_dilatation(omega, z) -> None:
    degenerate = np.abs(omega) >= 1
    if np.any(degenerate):
        point = complex(np.ravel(np.asarray(z, dtype=complex))[np.argmax(np.ravel(degenerate))])
        raise DegenerateDilatationError(f"|omega| >= 1 at {point}; the Jacobian is not positive", point)


def dilatation(hmap: HarmonicMap, z: Any):
    """omega = g'/h'"""
    omega = _dilatation_jet(hmap, z).f
    return complex(omega) if np.ndim(z) == 0 else omega


def jacobian(hmap: HarmonicMap, z: Any):
    """J = |h'|^2 - |g'|^2"""
    value = np.abs(eval_jet(hmap.h, z).df) ** 2 - np.abs(eval_jet(hmap.g, z).df) ** 2
    return float(value) if np.ndim(z) == 0 else value


def _harmonic_terms(hmap: HarmonicMap, z: Any):
    omega = _dilatation_jet(hmap, z)
    _check_dilatation(omega.f, z)
    p, dp = pre_schwarzian_jet(hmap.h, z)
    ratio = np.conj(omega.f) / (1 - np.abs(omega.f) ** 2)
    return omega, p, dp, ratio


def harmonic_pre_schwarzian(hmap: HarmonicMap, z: Any):
    """P(f) = P(h) - conj(omega) omega' / (1 - |omega|^2)"""
    omega, p, _, ratio = _harmonic_terms(hmap, z)
    value = p - ratio * omega.df
    return complex(value) if np.ndim(z) == 0 else value


def harmonic_schwarzian(hmap: HarmonicMap, z: Any):
    """S(f) = S(h) + conj(omega)/(1 - |omega|^2) (P(h) omega' - omega'') - 3/2 (conj(omega) omega'/(1 - |omega|^2))^2"""
    omega, p, dp, ratio = _harmonic_terms(hmap, z)
    value = dp - 0.5 * p ** 2 + ratio * (p * omega.df - omega.d2f) - 1.5 * (ratio * omega.df) ** 2
    return complex(value) if np.ndim(z) == 0 else value


def harmonic_becker_quantity(hmap: HarmonicMap, z: Any):
    """|P(f)| (1 - |z|^2) + |omega'| (1 - |z|^2) / (1 - |omega|^2)"""
    omega, p, _, ratio = _harmonic_terms(hmap, z)
    weight = disc_weight(z)
    value = np.abs(p - ratio * omega.df) * weight + np.abs(omega.df) * weight / (1 - np.abs(omega.f) ** 2)
    return float(value) if np.ndim(z) == 0 else value


def harmonic_becker_verdict(hmap: HarmonicMap, region: Region = UNIT_DISC, tol: Optional[float] = None,
                            **grid_kwargs) -> CriterionReport:
    """Grid verdict of the harmonic Becker quantity against 1"""
    tol = settings.CRITERION_TOL if tol is None else tol

    def margin(z):
        return 1.0 - harmonic_becker_quantity(hmap, z)

    return grid_verdict("harmonic-becker", region, margin, tol, **grid_kwargs)


def separation_bound(query: SeparationQuery) -> float:
    """
    Lower bound for d_H(z1, z2) when f(z1) = f(z2)

    Raises:
        InapplicableError: 1 - |xi| is not below 1/C, xi the hyperbolic midpoint
    """
    if query.C <= 0:
        raise InapplicableError(f"C must be positive, got {query.C}")
    xi = hyperbolic_midpoint(query.z1, query.z2)
    return separation_bound_at(1 - abs(xi), query.C)


def separation_bound_at(depth: float, C: float) -> float:
    """log((2 - sqrt(C depth)) / sqrt(C depth)) for 0 < depth < 1/C"""
    if not 0 < depth < 1 / C:
        raise InapplicableError(f"Separation bound needs 0 < 1 - |xi| < 1/C, got {depth:.6g} with C={C}")
    x = math.sqrt(C * depth)
    return math.log((2 - x) / x)


def separation_check(hmap: HarmonicMap, query: SeparationQuery, dH: Optional[float] = None) -> Dict[str, Any]:
    """Compare the hyperbolic distance of a preimage pair with the separation bound"""
    distance = hyperbolic_distance(query.z1, query.z2) if dH is None else dH
    bound = separation_bound(query)
    image_gap = float(abs(hmap.values(complex(query.z1)) - hmap.values(complex(query.z2))))
    holds = bool(distance >= bound)
    if not holds:
        logger.info(f"Pair {query.z1}, {query.z2} closer than {bound:.6g} (d_H = {distance:.6g})")
    return {"holds": holds, "dH": float(distance), "bound": bound, "image_gap": image_gap}


def harmonic_separation_margin(hmap: HarmonicMap, C: float, z: Any, delta0: Optional[float] = None,
                               exponent: Optional[float] = None):
    """delta0 (1 + C (1 - |z|)) - |S(f)| (1 - |z|^2)^exponent; used as a label, never as a verdict"""
    delta0 = settings.DELTA0 if delta0 is None else delta0
    exponent = settings.HARMONIC_SCHWARZIAN_EXPONENT if exponent is None else exponent
    modulus = np.abs(np.asarray(z, dtype=complex))
    value = delta0 * (1 + C * (1 - modulus)) - np.abs(harmonic_schwarzian(hmap, z)) * disc_weight(z, exponent)
    return float(value) if np.ndim(z) == 0 else value


def omega_map_check(hmap: HarmonicMap, z0: complex = 0j, samples: Union[int, np.ndarray] = 4096,
                    seed: Optional[int] = None) -> Dict[str, Any]:
    """
    Sup of |(g(z) - g(z0)) / (h(z) - h(z0))| over sample points

    The caller vouches that h is univalent with image starlike about h(z0); a
    value of at least 1 falsifies that premise.
    """
    seed = settings.DEFAULT_SEED if seed is None else seed
    z = UNIT_DISC.sample(samples, seed, method="halton") if np.ndim(samples) == 0 else np.asarray(samples, dtype=complex)
    z = z[np.abs(z - z0) > 1e-8]
    h0 = eval_jet(hmap.h, z0).f
    g0 = eval_jet(hmap.g, z0).f
    with np.errstate(divide="ignore", invalid="ignore"):
        big_omega = (eval_jet(hmap.g, z).f - g0) / (eval_jet(hmap.h, z).f - h0)
    moduli = np.abs(big_omega)
    finite = np.isfinite(moduli)
    if not np.all(finite):
        logger.warning(f"{np.count_nonzero(~finite)} samples with h(z) = h(z0) skipped")
    moduli, z = moduli[finite], z[finite]
    k = int(np.argmax(moduli))
    flagged = bool(moduli[k] >= 1)
    if flagged:
        logger.warning(f"|Omega| = {moduli[k]:.6g} at {z[k]}: h is not univalent and starlike about h(z0)")
    return {
        "max_modulus": float(moduli[k]),
        "argmax": [float(z[k].real), float(z[k].imag)],
        "flagged": flagged,
        "samples": int(len(z)),
    }


def image_sup(hmap: HarmonicMap, r_max: float = 0.999, sub_rings: int = 1) -> Dict[str, Any]:
    """Largest |f| over a ring grid of |z| <= r_max"""
    ring_depth = max(1, int(math.ceil(-math.log2(1 - r_max))))
    points = UNIT_DISC.grid(sub_rings=sub_rings, depth=ring_depth)
    points = points[np.abs(points) <= r_max]
    moduli = np.abs(hmap.values(points))
    k = int(np.argmax(moduli))
    return {"sup": float(moduli[k]), "argmax": [float(points[k].real), float(points[k].imag)],
            "points": int(len(points))}
