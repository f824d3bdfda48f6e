"""Envelope functions phi on [R, 1) and the two integral conditions on them

Integrals are taken in the gap variable u = -log(1 - t), where the envelopes
used here have smooth, bounded densities phi(1 - e^-u) e^-u.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad, solve_ivp

from config.settings import settings
from unidisc.analytic.expressions import MapExpr, eval_jet
from unidisc.errors import (ConditionViolatedError, ConfigError, ConvergenceError, DomainError,
                            IndeterminateIntegralError)
from unidisc.operators.derivatives import pre_schwarzian

logger = logging.getLogger(__name__)


def gap(t: Any):
    """u = -log(1 - t)"""
    return -np.log1p(-np.asarray(t, dtype=float))


@dataclass(frozen=True)
class Envelope:
    """Nonnegative majorant phi on [start, 1)"""

    kind = "abstract"

    def value(self, t: Any):
        raise NotImplementedError

    def gap_density(self, v: Any):
        """phi(1 - e^-v) e^-v"""
        v = np.asarray(v, dtype=float)
        return self.value(-np.expm1(-v)) * np.exp(-v)

    def breakpoints(self) -> Tuple[float, ...]:
        return ()

    def primitive(self, t: float) -> Optional[float]:
        """Closed-form antiderivative when one is known"""
        return None

    @property
    def start(self) -> float:
        raise NotImplementedError

    def to_dict(self) -> Dict[str, Any]:
        raise NotImplementedError

    def __add__(self, other: "Envelope") -> "Envelope":
        return SumEnvelope((self, other))


@dataclass(frozen=True)
class RationalEnvelope(Envelope):
    """B / (1 - t^2)"""
    B: float = 2.0
    R: float = 0.0
    kind = "rational"

    def value(self, t: Any):
        t = np.asarray(t, dtype=float)
        return self.B / ((1 - t) * (1 + t))

    def gap_density(self, v: Any):
        return self.B / (2 - np.exp(-np.asarray(v, dtype=float)))

    def primitive(self, t: float) -> float:
        return self.B / 2 * (math.log1p(t) - math.log1p(-t))

    @property
    def start(self) -> float:
        return self.R

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "B": self.B, "R": self.R}


@dataclass(frozen=True)
class LogPowerEnvelope(Envelope):
    """C / (1 - t^2) (log(e / (1 - t)))^-(1 + eps)"""
    C: float = 1.0
    eps: float = 0.5
    R: float = 0.0
    kind = "log_power"

    def value(self, t: Any):
        t = np.asarray(t, dtype=float)
        return self.C / ((1 - t) * (1 + t)) * (1 - np.log1p(-t)) ** -(1 + self.eps)

    def gap_density(self, v: Any):
        v = np.asarray(v, dtype=float)
        return self.C / (2 - np.exp(-v)) * (1 + v) ** -(1 + self.eps)

    @property
    def start(self) -> float:
        return self.R

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "C": self.C, "eps": self.eps, "R": self.R}


@dataclass(frozen=True)
class ConstantEnvelope(Envelope):
    c: float = 0.0
    R: float = 0.0
    kind = "constant"

    def value(self, t: Any):
        return np.full(np.shape(t), self.c, dtype=float)

    def primitive(self, t: float) -> float:
        return self.c * t

    @property
    def start(self) -> float:
        return self.R

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "c": self.c, "R": self.R}


@dataclass(frozen=True)
class SumEnvelope(Envelope):
    terms: Tuple[Envelope, ...] = ()
    kind = "sum"

    def value(self, t: Any):
        return sum(term.value(t) for term in self.terms)

    def gap_density(self, v: Any):
        return sum(term.gap_density(v) for term in self.terms)

    def breakpoints(self) -> Tuple[float, ...]:
        return tuple(sorted({p for term in self.terms for p in term.breakpoints()}))

    def primitive(self, t: float) -> Optional[float]:
        parts = [term.primitive(t) for term in self.terms]
        return None if any(p is None for p in parts) else float(sum(parts))

    @property
    def start(self) -> float:
        return max((term.start for term in self.terms), default=0.0)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "terms": [term.to_dict() for term in self.terms]}


@dataclass(frozen=True)
class TabulatedEnvelope(Envelope):
    """Piecewise linear through (t_i, phi_i), constant beyond the last node"""
    nodes: Tuple[float, ...] = (0.0,)
    values: Tuple[float, ...] = (0.0,)
    kind = "tabulated"

    def __post_init__(self):
        if len(self.nodes) != len(self.values) or not self.nodes:
            raise ConfigError("Tabulated envelope needs matching, non-empty node and value lists", field="values")
        if any(b <= a for a, b in zip(self.nodes, self.nodes[1:])):
            raise ConfigError("Tabulated envelope nodes must increase", field="nodes")
        if min(self.values) < 0:
            raise ConfigError("Envelope values must be nonnegative", field="values")

    def value(self, t: Any):
        return np.interp(np.asarray(t, dtype=float), self.nodes, self.values)

    def breakpoints(self) -> Tuple[float, ...]:
        return tuple(self.nodes)

    @property
    def start(self) -> float:
        return self.nodes[0]

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "nodes": list(self.nodes), "values": list(self.values)}


def envelope_from_dict(node: Dict[str, Any]) -> Envelope:
    """Decode an envelope record of the JSON config dialect"""
    if not isinstance(node, dict) or "kind" not in node:
        raise ConfigError("Envelope must be an object with a 'kind' field", field="envelope")
    kind = node["kind"]
    try:
        if kind == "rational":
            return RationalEnvelope(float(node.get("B", 2.0)), float(node.get("R", 0.0)))
        if kind == "log_power":
            return LogPowerEnvelope(float(node.get("C", 1.0)), float(node.get("eps", 0.5)), float(node.get("R", 0.0)))
        if kind == "constant":
            return ConstantEnvelope(float(node.get("c", 0.0)), float(node.get("R", 0.0)))
        if kind == "sum":
            return SumEnvelope(tuple(envelope_from_dict(term) for term in node.get("terms", [])))
        if kind == "tabulated":
            return TabulatedEnvelope(tuple(float(x) for x in node["nodes"]), tuple(float(x) for x in node["values"]))
    except (TypeError, ValueError, KeyError) as e:
        raise ConfigError(f"Invalid {kind} envelope: {e}", field="envelope")
    raise ConfigError(f"Unknown envelope kind: {kind}", field="envelope.kind")


def _gap_integral(env: Envelope, u0: float, u1: float, tol: float) -> float:
    if u1 <= u0:
        return 0.0
    points = [float(gap(p)) for p in env.breakpoints() if u0 < float(gap(p)) < u1] or None
    value, error, *rest = quad(lambda v: float(env.gap_density(v)), u0, u1, epsabs=tol, epsrel=1e-12,
                               limit=settings.PATH_SUBDIVISION_LIMIT, points=points, full_output=1)
    if len(rest) > 1:
        raise ConvergenceError(f"Envelope integral on [{u0:.6g}, {u1:.6g}] did not converge: {rest[1]}")
    return float(value)


def envelope_integral(env: Envelope, r: float, tol: float = 1e-12, lower: Optional[float] = None) -> float:
    """
    Integral of phi from the envelope's start (or ``lower``) to r

    Raises:
        DomainError: r outside [start, 1)
        ConvergenceError: Quadrature missed the tolerance
    """
    lower = env.start if lower is None else lower
    if not env.start <= lower <= r < 1:
        raise DomainError(f"Envelope integral needs {env.start} <= {lower} <= r < 1, got r={r}")
    return _gap_integral(env, float(gap(lower)), float(gap(r)), tol)


def _default_ladder(start: float) -> np.ndarray:
    ladder = 1 - 2.0 ** -np.arange(1, 31)
    return ladder[ladder > start]


def condition_i_estimate(env: Envelope, r_ladder: Optional[Sequence[float]] = None) -> Dict[str, Any]:
    """
    (1 - r) exp(integral of phi up to r) along a ladder approaching 1

    The limsup counts as finite when the later half of the ladder tail stays below
    settings.LIMSUP_TAIL_FACTOR times the tail median; the tail is the last third.
    """
    radii = np.sort(np.asarray(_default_ladder(env.start) if r_ladder is None else r_ladder, dtype=float))
    if len(radii) == 0:
        raise DomainError("Condition (i) ladder has no radius inside [start, 1)")
    log_values = []
    running, previous = 0.0, env.start
    for r in radii:
        running += envelope_integral(env, float(r), lower=previous)
        previous = float(r)
        log_values.append(math.log1p(-r) + running)
    values = np.exp(np.minimum(log_values, 700.0))

    tail = values[-max(1, math.ceil(len(values) / 3)):]
    late = tail[len(tail) // 2:]
    median = float(np.median(tail))
    finite = bool(np.max(late) <= settings.LIMSUP_TAIL_FACTOR * median) if median > 0 else bool(np.max(late) == 0)
    estimate = float(np.max(tail)) if finite else math.inf
    logger.debug(f"Condition (i) for {env.kind}: tail {tail[0]:.4g} .. {tail[-1]:.4g}, finite={finite}")
    return {
        "ladder": [float(r) for r in radii],
        "values": [float(v) for v in values],
        "limsup_estimate": estimate,
        "finite": finite,
    }


def condition_ii_integral(env: Envelope, tol: float = 1e-8) -> Dict[str, Any]:
    """
    The improper integral of exp(integral of phi from R to s) over s in [R, 1)

    In the gap variable the integrand is exp(I(u) - u); it is integrated as an
    ODE for (I, J) over panels of width 2^j.

    Raises:
        IndeterminateIntegralError: Neither convergence nor divergence within the panel budget
    """
    u = float(gap(env.start))
    state = np.array([0.0, 0.0])
    pieces: List[float] = []

    def rhs(v, y):
        return [float(env.gap_density(v)), math.exp(min(y[0] - v, 700.0))]

    def over_cap(v, y):
        return y[1] - settings.DIVERGENCE_CAP

    over_cap.terminal = True

    for j in range(settings.ENVELOPE_PANELS):
        width = 2.0 ** j
        solution = solve_ivp(rhs, (u, u + width), state, method="RK45", rtol=1e-10, atol=1e-14 * max(1.0, state[1]),
                             events=over_cap)
        if solution.status == -1:
            raise ConvergenceError(f"Condition (ii) integration failed: {solution.message}")
        piece = float(solution.y[1, -1] - state[1])
        state = solution.y[:, -1]
        u = float(solution.t[-1])
        pieces.append(piece)
        if solution.status == 1 or state[1] >= settings.DIVERGENCE_CAP:
            completed = pieces[:-1]
            growing = len(completed) < 2 or completed[-1] >= completed[-2]
            if not growing:
                break
            logger.info(f"Condition (ii) diverges for {env.kind}: partial sum passed {settings.DIVERGENCE_CAP:g}")
            return {"convergent": False, "divergent": True, "value": None, "partial_sum": float(state[1]),
                    "panels": j + 1}
        if j >= 2 and piece < tol and piece <= pieces[-2] <= pieces[-3]:
            logger.debug(f"Condition (ii) converged for {env.kind} after {j + 1} panels")
            return {"convergent": True, "divergent": False, "value": float(state[1]), "partial_sum": float(state[1]),
                    "panels": j + 1}
    raise IndeterminateIntegralError(f"Condition (ii) for {env.kind} undecided after {len(pieces)} panels "
                                     f"(partial sum {state[1]:.6g})")


def growth_bound_check(expr: MapExpr, env: Envelope, zeta: complex, rho: float, r_list: Sequence[float],
                       tol: float = 1e-6, grid_points: int = 1024) -> Dict[str, Any]:
    """
    Pointwise check of the derivative and value bounds along the ray t zeta

    |f'(r zeta)| <= |f'(rho zeta)| exp(int_rho^r phi) and
    |f(r zeta) - f(rho zeta)| <= |f'(rho zeta)| int_rho^r exp(int_rho^s phi) ds.

    Raises:
        ConditionViolatedError: |f''/f'| exceeds phi somewhere on the ray
    """
    zeta = complex(zeta)
    radii = np.sort(np.asarray(r_list, dtype=float))
    if not env.start <= rho < radii[0] or radii[-1] >= 1:
        raise DomainError(f"Need start <= rho < r < 1, got rho={rho}, r={radii.tolist()}")

    ts = np.unique(np.concatenate([rho + (radii[-1] - rho) * np.linspace(0.0, 1.0, grid_points), radii]))
    ps = np.abs(pre_schwarzian(expr, ts * zeta))
    bound = env.value(ts)
    excess = ps - bound * (1 + tol) - tol
    if np.any(excess > 0):
        k = int(np.argmax(excess))
        witness = complex(ts[k] * zeta)
        raise ConditionViolatedError(f"|P(f)| = {ps[k]:.6g} exceeds phi = {bound[k]:.6g} at {witness}",
                                     witness, float(ps[k] - bound[k]))

    base = eval_jet(expr, rho * zeta)
    base_df = abs(base.df)
    rows = []
    holds = True
    for r in radii:
        r = float(r)
        jet = eval_jet(expr, r * zeta)
        exponent = envelope_integral(env, r, lower=rho)
        derivative_bound = base_df * math.exp(exponent)
        spread, _ = quad(lambda s: math.exp(envelope_integral(env, s, lower=rho)), rho, r, epsrel=1e-10, limit=200)
        value_bound = base_df * spread
        gap_value = abs(jet.f - base.f)
        ok = abs(jet.df) <= derivative_bound * (1 + tol) and gap_value <= value_bound * (1 + tol) + tol
        holds &= ok
        rows.append({
            "r": r,
            "abs_derivative": float(abs(jet.df)),
            "derivative_bound": float(derivative_bound),
            "value_gap": float(gap_value),
            "value_bound": float(value_bound),
            "weighted_derivative": float(abs(jet.df) * (1 - r * r)),
            "holds": bool(ok),
        })
    if not holds:
        logger.warning(f"Growth bounds failed along ray {zeta} for {expr.kind}")
    return {
        "zeta": [zeta.real, zeta.imag],
        "rho": rho,
        "holds": bool(holds),
        "hypothesis_margin": float(np.max(ps - bound)),
        "weighted_derivative_sup": max(row["weighted_derivative"] for row in rows),
        "rows": rows,
    }
