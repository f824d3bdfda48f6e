"""Map descriptors: immutable expression trees for analytic maps of the disc

Every node knows how to
  * push a jet through itself (``apply``), which gives f, f', f'' by exact
    jet arithmetic,
  * produce a descriptor of its own derivative (``derivative``), which is how
    third derivatives (and hence Schwarzians) are obtained without finite
    differences,
  * declare its singular points in the closed disc (``singularities``).

Fractional powers use the principal branch. The builtins only raise 1 + z and
1 - z to fractional powers, and both have positive real part on the disc.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Tuple

import numpy as np

from config.settings import settings
from unidisc.analytic.jets import Jet2
from unidisc.errors import DomainError, SingularPointError

logger = logging.getLogger(__name__)


def _is_nonneg_integer(p: complex) -> bool:
    return np.imag(p) == 0 and float(np.real(p)).is_integer() and np.real(p) >= 0


def _in_closed_disc(points) -> Tuple[complex, ...]:
    return tuple(complex(s) for s in points if abs(s) <= 1 + 1e-12)


def _pull_back(inner: "MapExpr", targets, steps: int = 60, tol: float = 1e-11) -> Tuple[complex, ...]:
    """Points of the closed disc that inner maps onto one of the targets, found by Newton from a polar seed grid"""
    radii = np.array([0.0, 0.3, 0.6, 0.85, 0.97, 1.0])
    angles = 2 * np.pi * np.arange(24) / 24
    seeds = (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()
    found = []
    for s in targets:
        z = seeds.copy()
        with np.errstate(all="ignore"):
            for _ in range(steps):
                jet = inner.apply(Jet2.variable(z))
                step = (jet.f - s) / jet.df
                z = np.where(np.isfinite(step), z - step, z)
            residual = np.abs(inner.apply(Jet2.variable(z)).f - s)
        keep = np.isfinite(residual) & (residual < tol) & (np.abs(z) <= 1 + 1e-9)
        for point in z[keep]:
            if all(abs(point - other) > 1e-8 for other in found):
                found.append(complex(point))
    return tuple(found)


@lru_cache(maxsize=256)
def _cached_pull_back(inner: "MapExpr", targets: Tuple[complex, ...]) -> Tuple[complex, ...]:
    return _pull_back(inner, targets)


class MapExpr:
    """Base class for map descriptors"""

    kind = "abstract"

    def apply(self, u: Jet2) -> Jet2:
        raise NotImplementedError

    def derivative(self) -> "MapExpr":
        raise NotImplementedError

    def singularities(self) -> Tuple[complex, ...]:
        return ()

    def children(self) -> Tuple["MapExpr", ...]:
        return ()

    def has_primitive(self) -> bool:
        return any(child.has_primitive() for child in self.children())

    # Operator sugar keeps test and experiment code readable
    def __add__(self, other: "MapExpr") -> "MapExpr":
        return Sum((self, other))

    def __mul__(self, other: "MapExpr") -> "MapExpr":
        return Product((self, other))

    def __call__(self, inner: "MapExpr") -> "MapExpr":
        return Compose(self, inner)


@dataclass(frozen=True)
class Identity(MapExpr):
    kind = "identity"

    def apply(self, u: Jet2) -> Jet2:
        return u

    def derivative(self) -> MapExpr:
        return Constant(1)


@dataclass(frozen=True)
class Constant(MapExpr):
    c: complex = 0j
    kind = "constant"

    def apply(self, u: Jet2) -> Jet2:
        return Jet2.constant(np.full(np.shape(u.f), self.c, dtype=complex))

    def derivative(self) -> MapExpr:
        return Constant(0)


@dataclass(frozen=True)
class Affine(MapExpr):
    """z -> a + b z"""
    a: complex = 0j
    b: complex = 1 + 0j
    kind = "affine"

    def apply(self, u: Jet2) -> Jet2:
        return u * self.b + self.a

    def derivative(self) -> MapExpr:
        return Constant(self.b)


@dataclass(frozen=True)
class Mobius(MapExpr):
    """Disc automorphism z -> (a - z) / (1 - conj(a) z)"""
    a: complex = 0j
    kind = "mobius"

    def __post_init__(self):
        if abs(self.a) >= 1:
            raise DomainError(f"Mobius parameter must lie in the disc, got {self.a}")

    def apply(self, u: Jet2) -> Jet2:
        return (self.a - u) / (1 - np.conj(self.a) * u)

    def derivative(self) -> MapExpr:
        a = complex(self.a)
        return Scale(abs(a) ** 2 - 1, Compose(Power(-2), Affine(1, -a.conjugate())))


@dataclass(frozen=True)
class Power(MapExpr):
    """Principal branch of z**p"""
    p: complex = 1
    kind = "power"

    def apply(self, u: Jet2) -> Jet2:
        return u.power(self.p)

    def derivative(self) -> MapExpr:
        if self.p == 0:
            return Constant(0)
        if self.p == 1:
            return Constant(1)
        return Scale(self.p, Power(self.p - 1))

    def singularities(self) -> Tuple[complex, ...]:
        return () if _is_nonneg_integer(self.p) else (0j,)


@dataclass(frozen=True)
class Exp(MapExpr):
    kind = "exp"

    def apply(self, u: Jet2) -> Jet2:
        return u.exp()

    def derivative(self) -> MapExpr:
        return Exp()


@dataclass(frozen=True)
class Sum(MapExpr):
    terms: Tuple[MapExpr, ...] = ()
    kind = "sum"

    def apply(self, u: Jet2) -> Jet2:
        total = Jet2.constant(np.zeros(np.shape(u.f), dtype=complex))
        for term in self.terms:
            total = total + term.apply(u)
        return total

    def derivative(self) -> MapExpr:
        return Sum(tuple(term.derivative() for term in self.terms))

    def singularities(self) -> Tuple[complex, ...]:
        return tuple(s for term in self.terms for s in term.singularities())

    def children(self) -> Tuple[MapExpr, ...]:
        return self.terms


@dataclass(frozen=True)
class Product(MapExpr):
    factors: Tuple[MapExpr, ...] = ()
    kind = "product"

    def apply(self, u: Jet2) -> Jet2:
        total = Jet2.constant(np.ones(np.shape(u.f), dtype=complex))
        for factor in self.factors:
            total = total * factor.apply(u)
        return total

    def derivative(self) -> MapExpr:
        terms = []
        for i, factor in enumerate(self.factors):
            d = factor.derivative()
            if isinstance(d, Constant) and d.c == 0:
                continue
            others = self.factors[:i] + (d,) + self.factors[i + 1:]
            terms.append(Product(others))
        if not terms:
            return Constant(0)
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))

    def singularities(self) -> Tuple[complex, ...]:
        return tuple(s for factor in self.factors for s in factor.singularities())

    def children(self) -> Tuple[MapExpr, ...]:
        return self.factors


@dataclass(frozen=True)
class Quotient(MapExpr):
    numerator: MapExpr = Identity()
    denominator: MapExpr = Constant(1)
    kind = "quotient"

    def apply(self, u: Jet2) -> Jet2:
        return self.numerator.apply(u) / self.denominator.apply(u)

    def derivative(self) -> MapExpr:
        n, d = self.numerator, self.denominator
        top = Sum((Product((n.derivative(), d)), Scale(-1, Product((n, d.derivative())))))
        return Quotient(top, Product((d, d)))

    def singularities(self) -> Tuple[complex, ...]:
        return self.numerator.singularities() + self.denominator.singularities()

    def children(self) -> Tuple[MapExpr, ...]:
        return (self.numerator, self.denominator)


@dataclass(frozen=True)
class Scale(MapExpr):
    c: complex = 1
    expr: MapExpr = Identity()
    kind = "scale"

    def apply(self, u: Jet2) -> Jet2:
        return self.expr.apply(u) * self.c

    def derivative(self) -> MapExpr:
        return Scale(self.c, self.expr.derivative())

    def singularities(self) -> Tuple[complex, ...]:
        return self.expr.singularities()

    def children(self) -> Tuple[MapExpr, ...]:
        return (self.expr,)


@dataclass(frozen=True)
class Compose(MapExpr):
    """outer(inner(z))"""
    outer: MapExpr = Identity()
    inner: MapExpr = Identity()
    kind = "compose"

    def apply(self, u: Jet2) -> Jet2:
        return self.outer.apply(self.inner.apply(u))

    def derivative(self) -> MapExpr:
        outer_d = self.outer.derivative()
        inner_d = self.inner.derivative()
        if isinstance(inner_d, Constant):
            return Scale(inner_d.c, Compose(outer_d, self.inner))
        return Product((Compose(outer_d, self.inner), inner_d))

    def singularities(self) -> Tuple[complex, ...]:
        """
        Singular points of the inner map plus preimages of the outer ones

        Affine inner maps are inverted exactly, other inner maps by Newton. Only
        outer singularities that the outer map declares (those in the closed
        disc) are pulled back. Inner maps defined by quadrature are skipped.
        """
        points = list(self.inner.singularities())
        outer = self.outer.singularities()
        if isinstance(self.inner, Affine) and self.inner.b != 0:
            points.extend((s - self.inner.a) / self.inner.b for s in outer)
        elif outer and self.inner.has_primitive():
            logger.debug(f"Not pulling back {len(outer)} singular points through {self.inner.kind}")
        elif outer:
            try:
                points.extend(_cached_pull_back(self.inner, tuple(outer)))
            except TypeError:
                points.extend(_pull_back(self.inner, outer))
        return _in_closed_disc(points)

    def children(self) -> Tuple[MapExpr, ...]:
        return (self.outer, self.inner)


@dataclass(frozen=True)
class Koebe(MapExpr):
    """k(z) = z / (1 - z)^2"""
    kind = "koebe"

    def apply(self, u: Jet2) -> Jet2:
        return u / (1 - u).power(2)

    def derivative(self) -> MapExpr:
        return Product((Affine(1, 1), NegPower(3)))

    def singularities(self) -> Tuple[complex, ...]:
        return (1 + 0j,)


@dataclass(frozen=True)
class OddPoly(MapExpr):
    """(1 - z)^(2n + 1)"""
    n: int = 1
    kind = "odd_poly"

    def apply(self, u: Jet2) -> Jet2:
        return (1 - u).power(2 * self.n + 1)

    def derivative(self) -> MapExpr:
        return Scale(-(2 * self.n + 1), NegPower(-2 * self.n))


@dataclass(frozen=True)
class NegPower(MapExpr):
    """(1 - z)^(-p)"""
    p: float = 1.0
    kind = "neg_power"

    def apply(self, u: Jet2) -> Jet2:
        return (1 - u).power(-self.p)

    def derivative(self) -> MapExpr:
        if self.p == 0:
            return Constant(0)
        return Scale(self.p, NegPower(self.p + 1))

    def singularities(self) -> Tuple[complex, ...]:
        return () if _is_nonneg_integer(-self.p) else (1 + 0j,)


@dataclass(frozen=True)
class PrimitiveOf(MapExpr):
    """The map F with F' = expr and F(basepoint) = base_value"""
    expr: MapExpr = Constant(1)
    basepoint: complex = 0j
    base_value: complex = 0j
    kind = "primitive"

    def apply(self, u: Jet2) -> Jet2:
        from unidisc.analytic.integration import primitive_values

        inner = self.expr.apply(Jet2.variable(u.f))
        value = primitive_values(self, u.f)
        return u.chain(value, inner.f, inner.df)

    def derivative(self) -> MapExpr:
        return self.expr

    def singularities(self) -> Tuple[complex, ...]:
        return self.expr.singularities()

    def children(self) -> Tuple[MapExpr, ...]:
        return (self.expr,)

    def has_primitive(self) -> bool:
        return True


@dataclass(frozen=True)
class ExampleFamily(MapExpr):
    """f' = -i ((1 + z)/(1 - z))^(1/2) exp(C zeta z / 2), normalized by f(-1) = 0"""
    C: float = 1.0
    zeta: complex = 1 + 0j
    kind = "example"

    def __post_init__(self):
        if abs(abs(self.zeta) - 1) > 1e-12:
            raise DomainError(f"zeta must lie on the unit circle, got {self.zeta}")

    def derivative(self) -> MapExpr:
        return Product((
            Constant(-1j),
            Compose(Power(0.5), Affine(1, 1)),
            NegPower(0.5),
            Compose(Exp(), Affine(0, self.C * self.zeta / 2)),
        ))

    def as_primitive(self) -> PrimitiveOf:
        return PrimitiveOf(self.derivative(), -1 + 0j, 0j)

    def apply(self, u: Jet2) -> Jet2:
        return self.as_primitive().apply(u)

    def singularities(self) -> Tuple[complex, ...]:
        return (1 + 0j,)

    def has_primitive(self) -> bool:
        return True


def _check_singular(expr: MapExpr, z: np.ndarray) -> None:
    for s in expr.singularities():
        hits = np.abs(z - s) < settings.SINGULARITY_EPS
        if np.any(hits):
            point = complex(np.ravel(z)[np.argmax(np.ravel(hits))])
            raise SingularPointError(f"{expr.kind} is singular at {point}", point)


def eval_jet(expr: MapExpr, z: Any) -> Jet2:
    """
    Evaluate (f, f', f'') at interior points

    Args:
        expr: Map descriptor
        z: Complex scalar or array with |z| < 1

    Returns:
        Jet2 with scalar components for scalar input, arrays otherwise
    """
    scalar = np.ndim(z) == 0
    points = np.asarray(z, dtype=complex)
    if np.any(np.abs(points) >= 1):
        bad = complex(np.ravel(points)[np.argmax(np.ravel(np.abs(points) >= 1))])
        raise DomainError(f"Point {bad} is not inside the unit disc")
    _check_singular(expr, points)
    jet = expr.apply(Jet2.variable(points))
    return jet.item() if scalar else jet


def eval_derivative_jet(expr: MapExpr, z: Any) -> Jet2:
    """(f', f'', f''') at interior points, via the derivative descriptor"""
    return eval_jet(expr.derivative(), z)


def boundary_jet(expr: MapExpr, t: Any) -> Jet2:
    """
    Continuous extension of the jet to e^{it}

    Primitives are evaluated along the boundary arc from the anchor at t = pi,
    using cached checkpoints.
    """
    scalar = np.ndim(t) == 0
    z = np.exp(1j * np.asarray(t, dtype=float))
    _check_singular(expr, z)
    with np.errstate(divide="ignore", invalid="ignore"):
        jet = expr.apply(Jet2.variable(z))
    return jet.item() if scalar else jet


def values(expr: MapExpr, z: Any) -> Any:
    """f(z) only"""
    return eval_jet(expr, z).f
