"""Hyperbolic and chordal geometry of the unit disc

Hyperbolic midpoint
-------------------
The segment [a, b] is parameterized by t -> phi_a(t * phi_a(b)). Since phi_a is
an isometry and d_H(0, t rho) = artanh(t rho), with rho = |phi_a(b)|, the point
at half the hyperbolic length sits at t* = tanh(artanh(rho) / 2) / rho.
"""

import math
from dataclasses import dataclass
from typing import Any, Optional, Union

import numpy as np

from unidisc.errors import DomainError

# The point at infinity for chordal distances
INFINITY = None

ChordalValue = Optional[complex]


@dataclass(frozen=True)
class Disc:
    """Euclidean disc D(center, radius)"""
    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError(f"Disc radius must be positive, got {self.radius}")

    @property
    def is_horodisc(self) -> bool:
        return abs(abs(self.center) + self.radius - 1) <= 1e-12

    def contains(self, z: Any, closed: bool = False):
        distance = np.abs(np.asarray(z, dtype=complex) - self.center)
        return distance <= self.radius if closed else distance < self.radius

    def boundary_points(self, count: int) -> np.ndarray:
        angles = 2 * np.pi * np.arange(count) / count
        return self.center + self.radius * np.exp(1j * angles)

    def to_dict(self) -> dict:
        center = complex(self.center)
        return {"center": [center.real, center.imag], "radius": self.radius}


@dataclass(frozen=True)
class CarlesonSquare:
    """Q(I) over the arc of length ``arclength`` centred at ``theta_center``"""
    theta_center: float
    arclength: float

    def __post_init__(self):
        if not 0 < self.arclength <= 2 * math.pi:
            raise DomainError(f"Carleson arc length must lie in (0, 2pi], got {self.arclength}")

    @property
    def inner_radius(self) -> float:
        return 1 - self.arclength / (2 * math.pi)

    def arc_contains(self, theta: Any):
        """Half-open arc [center - l/2, center + l/2)"""
        if self.arclength >= 2 * math.pi:
            return np.ones(np.shape(theta), dtype=bool)
        offset = np.mod(np.asarray(theta, dtype=float) - self.theta_center + self.arclength / 2, 2 * math.pi)
        return offset < self.arclength

    def contains(self, z: Any):
        z = np.asarray(z, dtype=complex)
        return (np.abs(z) >= self.inner_radius) & self.arc_contains(np.angle(z))

    def to_dict(self) -> dict:
        return {"theta_center": self.theta_center, "arclength": self.arclength}


def normalize_angle(theta: Any):
    """Angles in (-pi, pi]"""
    wrapped = np.mod(np.asarray(theta, dtype=float) + math.pi, 2 * math.pi) - math.pi
    wrapped = np.where(wrapped == -math.pi, math.pi, wrapped)
    return float(wrapped) if np.ndim(wrapped) == 0 else wrapped


def mobius(a: complex, z: Any):
    """Disc automorphism phi_a(z) = (a - z)/(1 - conj(a) z)"""
    if abs(a) >= 1:
        raise DomainError(f"Automorphism parameter must lie in the disc, got {a}")
    z = np.asarray(z, dtype=complex)
    result = (a - z) / (1 - np.conj(a) * z)
    return complex(result) if result.ndim == 0 else result


def pseudo_hyperbolic_distance(z: Any, w: Any):
    """|phi_z(w)|"""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    result = np.abs(z - w) / np.abs(1 - np.conj(z) * w)
    return float(result) if result.ndim == 0 else result


def hyperbolic_distance(z: Any, w: Any):
    """d_H(z, w) = artanh |phi_z(w)|, vectorized over broadcastable inputs"""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if np.any(np.abs(z) >= 1) or np.any(np.abs(w) >= 1):
        raise DomainError("Hyperbolic distance needs points inside the unit disc")
    rho = np.minimum(pseudo_hyperbolic_distance(z, w), 1.0)
    result = np.arctanh(rho)
    return float(result) if np.ndim(result) == 0 else result


def chordal_distance(z: ChordalValue, w: ChordalValue) -> float:
    """Chordal distance on the Riemann sphere; ``None`` is the point at infinity"""
    if z is INFINITY and w is INFINITY:
        return 0.0
    if z is INFINITY or w is INFINITY:
        finite = complex(w if z is INFINITY else z)
        return 1.0 / math.sqrt(1 + abs(finite) ** 2)
    z, w = complex(z), complex(w)
    return abs(z - w) / (math.sqrt(1 + abs(z) ** 2) * math.sqrt(1 + abs(w) ** 2))


def chordal_distances(z: Any, w: Any) -> np.ndarray:
    """Vectorized chordal distance between finite values"""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return np.abs(z - w) / (np.sqrt(1 + np.abs(z) ** 2) * np.sqrt(1 + np.abs(w) ** 2))


def segment_point(a: complex, b: complex, t: Any):
    """Point of the hyperbolic segment [a, b] at parameter t in [0, 1]"""
    return mobius(a, mobius(a, b) * np.asarray(t, dtype=float))


def hyperbolic_midpoint(z1: complex, z2: complex) -> complex:
    rho = abs(mobius(z1, z2))
    if rho < 1e-12:
        t_star = 0.5
    else:
        t_star = math.tanh(0.5 * math.atanh(rho)) / rho
    return complex(segment_point(z1, z2, t_star))


def pseudohyperbolic_disc(alpha: complex, rho: float) -> Disc:
    """The set {z : |phi_alpha(z)| < rho} as a Euclidean disc"""
    if abs(alpha) >= 1 or not 0 < rho < 1:
        raise DomainError(f"Need |alpha| < 1 and 0 < rho < 1, got alpha={alpha}, rho={rho}")
    scale = 1 - abs(alpha) ** 2 * rho ** 2
    center = (1 - rho ** 2) * alpha / scale
    radius = (1 - abs(alpha) ** 2) * rho / scale
    return Disc(complex(center), float(radius))


def horodisc(theta: float, a: float) -> Disc:
    """D(a e^{i theta}, 1 - a), tangent to the unit circle at e^{i theta}"""
    if not 0 <= a < 1:
        raise DomainError(f"Horodisc parameter must lie in [0, 1), got {a}")
    return Disc(a * complex(math.cos(theta), math.sin(theta)), 1.0 - a)


def horodisc_parameter(C: float) -> float:
    """a(C) = 1 - (1 + C)^-2"""
    return 1.0 - (1.0 + C) ** -2


def carleson_contains(square: CarlesonSquare, z: complex) -> bool:
    if abs(z) >= 1:
        raise DomainError(f"Point {z} is not inside the unit disc")
    return bool(square.contains(z))
