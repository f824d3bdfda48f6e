"""Regions of the disc: membership, evaluation grids, sampling and JSON records"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np
from scipy.stats import qmc

from config.settings import settings
from unidisc.errors import ConfigError, DomainError
from unidisc.geometry.disc import CarlesonSquare, Disc, horodisc

logger = logging.getLogger(__name__)


def ladder_radii(depth: Optional[int] = None, r_cap: Optional[float] = None, sub_rings: int = 0) -> np.ndarray:
    """
    Radii 1 - 2^-k for k = 1..depth, capped at r_cap

    Args:
        depth: Number of dyadic rings (settings.LADDER_DEPTH by default)
        r_cap: Largest radius (settings.R_CAP by default)
        sub_rings: Extra rings inserted geometrically inside every dyadic band

    Returns:
        Increasing radii, starting with 0
    """
    depth = settings.LADDER_DEPTH if depth is None else depth
    r_cap = settings.R_CAP if r_cap is None else r_cap
    exponents = np.arange(1, depth * (sub_rings + 1) + 1, dtype=float) / (sub_rings + 1)
    radii = 1.0 - 2.0 ** -exponents
    radii = np.unique(np.minimum(radii, r_cap))
    return np.concatenate([[0.0], radii])


def ring_size(r: float) -> int:
    """Angles per ring: ceil(2 pi / sqrt(1 - r) * angular factor)"""
    if r == 0:
        return 1
    return int(math.ceil(2 * math.pi / math.sqrt(1 - r) * settings.ANGULAR_FACTOR))


def ring_points(r: float, count: Optional[int] = None, phase: float = 0.0) -> np.ndarray:
    count = ring_size(r) if count is None else count
    if r == 0:
        return np.zeros(1, dtype=complex)
    angles = phase + 2 * np.pi * np.arange(count) / count - np.pi
    return r * np.exp(1j * angles)


def disc_grid(depth: Optional[int] = None, r_cap: Optional[float] = None, sub_rings: int = 0,
              angular_scale: float = 1.0) -> np.ndarray:
    """Layered polar grid of the unit disc, dense toward the boundary"""
    rings = []
    for r in ladder_radii(depth, r_cap, sub_rings):
        count = max(1, int(math.ceil(ring_size(r) * angular_scale))) if r > 0 else 1
        rings.append(ring_points(r, count))
    return np.concatenate(rings)


@dataclass(frozen=True)
class Region:
    """Base region; subclasses define membership and a map from the unit disc"""

    kind = "abstract"

    def contains(self, z: Any):
        raise NotImplementedError

    def from_unit_disc(self, w: np.ndarray) -> np.ndarray:
        """Map points of the unit disc onto the region (grids are transported this way)"""
        raise NotImplementedError

    def grid(self, sub_rings: int = 0, angular_scale: float = 1.0, depth: Optional[int] = None) -> np.ndarray:
        points = self.from_unit_disc(disc_grid(depth, sub_rings=sub_rings, angular_scale=angular_scale))
        inside = points[self.contains(points) & (np.abs(points) < 1)]
        return inside

    def sample(self, count: int, seed: int, method: str = "uniform") -> np.ndarray:
        """
        Area-uniform samples of the region

        Args:
            count: Number of points
            seed: Seed of the generator
            method: "uniform" for a seeded generator, "halton" for a scrambled Halton sequence
        """
        if method == "halton":
            square = qmc.Halton(d=2, scramble=True, seed=seed).random(count)
        else:
            square = np.random.default_rng(seed).random((count, 2))
        w = np.sqrt(square[:, 0]) * np.exp(2j * np.pi * square[:, 1])
        points = self.from_unit_disc(w)
        keep = self.contains(points) & (np.abs(points) < 1)
        return points[keep]

    def to_dict(self) -> Dict[str, Any]:
        raise NotImplementedError


@dataclass(frozen=True)
class DiscRegion(Region):
    """A Euclidean disc inside the unit disc (the unit disc itself by default)"""
    disc: Disc = Disc(0j, 1.0)
    kind = "disc"

    def __post_init__(self):
        if abs(self.disc.center) + self.disc.radius > 1 + 1e-12:
            raise DomainError(f"Disc {self.disc} is not contained in the unit disc")

    def contains(self, z: Any):
        return self.disc.contains(z)

    def from_unit_disc(self, w: np.ndarray) -> np.ndarray:
        return self.disc.center + self.disc.radius * np.asarray(w, dtype=complex)

    def to_dict(self) -> Dict[str, Any]:
        kind = "horodisc" if self.disc.is_horodisc and self.disc.radius < 1 else "disc"
        return {"kind": kind, **self.disc.to_dict()}


@dataclass(frozen=True)
class Annulus(Region):
    """inner <= |z| < outer"""
    inner: float = 0.0
    outer: float = 1.0
    kind = "annulus"

    def __post_init__(self):
        if not 0 <= self.inner < self.outer <= 1:
            raise DomainError(f"Annulus needs 0 <= inner < outer <= 1, got {self.inner}, {self.outer}")

    def contains(self, z: Any):
        modulus = np.abs(np.asarray(z, dtype=complex))
        return (modulus >= self.inner) & (modulus < self.outer)

    def from_unit_disc(self, w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=complex)
        # gap to the outer circle scales linearly so boundary clustering survives
        r = self.outer - (self.outer - self.inner) * (1 - np.abs(w))
        return r * np.exp(1j * np.angle(w))

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "inner": self.inner, "outer": self.outer}


@dataclass(frozen=True)
class CarlesonRegion(Region):
    square: CarlesonSquare = CarlesonSquare(0.0, 2 * math.pi)
    kind = "carleson"

    def contains(self, z: Any):
        return self.square.contains(z)

    def from_unit_disc(self, w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=complex)
        inner = self.square.inner_radius
        r = 1 - (1 - inner) * (1 - np.abs(w))
        theta = self.square.theta_center + (np.angle(w) / (2 * np.pi)) * self.square.arclength
        return r * np.exp(1j * theta)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, **self.square.to_dict()}


@dataclass(frozen=True)
class HalfDisc(Region):
    """Points of the disc with Re(z e^{-i theta}) > offset"""
    theta: float = 0.0
    offset: float = 0.0
    kind = "half_disc"

    def contains(self, z: Any):
        z = np.asarray(z, dtype=complex)
        return (np.real(z * np.exp(-1j * self.theta)) > self.offset) & (np.abs(z) < 1)

    def from_unit_disc(self, w: np.ndarray) -> np.ndarray:
        return np.asarray(w, dtype=complex)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "theta": self.theta, "offset": self.offset}


UNIT_DISC = DiscRegion()


def region_from_dict(record: Optional[Dict[str, Any]]) -> Region:
    """Decode a region record; a missing record means the whole disc"""
    from unidisc.analytic.codec import decode_complex

    if record is None:
        return UNIT_DISC
    if not isinstance(record, dict) or "kind" not in record:
        raise ConfigError(f"Region must be an object with a 'kind', got {record!r}", field="region")
    kind = record["kind"]
    try:
        if kind == "disc":
            return DiscRegion(Disc(decode_complex(record.get("center", [0, 0]), "center"), float(record.get("radius", 1.0))))
        if kind == "horodisc":
            if "a" in record:
                return DiscRegion(horodisc(float(record.get("theta", 0.0)), float(record["a"])))
            return DiscRegion(Disc(decode_complex(record["center"], "center"), float(record["radius"])))
        if kind == "annulus":
            return Annulus(float(record.get("inner", 0.0)), float(record.get("outer", 1.0)))
        if kind == "carleson":
            return CarlesonRegion(CarlesonSquare(float(record["theta_center"]), float(record["arclength"])))
        if kind == "half_disc":
            return HalfDisc(float(record.get("theta", 0.0)), float(record.get("offset", 0.0)))
    except (KeyError, TypeError, ValueError, DomainError) as e:
        raise ConfigError(f"Invalid {kind} region: {e}", field="region")
    raise ConfigError(f"Unknown region kind '{kind}'", field="region")
