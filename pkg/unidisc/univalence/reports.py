"""Report records for criterion verdicts and collision searches"""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional


def _pair(value: Optional[complex]):
    if value is None:
        return None
    value = complex(value)
    return [value.real, value.imag]


@dataclass
class CriterionReport:
    """Verdict of a criterion over a region, with the point of smallest margin"""
    criterion: str
    region: Dict[str, Any]
    holds: bool
    worst_point: Optional[complex]
    worst_margin: float
    samples_evaluated: int
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "criterion": self.criterion,
            "region": self.region,
            "holds": self.holds,
            "worst_point": _pair(self.worst_point),
            "worst_margin": self.worst_margin,
            "samples_evaluated": self.samples_evaluated,
            "details": self.details,
        }


@dataclass
class CollisionReport:
    """Outcome of a sampled injectivity search"""
    found: bool
    z1: Optional[complex]
    z2: Optional[complex]
    image_gap: Optional[float]
    pairs_tested: int
    seed: int

    @property
    def message(self) -> str:
        if not self.found:
            return "no collision found"
        return f"collision between {self.z1:.6g} and {self.z2:.6g} (image gap {self.image_gap:.3g})"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "found": self.found,
            "z1": _pair(self.z1),
            "z2": _pair(self.z2),
            "image_gap": self.image_gap,
            "pairs_tested": self.pairs_tested,
            "seed": self.seed,
            "message": self.message,
        }
