"""
Circular arenas of the light-seeking experiments.

The origin (0, 0) is the left-most corner of the square bounding the outer
circle. Agents move inside that square; the outer circle itself only marks
the workspace. A source counts as detected when an agent enters the inner
circle of capture_radius around it.
"""
import math
from dataclasses import dataclass

import numpy as np

from landscapes.domain import Domain
from landscapes.exceptions import InvalidDomainError

ORIGIN_LOWER_LEFT = "lower_left"


@dataclass(frozen=True)
class Arena:
    outer_radius: float
    capture_radius: float
    origin: str = ORIGIN_LOWER_LEFT

    def __post_init__(self):
        if not (math.isfinite(self.outer_radius) and math.isfinite(self.capture_radius)):
            raise InvalidDomainError("arena radii must be finite")
        if not 0 < self.capture_radius < self.outer_radius:
            raise InvalidDomainError(
                f"need 0 < capture_radius < outer_radius, got {self.capture_radius} and {self.outer_radius}"
            )
        if self.origin != ORIGIN_LOWER_LEFT:
            raise InvalidDomainError(f"unsupported arena origin {self.origin!r}")

    @property
    def center(self) -> np.ndarray:
        return np.array([self.outer_radius, self.outer_radius])

    def domain(self) -> Domain:
        side = 2.0 * self.outer_radius
        return Domain.box([(0.0, side), (0.0, side)])

    def to_dict(self) -> dict:
        return {"outer_radius": self.outer_radius, "capture_radius": self.capture_radius, "origin": self.origin}

    @classmethod
    def from_dict(cls, data: dict) -> "Arena":
        return cls(**data)
