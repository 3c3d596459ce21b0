"""
Fitness fields behind one evaluation interface.

Every landscape exposes evaluate(x, t) / evaluate_many(points, t): the raw
field value plus a documented affine shift that keeps exposed fitness
nonnegative over the domain. Landscapes are immutable once built; the
movable ones (Gaussian peaks, light sources) return a new landscape from
with_trajectories().
"""
import copy
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Mapping, Optional, Protocol

import numpy as np
from scipy import ndimage
from scipy.spatial.distance import cdist

from bmo.params import DEFAULT_D_MIN

from .domain import Domain
from .exceptions import InvalidDomainError, OutOfDomainError

logger = logging.getLogger("bflyflow")


class Trajectory(Protocol):
    def position(self, t: int) -> np.ndarray: ...


class Landscape(ABC):
    """Time-indexed fitness field over a domain."""

    kind = "abstract"

    def __init__(self, domain: Domain, affine_shift: float = 0.0,
                 peaks: Optional[np.ndarray] = None, tolerance: float = DEFAULT_D_MIN):
        self.domain = domain
        self.affine_shift = float(affine_shift)
        self.tolerance = tolerance
        self._peaks = None if peaks is None else np.atleast_2d(np.asarray(peaks, dtype=float))

    @abstractmethod
    def raw_many(self, points: np.ndarray, t: int) -> np.ndarray:
        """Unshifted field values at in-domain points (n x d array)."""

    @property
    def peaks(self) -> Optional[np.ndarray]:
        """Known local maxima at t=0 (ground truth), or None."""
        return self._peaks

    @property
    def is_dynamic(self) -> bool:
        return False

    def peaks_at(self, t: int) -> Optional[np.ndarray]:
        return self.peaks

    def evaluate_many(self, points, t: int = 0) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        inside = self.domain.contains_many(points, tol=self.tolerance)
        if not np.all(inside):
            bad = int(np.flatnonzero(~inside)[0])
            raise OutOfDomainError(
                f"{self.kind}: position {points[bad].tolist()} lies outside the domain"
            )
        return self.raw_many(self.domain.clip(points), t) + self.affine_shift

    def evaluate(self, x, t: int = 0) -> float:
        """Shifted fitness at one position and time index."""
        return float(self.evaluate_many(np.asarray(x, dtype=float)[None, :], t)[0])

    def describe(self) -> dict:
        return {"kind": self.kind, "domain": self.domain.to_dict(), "affine_shift": self.affine_shift}


class MovableCentersLandscape(Landscape):
    """A landscape whose features sit at centers that trajectories can move."""

    def __init__(self, domain: Domain, centers, **kwargs):
        self.centers = np.atleast_2d(np.asarray(centers, dtype=float))
        self.trajectories: dict[int, Trajectory] = {}
        super().__init__(domain, peaks=self.centers, **kwargs)

    @property
    def is_dynamic(self) -> bool:
        return bool(self.trajectories)

    def centers_at(self, t: int) -> np.ndarray:
        if not self.trajectories:
            return self.centers
        moved = self.centers.copy()
        for index, trajectory in self.trajectories.items():
            moved[index] = trajectory.position(t)
        return moved

    def peaks_at(self, t: int) -> np.ndarray:
        return self.centers_at(t)

    def with_trajectories(self, trajectories: Mapping[int, Trajectory]) -> "MovableCentersLandscape":
        bound = copy.copy(self)
        bound.trajectories = {**self.trajectories, **trajectories}
        return bound


class GaussianPeaksField(MovableCentersLandscape):
    """Sum of isotropic Gaussian bumps: height * exp(-|x - c|^2 / (2 sigma^2))."""

    kind = "gaussian_peaks"

    def __init__(self, domain: Domain, centers, heights, sigmas, **kwargs):
        super().__init__(domain, centers, **kwargs)
        self.heights = np.asarray(heights, dtype=float)
        self.sigmas = np.asarray(sigmas, dtype=float)
        if not (len(self.heights) == len(self.sigmas) == len(self.centers)):
            raise InvalidDomainError("centers, heights and sigmas must have equal length")

    def raw_many(self, points: np.ndarray, t: int) -> np.ndarray:
        squared = cdist(points, self.centers_at(t), "sqeuclidean")
        return np.sum(self.heights * np.exp(-squared / (2.0 * self.sigmas ** 2)), axis=1)


@dataclass(frozen=True)
class LightSource:
    center: tuple[float, float]
    power: float = 14.0
    height: float = 50.0
    color_tag: str = "white"

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if self.power <= 0 or self.height <= 0:
            raise InvalidDomainError(
                f"light source needs positive power and height, got {self.power} W / {self.height} cm"
            )

    def to_dict(self) -> dict:
        return {"center": list(self.center), "power": self.power,
                "height": self.height, "color_tag": self.color_tag}


class LightField(MovableCentersLandscape):
    """
    Hung lamps over a 2-D arena.

    Intensity at ground point x is sum_s power_s / (4 pi (|x - c_s|^2 + height_s^2)):
    strictly positive everywhere and strictly decreasing with ground distance
    from each source.
    """

    kind = "light"

    def __init__(self, domain: Domain, sources: list[LightSource], **kwargs):
        if not sources:
            raise InvalidDomainError("a light field needs at least one source")
        self.sources = list(sources)
        super().__init__(domain, [s.center for s in self.sources], **kwargs)
        self.powers = np.array([s.power for s in self.sources])
        self.heights = np.array([s.height for s in self.sources])

    def raw_many(self, points: np.ndarray, t: int) -> np.ndarray:
        squared = cdist(points, self.centers_at(t), "sqeuclidean")
        return np.sum(self.powers / (4.0 * np.pi * (squared + self.heights ** 2)), axis=1)


class ImageField(Landscape):
    """
    Grayscale image as a fitness surface.

    Pixels are normalised to [0, 1] (min -> 0, max -> 1; a constant image maps
    to all zeros) and raised to gamma to sharpen bright regions. Position
    (x, y) is (column, row); values between pixel centers are bilinear.
    """

    kind = "image"

    def __init__(self, pixels: np.ndarray, gamma: float = 2.0, source: str = "", **kwargs):
        pixels = np.asarray(pixels, dtype=float)
        if pixels.ndim != 2 or min(pixels.shape) < 2:
            raise InvalidDomainError(f"image must be 2-D with at least 2x2 pixels, got shape {pixels.shape}")
        if not gamma > 1:
            raise InvalidDomainError(f"gamma must be greater than 1, got {gamma}")
        height, width = pixels.shape
        lo, hi = float(pixels.min()), float(pixels.max())
        if hi > lo:
            normalised = (pixels - lo) / (hi - lo)
        else:
            logger.warning(f"Image {source or '<array>'} is constant; fitness is zero everywhere")
            normalised = np.zeros_like(pixels)
        self.gamma = float(gamma)
        self.source = source
        self.values = normalised ** self.gamma
        domain = Domain.box([(0.0, width - 1.0), (0.0, height - 1.0)])
        brightest = np.unravel_index(np.argmax(self.values), self.values.shape)
        super().__init__(domain, peaks=[[float(brightest[1]), float(brightest[0])]], **kwargs)

    def raw_many(self, points: np.ndarray, t: int) -> np.ndarray:
        coordinates = np.vstack([points[:, 1], points[:, 0]])
        return ndimage.map_coordinates(self.values, coordinates, order=1, mode="nearest")


class SphereField(Landscape):
    """Height on a sphere surface: fitness z + r, so the south pole is 0 and the north pole 2r."""

    kind = "sphere"

    def __init__(self, radius: float, **kwargs):
        domain = Domain.sphere(radius)
        super().__init__(domain, affine_shift=domain.radius,
                         peaks=[[0.0, 0.0, domain.radius]], **kwargs)
        self.radius = domain.radius

    def raw_many(self, points: np.ndarray, t: int) -> np.ndarray:
        return np.clip(points[:, 2], -self.radius, self.radius)


def make_light_field(sources, domain: Domain) -> LightField:
    """Light field over an arena domain; sources are LightSource objects or their dicts."""
    built = [s if isinstance(s, LightSource) else LightSource(**s) for s in sources]
    for source in built:
        if not domain.contains(source.center):
            raise InvalidDomainError(f"light source at {list(source.center)} lies outside the arena")
    return LightField(domain, built)
