"""
Search domains: axis-aligned boxes and sphere surfaces.

A Domain knows how to test membership, clip a moved position back onto
itself, measure distances and draw uniform samples.
"""
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist

from .exceptions import InvalidDomainError

BOX = "box"
SPHERE = "sphere_surface"

# Sphere points this close to the surface (relative) are left untouched by clip().
_SURFACE_RTOL = 1e-12


@dataclass(frozen=True)
class Domain:
    kind: str
    bounds: tuple[tuple[float, float], ...] = ()
    radius: Optional[float] = None

    def __post_init__(self):
        if self.kind == BOX:
            if not self.bounds:
                raise InvalidDomainError("box domain needs at least one axis")
            object.__setattr__(
                self, "bounds", tuple((float(lo), float(hi)) for lo, hi in self.bounds)
            )
            for axis, (lo, hi) in enumerate(self.bounds):
                if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
                    raise InvalidDomainError(f"axis {axis}: need finite lo < hi, got [{lo}, {hi}]")
        elif self.kind == SPHERE:
            if self.radius is None or not math.isfinite(self.radius) or self.radius <= 0:
                raise InvalidDomainError(f"sphere radius must be positive, got {self.radius!r}")
            object.__setattr__(self, "radius", float(self.radius))
        else:
            raise InvalidDomainError(f"unknown domain kind {self.kind!r}")

    @classmethod
    def box(cls, bounds) -> "Domain":
        return cls(kind=BOX, bounds=tuple(tuple(axis) for axis in bounds))

    @classmethod
    def sphere(cls, radius: float) -> "Domain":
        return cls(kind=SPHERE, radius=radius)

    @property
    def is_box(self) -> bool:
        return self.kind == BOX

    @property
    def dim(self) -> int:
        return len(self.bounds) if self.is_box else 3

    @property
    def lower(self) -> np.ndarray:
        return np.array([lo for lo, _ in self.bounds])

    @property
    def upper(self) -> np.ndarray:
        return np.array([hi for _, hi in self.bounds])

    @property
    def width(self) -> float:
        """Largest extent along any axis (the sphere's diameter)."""
        if self.is_box:
            return float(np.max(self.upper - self.lower))
        return 2.0 * self.radius

    def contains_many(self, points: np.ndarray, tol: float = 0.0) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[-1] != self.dim:
            return np.zeros(points.shape[0], dtype=bool)
        finite = np.all(np.isfinite(points), axis=1)
        if self.is_box:
            inside = np.all((points >= self.lower - tol) & (points <= self.upper + tol), axis=1)
        else:
            inside = np.abs(np.linalg.norm(points, axis=1) - self.radius) <= tol
        return finite & inside

    def contains(self, x, tol: float = 0.0) -> bool:
        return bool(self.contains_many(np.asarray(x, dtype=float)[None, :], tol)[0])

    def clip(self, x: np.ndarray) -> np.ndarray:
        """Clamp component-wise into the box, or renormalise radially onto the sphere."""
        x = np.asarray(x, dtype=float)
        if self.is_box:
            return np.clip(x, self.lower, self.upper)
        norms = np.linalg.norm(x, axis=-1, keepdims=True)
        if x.ndim == 1:
            norm = float(norms[0])
            if norm == 0.0:
                return np.array([0.0, 0.0, self.radius])
            if abs(norm - self.radius) <= _SURFACE_RTOL * self.radius:
                return x.copy()
            return x * (self.radius / norm)
        safe = np.where(norms == 0.0, 1.0, norms)
        projected = x * (self.radius / safe)
        projected[norms[:, 0] == 0.0] = (0.0, 0.0, self.radius)
        return projected

    def limit_step(self, origin: np.ndarray, target: np.ndarray, max_length: float) -> np.ndarray:
        """
        Keep a clipped move within max_length of origin.

        Box clipping never lengthens a move. On the sphere, radial
        renormalisation can, so the target is pulled back along the great
        circle until the chord to origin is exactly max_length.
        """
        if self.is_box:
            return target
        chord = float(np.linalg.norm(target - origin))
        if chord <= max_length:
            return target
        r = self.radius
        u = origin / r
        v = target / r
        omega = math.acos(min(1.0, max(-1.0, float(np.dot(u, v)))))
        theta = 2.0 * math.asin(min(1.0, max_length / (2.0 * r)))
        if omega == 0.0:
            return target
        sin_omega = math.sin(omega)
        w = (math.sin(omega - theta) * u + math.sin(theta) * v) / sin_omega
        return r * w / np.linalg.norm(w)

    def distances(self, points: np.ndarray, targets: np.ndarray) -> np.ndarray:
        """Pairwise distances, euclidean on boxes and great-circle arc length on the sphere."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        targets = np.atleast_2d(np.asarray(targets, dtype=float))
        if self.is_box:
            return cdist(points, targets)
        cosines = 1.0 - cdist(points, targets, "cosine")
        return self.radius * np.arccos(np.clip(cosines, -1.0, 1.0))

    def distance(self, a, b) -> float:
        return float(self.distances(a, b)[0, 0])

    def sample_uniform(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.is_box:
            return rng.uniform(self.lower, self.upper, size=(n, self.dim))
        normals = rng.standard_normal(size=(n, 3))
        return self.clip(normals)

    def quadrant(self, index: int) -> tuple[np.ndarray, np.ndarray]:
        """
        Bounds of quadrant index (mod 4) of a 2-D box.

        0 is lower-left, 1 lower-right, 2 upper-left, 3 upper-right.
        """
        if not self.is_box or self.dim != 2:
            raise InvalidDomainError("quadrants are only defined on 2-D boxes")
        mid = (self.lower + self.upper) / 2.0
        q = index % 4
        lo = np.where([q % 2 == 1, q >= 2], mid, self.lower)
        hi = np.where([q % 2 == 1, q >= 2], self.upper, mid)
        return lo, hi

    def to_dict(self) -> dict:
        if self.is_box:
            return {"kind": BOX, "bounds": [list(axis) for axis in self.bounds]}
        return {"kind": SPHERE, "radius": self.radius}
