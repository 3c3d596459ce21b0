"""
Source and peak trajectories.

A trajectory maps an iteration index t >= 0 to a 2-D ground position. All
of them are pure functions of t. Whenever the motion repeats after a whole
number of iterations, position() reduces t modulo that period first, so
p(t + period) == p(t) holds exactly and not just to round-off.
"""
import logging
import math
from dataclasses import dataclass, fields, replace
from typing import ClassVar, Optional

import numpy as np

from .exceptions import TrajectoryError

logger = logging.getLogger("bflyflow")

# A float period closer than this to an integer is treated as that integer.
_PERIOD_TOL = 1e-9


def _point(value, name: str) -> Optional[tuple[float, float]]:
    if value is None:
        return None
    point = tuple(float(c) for c in value)
    if len(point) != 2 or not all(math.isfinite(c) for c in point):
        raise TrajectoryError(f"{name} must be a finite 2-D position, got {value!r}")
    return point


def _integral_period(period: float) -> Optional[int]:
    if not math.isfinite(period):
        return None
    rounded = round(period)
    if rounded >= 1 and abs(period - rounded) <= _PERIOD_TOL * max(1.0, period):
        return int(rounded)
    return None


@dataclass(frozen=True)
class Trajectory:
    """Base class; subclasses register themselves under their kind tag."""

    kind: ClassVar[str] = "abstract"
    registry: ClassVar[dict[str, type["Trajectory"]]] = {}
    # config keys that differ from field names
    aliases: ClassVar[dict[str, str]] = {}

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        Trajectory.registry[cls.kind] = cls

    def position(self, t: int) -> np.ndarray:
        raise NotImplementedError

    def period(self) -> Optional[int]:
        """Whole number of iterations after which the motion repeats, or None."""
        return None

    def anchored(self, center) -> "Trajectory":
        """Fill in a missing start position with center (the bound peak or source)."""
        return self

    def to_dict(self) -> dict:
        data = {"kind": self.kind}
        for f in fields(self):
            value = getattr(self, f.name)
            data[f.name] = list(value) if isinstance(value, tuple) else value
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "Trajectory":
        data = dict(data)
        kind = data.pop("kind", None)
        if kind not in cls.registry:
            raise TrajectoryError(
                f"unknown trajectory kind {kind!r}; expected one of {sorted(cls.registry)}"
            )
        target = cls.registry[kind]
        for alias, name in target.aliases.items():
            if alias in data:
                data[name] = data.pop(alias)
        allowed = {f.name for f in fields(target)}
        unknown = set(data) - allowed
        if unknown:
            raise TrajectoryError(f"{kind} trajectory got unknown field(s): {', '.join(sorted(unknown))}")
        try:
            return target(**data)
        except TypeError as e:
            raise TrajectoryError(f"{kind} trajectory: {e}")


@dataclass(frozen=True)
class StaticTrajectory(Trajectory):
    kind: ClassVar[str] = "static"
    start: Optional[tuple[float, float]] = None

    def __post_init__(self):
        object.__setattr__(self, "start", _point(self.start, "start"))

    def _start(self) -> np.ndarray:
        if self.start is None:
            raise TrajectoryError(f"{self.kind} trajectory has no start position")
        return np.array(self.start)

    def position(self, t: int) -> np.ndarray:
        return self._start()

    def anchored(self, center) -> "Trajectory":
        if self.start is None:
            return replace(self, start=tuple(center))
        return self


@dataclass(frozen=True)
class HorizontalShift(StaticTrajectory):
    """Uniform translation along x by k length units per iteration."""

    kind: ClassVar[str] = "horizontal_shift"
    k: float = 0.0

    def position(self, t: int) -> np.ndarray:
        return self._start() + np.array([self.k * t, 0.0])


@dataclass(frozen=True)
class LinearPingPong(Trajectory):
    """Back and forth between a and b at speed length units per iteration, starting at a."""

    kind: ClassVar[str] = "linear_pingpong"
    a: tuple[float, float] = (0.0, 0.0)
    b: tuple[float, float] = (0.0, 0.0)
    speed: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "a", _point(self.a, "a"))
        object.__setattr__(self, "b", _point(self.b, "b"))
        if not (math.isfinite(self.speed) and self.speed >= 0):
            raise TrajectoryError(f"speed must be >= 0, got {self.speed}")

    @property
    def length(self) -> float:
        return math.dist(self.a, self.b)

    def period(self) -> Optional[int]:
        if self.speed == 0 or self.length == 0:
            return None
        return _integral_period(2.0 * self.length / self.speed)

    def _weight(self, t: int) -> float:
        length = self.length
        if self.speed == 0 or length == 0:
            return 0.0
        period = self.period()
        if period is not None:
            # on an integer grid the vertex t = period / 2 lands on b exactly
            phase = t % period
            half = period / 2.0
            w = phase / half if phase <= half else (period - phase) / half
        else:
            travelled = math.fmod(t * self.speed, 2.0 * length)
            w = travelled / length if travelled <= length else 2.0 - travelled / length
        return min(1.0, max(0.0, w))

    def position(self, t: int) -> np.ndarray:
        w = self._weight(t)
        return (1.0 - w) * np.array(self.a) + w * np.array(self.b)


@dataclass(frozen=True)
class Circular(Trajectory):
    """
    Circle of radius around center, starting at angle phase (radians).

    The angle advances 2 pi rpm / iter_per_minute per iteration, so one
    revolution spans iter_per_minute / rpm iterations.
    """

    kind: ClassVar[str] = "circular"
    center: tuple[float, float] = (0.0, 0.0)
    radius: float = 1.0
    rpm: float = 1.0
    iter_per_minute: float = 60.0
    phase: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "center", _point(self.center, "center"))
        if not self.radius > 0:
            raise TrajectoryError(f"circle radius must be positive, got {self.radius}")
        if not self.rpm >= 0:
            raise TrajectoryError(f"rpm must be >= 0, got {self.rpm}")
        if not self.iter_per_minute > 0:
            raise TrajectoryError(f"iter_per_minute must be positive, got {self.iter_per_minute}")

    @property
    def angular_step(self) -> float:
        return 2.0 * math.pi * self.rpm / self.iter_per_minute

    def period(self) -> Optional[int]:
        if self.rpm == 0:
            return None
        return _integral_period(self.iter_per_minute / self.rpm)

    def position(self, t: int) -> np.ndarray:
        period = self.period()
        if period is not None:
            t = t % period
        theta = self.phase + self.angular_step * t
        return np.array(self.center) + self.radius * np.array([math.cos(theta), math.sin(theta)])


@dataclass(frozen=True)
class UpDown(Trajectory):
    """Vertical triangle-wave oscillation of amplitude around anchor, starting upward."""

    kind: ClassVar[str] = "updown"
    aliases: ClassVar[dict[str, str]] = {"period": "period_iters"}
    anchor: Optional[tuple[float, float]] = None
    amplitude: float = 0.0
    period_iters: int = 2

    def __post_init__(self):
        object.__setattr__(self, "anchor", _point(self.anchor, "anchor"))
        if isinstance(self.period_iters, bool) or not isinstance(self.period_iters, int) or self.period_iters < 2:
            raise TrajectoryError(f"up-down period must be an integer >= 2, got {self.period_iters!r}")
        if not (math.isfinite(self.amplitude) and self.amplitude >= 0):
            raise TrajectoryError(f"amplitude must be >= 0, got {self.amplitude}")

    def period(self) -> Optional[int]:
        return self.period_iters

    def anchored(self, center) -> "Trajectory":
        if self.anchor is None:
            return replace(self, anchor=tuple(center))
        return self

    @staticmethod
    def triangle(fraction: float) -> float:
        """Unit triangle wave: 0 -> 1 -> 0 -> -1 -> 0 over one period."""
        if fraction < 0.25:
            return 4.0 * fraction
        if fraction < 0.75:
            return 2.0 - 4.0 * fraction
        return 4.0 * fraction - 4.0

    def position(self, t: int) -> np.ndarray:
        if self.anchor is None:
            raise TrajectoryError("updown trajectory has no anchor")
        fraction = (t % self.period_iters) / self.period_iters
        return np.array(self.anchor) + np.array([0.0, self.amplitude * self.triangle(fraction)])


def source_position(trajectory: Trajectory, t: int) -> np.ndarray:
    """Position of a moving source at iteration t >= 0."""
    if t < 0:
        raise TrajectoryError(f"iteration index must be >= 0, got {t}")
    return trajectory.position(t)


def trajectory_period(trajectory: Trajectory) -> Optional[int]:
    return trajectory.period()


def validate_trajectory(trajectory: Trajectory, domain, max_iters: int) -> None:
    """
    Check the trajectory stays inside domain for every t in [0, max_iters].

    Raises:
        TrajectoryError: first iteration at which the position leaves the domain
    """
    period = trajectory.period()
    horizon = max_iters if period is None else min(max_iters, period - 1)
    points = np.array([trajectory.position(t) for t in range(horizon + 1)])
    outside = np.flatnonzero(~domain.contains_many(points, tol=1e-9))
    if outside.size:
        t = int(outside[0])
        raise TrajectoryError(
            f"{trajectory.kind} trajectory leaves the domain at t={t} "
            f"(position {points[t].tolist()})"
        )
    logger.debug(f"{trajectory.kind} trajectory valid over {max_iters} iterations")
