"""
Run parameters for the butterfly mating optimizer.

BmoParams holds the UV constants, the step size and the swarm budget.
PlacementPolicy says how the initial swarm is laid out on the domain.
"""
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

from .exceptions import InvalidParamsError

DEFAULT_D_MIN = 1e-6

MOVEMENT_CHOICES = ("clamped", "fixed")
PLACEMENT_CHOICES = ("uniform_random", "quadrant_random", "explicit")


@dataclass(frozen=True)
class BmoParams:
    """
    Constants of one BMO run.

    b1 weighs the previous UV, b2 the current fitness (UV update).
    step_size is the per-iteration displacement toward the l-mate and
    d_min floors pairwise distances in the UV distribution.
    jitter (default 0) lets self-mated agents take a random step of that
    length; movement="fixed" reproduces the literal fixed-length step that
    may overshoot the l-mate.
    """
    b1: float = 0.5
    b2: float = 2.0
    step_size: float = 1.0
    n_agents: int = 4
    max_iters: int = 100
    d_min: float = DEFAULT_D_MIN
    rng_seed: int = 0
    jitter: float = 0.0
    movement: str = "clamped"

    def __post_init__(self):
        errors = self.validation_errors()
        if errors:
            raise InvalidParamsError("; ".join(errors))

    def validation_errors(self) -> list[str]:
        """Return every violated invariant as a message (empty when valid)."""
        errors = []
        for name in ("b1", "b2", "step_size", "d_min", "jitter"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                errors.append(f"{name} must be a finite number, got {value!r}")
        if errors:
            return errors

        if not 0.0 <= self.b1 <= 1.0:
            errors.append(f"b1 must lie in [0, 1], got {self.b1}")
        if not self.b2 > 1.0:
            errors.append(f"b2 must be greater than 1, got {self.b2}")
        if not self.step_size > 0:
            errors.append(f"step_size must be positive, got {self.step_size}")
        if not self.d_min > 0:
            errors.append(f"d_min must be positive, got {self.d_min}")
        if not isinstance(self.n_agents, int) or self.n_agents < 1:
            errors.append(f"n_agents must be an integer >= 1, got {self.n_agents!r}")
        if not isinstance(self.max_iters, int) or self.max_iters < 1:
            errors.append(f"max_iters must be an integer >= 1, got {self.max_iters!r}")
        if not isinstance(self.rng_seed, int) or not 0 <= self.rng_seed < 2**64:
            errors.append(f"rng_seed must be a 64-bit unsigned integer, got {self.rng_seed!r}")
        if self.jitter < 0 or self.jitter > self.step_size:
            errors.append(f"jitter must lie in [0, step_size], got {self.jitter}")
        if self.movement not in MOVEMENT_CHOICES:
            errors.append(f"movement must be one of {MOVEMENT_CHOICES}, got {self.movement!r}")
        return errors

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "BmoParams":
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise InvalidParamsError(f"Unknown parameter(s): {', '.join(sorted(unknown))}")
        return cls(**data)


@dataclass(frozen=True)
class PlacementPolicy:
    """Initial layout of the swarm: uniform, one-per-quadrant round-robin, or explicit."""
    kind: str = "uniform_random"
    positions: Optional[tuple[tuple[float, ...], ...]] = field(default=None)

    def __post_init__(self):
        if self.kind not in PLACEMENT_CHOICES:
            raise InvalidParamsError(
                f"placement must be one of {PLACEMENT_CHOICES}, got {self.kind!r}"
            )
        if self.kind == "explicit":
            if not self.positions:
                raise InvalidParamsError("explicit placement needs a non-empty positions list")
            object.__setattr__(
                self, "positions", tuple(tuple(float(c) for c in p) for p in self.positions)
            )
            dims = {len(p) for p in self.positions}
            if len(dims) != 1:
                raise InvalidParamsError("explicit positions must all have the same dimension")
        elif self.positions is not None:
            raise InvalidParamsError(f"positions are only allowed for explicit placement, not {self.kind}")

    @classmethod
    def clustered(cls, center, n: int, spacing: float) -> "PlacementPolicy":
        """
        Explicit layout of n agents on a square grid of the given spacing,
        centred on center (2-D), filled row by row.
        """
        if not isinstance(n, int) or n < 1:
            raise InvalidParamsError(f"a cluster needs at least one agent, got {n!r}")
        if not (math.isfinite(spacing) and spacing > 0):
            raise InvalidParamsError(f"cluster spacing must be positive, got {spacing}")
        if len(center) != 2:
            raise InvalidParamsError(f"cluster center must be 2-D, got {list(center)}")
        cx, cy = (float(c) for c in center)
        side = math.ceil(math.sqrt(n))
        offset = (side - 1) / 2.0
        positions = [
            (cx + (k % side - offset) * spacing, cy + (k // side - offset) * spacing)
            for k in range(n)
        ]
        return cls(kind="explicit", positions=tuple(positions))

    def to_dict(self) -> dict:
        data = {"kind": self.kind}
        if self.positions is not None:
            data["positions"] = [list(p) for p in self.positions]
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "PlacementPolicy":
        return cls(kind=data.get("kind", "uniform_random"), positions=data.get("positions"))
