"""
Scenario configuration: one JSON document per experiment.

    {
      "name": "dual_source",
      "description": "...",
      "landscape": {"kind": "light", "params": {"sources": [...]}},
      "bindings": [{"index": 0, "trajectory": {"kind": "linear_pingpong", ...}}],
      "params": {"b1": 0.5, "b2": 2.0, "step_size": 10, "n_agents": 4, "max_iters": 300, ...},
      "arena": {"outer_radius": 115, "capture_radius": 25},
      "capture_radius": null,
      "placement": {"kind": "quadrant_random"},
      "seeds": [1, 2, 3],
      "dwell": 3,
      "output": {"trace": "trace.csv", "summary": "summary.json"}
    }

Light fields need an arena (it defines the domain); every other landscape
brings its own domain and takes capture_radius directly. Relative file
paths (images, constants) resolve against the config file's directory.
Errors name the JSON path of the offending field.
"""
import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional

from bmo.exceptions import BmoError
from bmo.params import BmoParams, PlacementPolicy
from landscapes.benchmarks import make_rastrigin, make_schwefel, make_sphere_field, make_three_peaks
from landscapes.domain import Domain
from landscapes.fields import GaussianPeaksField, Landscape, make_light_field
from landscapes.imaging import load_image_field
from scenarios.binding import bind
from scenarios.trajectories import Trajectory
from simulation.arena import Arena

from .exceptions import ScenarioConfigError

logger = logging.getLogger("bflyflow")

DEFAULT_DWELL = 3
TOP_LEVEL_KEYS = {
    "name", "description", "landscape", "bindings", "params", "arena",
    "capture_radius", "placement", "seeds", "dwell", "output",
}


@dataclass(frozen=True)
class LandscapeSpec:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        # normalise to plain JSON types so configs compare equal after a round trip
        object.__setattr__(self, "params", json.loads(json.dumps(self.params)))


@dataclass(frozen=True)
class Binding:
    index: int
    trajectory: Trajectory

    def to_dict(self) -> dict:
        return {"index": self.index, "trajectory": self.trajectory.to_dict()}


@dataclass(frozen=True)
class OutputSpec:
    trace: str = "trace.csv"
    summary: str = "summary.json"


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    landscape: LandscapeSpec
    params: BmoParams
    seeds: tuple[int, ...]
    description: str = ""
    bindings: tuple[Binding, ...] = ()
    arena: Optional[Arena] = None
    capture_radius: Optional[float] = None
    placement: PlacementPolicy = field(default_factory=PlacementPolicy)
    dwell: int = DEFAULT_DWELL
    output: OutputSpec = field(default_factory=OutputSpec)
    base_dir: Path = field(default=Path("."), compare=False)

    @property
    def effective_capture_radius(self) -> float:
        return self.arena.capture_radius if self.arena is not None else self.capture_radius

    def with_seed(self, seed: int) -> "ScenarioConfig":
        """The same scenario pinned to one seed (params.rng_seed and seeds)."""
        return replace(self, params=replace(self.params, rng_seed=seed), seeds=(seed,))

    def resolve_path(self, value: str) -> Path:
        path = Path(value)
        return path if path.is_absolute() else self.base_dir / path

    def build_landscape(self) -> Landscape:
        """Build the landscape and attach trajectories, checking them over max_iters."""
        builder = LANDSCAPE_BUILDERS.get(self.landscape.kind)
        if builder is None:
            raise ScenarioConfigError(
                f"unknown landscape kind {self.landscape.kind!r}; expected one of {sorted(LANDSCAPE_BUILDERS)}",
                field="landscape.kind",
            )
        landscape = _wrap(lambda: builder(self), "landscape.params")
        if self.bindings:
            landscape = _wrap(
                lambda: bind(landscape, [(b.index, b.trajectory) for b in self.bindings],
                             max_iters=self.params.max_iters),
                "bindings",
            )
        return landscape

    def validate(self) -> Landscape:
        """
        Check everything that can be checked without running and return the
        ready-to-run landscape.

        Raises:
            ScenarioConfigError: any problem, with the JSON path of the field
        """
        landscape = self.build_landscape()
        domain = landscape.domain

        radius = self.effective_capture_radius
        if radius is None:
            raise ScenarioConfigError("required when no arena is given", field="capture_radius")
        if not (math.isfinite(radius) and radius > 0):
            raise ScenarioConfigError(f"must be positive, got {radius}", field="capture_radius")

        if self.placement.kind == "explicit":
            positions = self.placement.positions
            if len(positions) != self.params.n_agents:
                raise ScenarioConfigError(
                    f"{len(positions)} positions for {self.params.n_agents} agents",
                    field="placement.positions",
                )
            for index, position in enumerate(positions):
                if not domain.contains(position, tol=self.params.d_min):
                    raise ScenarioConfigError(
                        f"{list(position)} lies outside the domain", field=f"placement.positions[{index}]"
                    )
        elif self.placement.kind == "quadrant_random" and not (domain.is_box and domain.dim == 2):
            raise ScenarioConfigError("quadrant_random needs a 2-D box domain", field="placement.kind")

        if not domain.is_box and self.params.step_size >= 2.0 * domain.radius:
            raise ScenarioConfigError(
                f"step_size must be smaller than the sphere diameter {2.0 * domain.radius}",
                field="params.step_size",
            )
        logger.debug(f"Scenario {self.name} is valid ({landscape.kind}, {self.params.n_agents} agents)")
        return landscape

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "description": self.description,
            "landscape": {"kind": self.landscape.kind, "params": self.landscape.params},
            "bindings": [b.to_dict() for b in self.bindings],
            "params": self.params.to_dict(),
            "arena": self.arena.to_dict() if self.arena else None,
            "capture_radius": self.capture_radius,
            "placement": self.placement.to_dict(),
            "seeds": list(self.seeds),
            "dwell": self.dwell,
            "output": {"trace": self.output.trace, "summary": self.output.summary},
        }


def _wrap(build: Callable, field_path: str):
    """Run build, re-raising library errors as config errors at field_path."""
    try:
        return build()
    except ScenarioConfigError:
        raise
    except BmoError as e:
        raise ScenarioConfigError(str(e), field=field_path) from e
    except (KeyError, TypeError, ValueError) as e:
        raise ScenarioConfigError(f"invalid value ({e})", field=field_path) from e


def _require_file(config: ScenarioConfig, value, field_path: str) -> Path:
    if not isinstance(value, str):
        raise ScenarioConfigError(f"expected a file path, got {value!r}", field=field_path)
    path = config.resolve_path(value)
    if not path.is_file():
        raise ScenarioConfigError(f"file not found: {path}", field=field_path)
    return path


def _build_three_peaks(config: ScenarioConfig) -> Landscape:
    constants = config.landscape.params.get("constants")
    if constants is None:
        return make_three_peaks()
    return make_three_peaks(_require_file(config, constants, "landscape.params.constants"))


def _build_gaussian_peaks(config: ScenarioConfig) -> Landscape:
    p = config.landscape.params
    return GaussianPeaksField(Domain.box(p["bounds"]), p["centers"], p["heights"], p["sigmas"])


def _build_rastrigin(config: ScenarioConfig) -> Landscape:
    bounds = config.landscape.params.get("bounds")
    return make_rastrigin(bounds) if bounds else make_rastrigin()


def _build_schwefel(config: ScenarioConfig) -> Landscape:
    bounds = config.landscape.params.get("bounds")
    return make_schwefel(bounds) if bounds else make_schwefel()


def _build_sphere(config: ScenarioConfig) -> Landscape:
    return make_sphere_field(float(config.landscape.params.get("radius", 1.0)))


def _build_light(config: ScenarioConfig) -> Landscape:
    if config.arena is None:
        raise ScenarioConfigError("light landscapes need an arena", field="arena")
    return make_light_field(config.landscape.params["sources"], config.arena.domain())


def _build_image(config: ScenarioConfig) -> Landscape:
    p = config.landscape.params
    path = _require_file(config, p.get("path"), "landscape.params.path")
    return load_image_field(path, gamma=float(p.get("gamma", 2.0)))


LANDSCAPE_BUILDERS: dict[str, Callable[[ScenarioConfig], Landscape]] = {
    "three_peaks": _build_three_peaks,
    "gaussian_peaks": _build_gaussian_peaks,
    "rastrigin": _build_rastrigin,
    "schwefel": _build_schwefel,
    "sphere": _build_sphere,
    "light": _build_light,
    "image": _build_image,
}


def _mapping(data, field_path: str) -> dict:
    if not isinstance(data, dict):
        raise ScenarioConfigError(f"expected an object, got {type(data).__name__}", field=field_path)
    return data


def _parse_seeds(raw) -> tuple[int, ...]:
    if not isinstance(raw, list) or not raw:
        raise ScenarioConfigError("expected a non-empty list of integers", field="seeds")
    for index, seed in enumerate(raw):
        if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
            raise ScenarioConfigError(f"expected a 64-bit unsigned integer, got {seed!r}", field=f"seeds[{index}]")
    return tuple(raw)


def _parse_bindings(raw) -> tuple[Binding, ...]:
    if raw is None:
        return ()
    if not isinstance(raw, list):
        raise ScenarioConfigError("expected a list", field="bindings")
    bindings = []
    for index, item in enumerate(raw):
        path = f"bindings[{index}]"
        item = _mapping(item, path)
        if set(item) != {"index", "trajectory"}:
            raise ScenarioConfigError("expected exactly the keys 'index' and 'trajectory'", field=path)
        if isinstance(item["index"], bool) or not isinstance(item["index"], int):
            raise ScenarioConfigError(f"expected an integer, got {item['index']!r}", field=f"{path}.index")
        trajectory = _wrap(
            lambda: Trajectory.from_dict(_mapping(item["trajectory"], f"{path}.trajectory")),
            f"{path}.trajectory",
        )
        bindings.append(Binding(index=item["index"], trajectory=trajectory))
    return tuple(bindings)


def parse_config(data: dict, base_dir: Optional[Path] = None) -> ScenarioConfig:
    """
    Build a ScenarioConfig from decoded JSON. Does not touch the file system;
    call validate() for that.

    Raises:
        ScenarioConfigError: unknown keys, wrong types or invalid values
    """
    data = _mapping(data, "$")
    unknown = set(data) - TOP_LEVEL_KEYS
    if unknown:
        raise ScenarioConfigError(f"unknown key(s): {', '.join(sorted(unknown))}", field="$")
    for key in ("name", "landscape", "params", "seeds"):
        if key not in data:
            raise ScenarioConfigError("required", field=key)
    if not isinstance(data["name"], str) or not data["name"]:
        raise ScenarioConfigError("expected a non-empty string", field="name")

    landscape = _mapping(data["landscape"], "landscape")
    if not isinstance(landscape.get("kind"), str):
        raise ScenarioConfigError("required", field="landscape.kind")
    landscape_spec = LandscapeSpec(
        kind=landscape["kind"],
        params=_mapping(landscape.get("params", {}), "landscape.params"),
    )

    seeds = _parse_seeds(data["seeds"])
    params_data = dict(_mapping(data["params"], "params"))
    params_data.setdefault("rng_seed", seeds[0])
    params = _wrap(lambda: BmoParams.from_dict(params_data), "params")

    arena = None
    if data.get("arena") is not None:
        arena = _wrap(lambda: Arena.from_dict(_mapping(data["arena"], "arena")), "arena")

    capture_radius = data.get("capture_radius")
    if capture_radius is not None:
        if isinstance(capture_radius, bool) or not isinstance(capture_radius, (int, float)):
            raise ScenarioConfigError(f"expected a number, got {capture_radius!r}", field="capture_radius")
        if arena is not None:
            raise ScenarioConfigError("give either arena.capture_radius or capture_radius, not both",
                                      field="capture_radius")

    placement = _wrap(
        lambda: PlacementPolicy.from_dict(_mapping(data.get("placement", {}), "placement")), "placement"
    )

    dwell = data.get("dwell", DEFAULT_DWELL)
    if isinstance(dwell, bool) or not isinstance(dwell, int) or dwell < 1:
        raise ScenarioConfigError(f"expected an integer >= 1, got {dwell!r}", field="dwell")

    output_data = _mapping(data.get("output", {}), "output")
    output = _wrap(lambda: OutputSpec(**output_data), "output")

    description = data.get("description", "")
    if not isinstance(description, str):
        raise ScenarioConfigError("expected a string", field="description")

    return ScenarioConfig(
        name=data["name"],
        description=description,
        landscape=landscape_spec,
        bindings=_parse_bindings(data.get("bindings")),
        params=params,
        arena=arena,
        capture_radius=capture_radius,
        placement=placement,
        seeds=seeds,
        dwell=dwell,
        output=output,
        base_dir=base_dir or Path("."),
    )


def serialize_config(config: ScenarioConfig) -> str:
    return json.dumps(config.to_dict(), indent=2)


def load_config(path) -> ScenarioConfig:
    """
    Read and parse a scenario JSON file.

    Raises:
        ScenarioConfigError: unreadable file, invalid JSON or invalid config
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ScenarioConfigError(f"cannot read {path}: {e}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ScenarioConfigError(f"invalid JSON in {path}: {e.msg} at line {e.lineno} column {e.colno}")
    return parse_config(data, base_dir=path.parent)
