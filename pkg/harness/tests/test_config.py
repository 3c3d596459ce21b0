"""
Tests for scenario configs and the scenario registry.

This module tests:
- Parsing, defaults and JSON-path error reporting
- validate() on shipped and broken scenarios
- Lookup of registered scenarios by name or path
"""

import copy
import json

import pytest
from django.conf import settings

from harness.config import load_config, parse_config, serialize_config
from harness.exceptions import ScenarioConfigError
from harness.registry import list_scenarios, resolve_scenario, scenario_paths
from landscapes.fields import LightField

SHIPPED = [
    "chasing_sources", "circular_source", "dual_source", "dual_source_unequal", "pingpong_source",
    "rastrigin", "schwefel", "ship_image", "single_source", "sphere", "three_peaks",
    "three_peaks_shift", "updown_source",
]

BASE = {
    "name": "base",
    "landscape": {"kind": "three_peaks", "params": {}},
    "params": {"step_size": 2.0, "n_agents": 3, "max_iters": 50},
    "capture_radius": 5.0,
    "seeds": [4, 5],
}


def variant(**changes):
    data = copy.deepcopy(BASE)
    for key, value in changes.items():
        if value is None:
            data.pop(key, None)
        else:
            data[key] = value
    return data


# Parsing Tests

class TestParseConfig:
    """Decoding scenario JSON"""

    def test_defaults(self):
        config = parse_config(copy.deepcopy(BASE))
        assert config.params.rng_seed == 4
        assert config.dwell == 3
        assert config.placement.kind == "uniform_random"
        assert config.output.trace == "trace.csv"
        assert config.effective_capture_radius == 5.0
        assert config.bindings == ()

    def test_explicit_rng_seed_kept(self):
        data = variant(params={"n_agents": 3, "rng_seed": 99})
        assert parse_config(data).params.rng_seed == 99

    def test_with_seed_pins_both(self):
        config = parse_config(copy.deepcopy(BASE)).with_seed(11)
        assert config.seeds == (11,)
        assert config.params.rng_seed == 11

    @pytest.mark.parametrize("data,field", [
        (variant(name=None), "name"),
        (variant(name=""), "name"),
        (variant(seeds=None), "seeds"),
        (variant(seeds=[]), "seeds"),
        (variant(seeds=[1, -2]), "seeds[1]"),
        (variant(seeds=[1, 2**64]), "seeds[1]"),
        (variant(params={"b2": 0.5}), "params"),
        (variant(params={"stepsize": 2}), "params"),
        (variant(extra=True), "$"),
        (variant(landscape={"params": {}}), "landscape.kind"),
        (variant(landscape="three_peaks"), "landscape"),
        (variant(arena={"outer_radius": 90, "capture_radius": 25}), "capture_radius"),
        (variant(arena={"outer_radius": 10, "capture_radius": 25}, capture_radius=None), "arena"),
        (variant(capture_radius="5"), "capture_radius"),
        (variant(dwell=0), "dwell"),
        (variant(dwell=True), "dwell"),
        (variant(placement={"kind": "grid"}), "placement"),
        (variant(output={"log": "x.txt"}), "output"),
        (variant(description=3), "description"),
        (variant(bindings={"index": 0}), "bindings"),
        (variant(bindings=[{"index": 0}]), "bindings[0]"),
        (variant(bindings=[{"index": "0", "trajectory": {}}]), "bindings[0].index"),
        (variant(bindings=[{"index": 0, "trajectory": {"kind": "spiral"}}]), "bindings[0].trajectory"),
    ])
    def test_errors_name_the_field(self, data, field):
        with pytest.raises(ScenarioConfigError) as excinfo:
            parse_config(data)
        assert excinfo.value.field == field
        assert str(excinfo.value).startswith(f"{field}: ")

    def test_round_trip(self):
        data = variant(
            bindings=[{"index": 1, "trajectory": {"kind": "updown", "amplitude": 5, "period": 40}}],
            placement={"kind": "explicit", "positions": [[10, 10], [20, 20], [30, 30]]},
            description="round trip",
        )
        config = parse_config(data)
        assert parse_config(json.loads(serialize_config(config))) == config

    def test_invalid_json_file(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"name": ')
        with pytest.raises(ScenarioConfigError, match="invalid JSON"):
            load_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ScenarioConfigError, match="cannot read"):
            load_config(tmp_path / "absent.json")


# Validation Tests

class TestValidate:
    """Checks before running"""

    @pytest.mark.parametrize("data,field", [
        (variant(landscape={"kind": "volcano"}), "landscape.kind"),
        (variant(landscape={"kind": "light", "params": {"sources": [{"center": [1, 1]}]}}), "arena"),
        (variant(landscape={"kind": "image", "params": {"path": "nowhere.pgm"}}), "landscape.params.path"),
        (variant(landscape={"kind": "three_peaks", "params": {"constants": "nowhere.json"}}),
         "landscape.params.constants"),
        (variant(landscape={"kind": "gaussian_peaks", "params": {"bounds": [[0, 1], [0, 1]]}}),
         "landscape.params"),
        (variant(capture_radius=None), "capture_radius"),
        (variant(capture_radius=0), "capture_radius"),
        (variant(placement={"kind": "explicit", "positions": [[1, 1], [200, 1], [2, 2]]}),
         "placement.positions[1]"),
        (variant(placement={"kind": "explicit", "positions": [[1, 1]]}), "placement.positions"),
        (variant(bindings=[{"index": 1, "trajectory": {"kind": "horizontal_shift", "k": 1.0}}]), "bindings"),
        (variant(bindings=[{"index": 7, "trajectory": {"kind": "horizontal_shift", "k": 0.0}}]), "bindings"),
        (variant(landscape={"kind": "sphere", "params": {"radius": 1.0}}, placement={"kind": "quadrant_random"}),
         "placement.kind"),
        (variant(landscape={"kind": "sphere", "params": {"radius": 0.5}}), "params.step_size"),
    ])
    def test_errors_name_the_field(self, data, field):
        config = parse_config(data, base_dir=settings.BMO_SCENARIO_DIR)
        with pytest.raises(ScenarioConfigError) as excinfo:
            config.validate()
        assert excinfo.value.field == field

    def test_gaussian_peaks_landscape(self):
        config = parse_config(variant(landscape={"kind": "gaussian_peaks", "params": {
            "bounds": [[0, 10], [0, 10]], "centers": [[5, 5]], "heights": [1.0], "sigmas": [1.0],
        }}))
        landscape = config.validate()
        assert landscape.evaluate([5.0, 5.0]) == pytest.approx(1.0)

    def test_light_scenario_uses_arena_domain(self):
        config = resolve_scenario("dual_source")
        landscape = config.validate()
        assert isinstance(landscape, LightField)
        assert landscape.domain.bounds == ((0.0, 230.0), (0.0, 230.0))
        assert config.effective_capture_radius == 25


# Registry Tests

class TestRegistry:
    """Shipped scenarios"""

    def test_all_shipped_scenarios_registered(self):
        assert list(scenario_paths()) == SHIPPED

    @pytest.mark.parametrize("name", SHIPPED)
    def test_shipped_scenario_validates(self, name):
        config = resolve_scenario(name)
        assert config.name == name
        config.validate()

    @pytest.mark.parametrize("name", SHIPPED)
    def test_shipped_scenario_round_trips(self, name):
        config = resolve_scenario(name)
        again = parse_config(json.loads(serialize_config(config)), base_dir=config.base_dir)
        assert again == config

    def test_resolve_by_path(self):
        path = settings.BMO_SCENARIO_DIR / "sphere.json"
        assert resolve_scenario(str(path)).name == "sphere"

    def test_unknown_name(self):
        with pytest.raises(ScenarioConfigError) as excinfo:
            resolve_scenario("no_such_scenario")
        assert excinfo.value.field == "--config"

    def test_list_scenarios(self):
        rows = list_scenarios()
        assert [row["name"] for row in rows] == SHIPPED
        assert all(row["description"] for row in rows)
        assert {row["landscape"] for row in rows} >= {"three_peaks", "light", "image", "sphere"}
