"""Shipped scenario configs, looked up by file name under settings.BMO_SCENARIO_DIR."""
import logging
from pathlib import Path

from django.conf import settings

from .config import ScenarioConfig, load_config
from .exceptions import ScenarioConfigError

logger = logging.getLogger("bflyflow")


def scenario_paths() -> dict[str, Path]:
    """Registered scenario name -> JSON file, sorted by name."""
    directory = Path(settings.BMO_SCENARIO_DIR)
    return {path.stem: path for path in sorted(directory.glob("*.json"))}


def resolve_scenario(name_or_path: str) -> ScenarioConfig:
    """
    Load a scenario from a file path, or by registered name.

    Raises:
        ScenarioConfigError: neither an existing file nor a registered name
    """
    path = Path(name_or_path)
    if path.is_file():
        return load_config(path)
    registered = scenario_paths()
    if name_or_path in registered:
        return load_config(registered[name_or_path])
    raise ScenarioConfigError(
        f"no config file or registered scenario named {name_or_path!r} "
        f"(registered: {', '.join(registered) or 'none'})",
        field="--config",
    )


def list_scenarios() -> list[dict]:
    """Name, landscape kind and description of every shipped scenario."""
    rows = []
    for name, path in scenario_paths().items():
        config = load_config(path)
        rows.append({"name": name, "landscape": config.landscape.kind, "description": config.description})
    return rows
