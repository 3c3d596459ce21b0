"""
Replicate batches, step-size sweeps and initial-placement comparisons.

Replicates are independent (each builds its own landscape and swarm) and
run on a thread pool capped by settings.BMO_MAX_THREADS. Aggregates are
computed from replicate summaries sorted by seed with exact summation, so
completion order never changes the result.
"""
import logging
import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Iterable, Mapping, Optional, Sequence

from django.conf import settings

from bmo.exceptions import InvalidParamsError
from bmo.params import PlacementPolicy
from harness.config import ScenarioConfig

from .runner import run_experiment

logger = logging.getLogger("bflyflow")


def aggregate_replicates(summaries: Iterable[dict]) -> dict:
    """
    Success fraction, median all-captured iteration (over successful
    replicates, None if there are none), mean final peak distance and mean
    captured-peak fraction of a set of replicate summaries.
    """
    ordered = sorted(summaries, key=lambda s: s["seed"])
    if not ordered:
        raise InvalidParamsError("cannot aggregate an empty batch")
    count = len(ordered)
    captured_at = sorted(s["all_captured_iteration"] for s in ordered if s["captured"])
    distances = sorted(s["final_mean_peak_distance"] for s in ordered)
    fractions = sorted(s["captured_fraction"] for s in ordered)
    return {
        "replicates": count,
        "success_fraction": len(captured_at) / count,
        "median_all_captured_iteration": statistics.median(captured_at) if captured_at else None,
        "mean_final_peak_distance": math.fsum(distances) / count,
        "mean_captured_fraction": math.fsum(fractions) / count,
    }


def run_batch(config: ScenarioConfig, seeds: Optional[Sequence[int]] = None,
              max_workers: Optional[int] = None) -> dict:
    """
    Run one replicate per seed (the scenario's seeds by default).

    Returns {"scenario", "seeds", "per_seed": [summary, ...] sorted by seed,
    "aggregate": {...}}.
    """
    seeds = list(config.seeds if seeds is None else seeds)
    if not seeds:
        raise InvalidParamsError("a batch needs at least one seed")
    config.validate()
    workers = max(1, min(max_workers or settings.BMO_MAX_THREADS, len(seeds)))
    logger.info(f"Batch {config.name}: {len(seeds)} replicates on {workers} thread(s)")

    with ThreadPoolExecutor(max_workers=workers) as executor:
        results = list(executor.map(lambda seed: run_experiment(config, seed, keep_trace=False), seeds))

    per_seed = sorted((r.summary() for r in results), key=lambda s: s["seed"])
    aggregate = aggregate_replicates(per_seed)
    logger.info(
        f"Batch {config.name} done: success fraction {aggregate['success_fraction']:.2f}, "
        f"median all-captured iteration {aggregate['median_all_captured_iteration']}"
    )
    return {"scenario": config.name, "seeds": sorted(seeds), "per_seed": per_seed, "aggregate": aggregate}


def step_size_sweep(config: ScenarioConfig, step_sizes: Sequence[float],
                    seeds: Optional[Sequence[int]] = None, max_workers: Optional[int] = None) -> list[dict]:
    """
    One batch per step size; jitter is scaled with the step so its ratio
    to the step stays fixed. Returns one table row per step size.
    """
    rows = []
    base = config.params
    for step in step_sizes:
        jitter = min(float(step), base.jitter * step / base.step_size)
        swept = replace(config, params=replace(base, step_size=float(step), jitter=jitter))
        aggregate = run_batch(swept, seeds, max_workers)["aggregate"]
        rows.append({
            "step_size": float(step),
            "success_fraction": aggregate["success_fraction"],
            "median_all_captured_iteration": aggregate["median_all_captured_iteration"],
            "mean_final_distance": aggregate["mean_final_peak_distance"],
        })
    return rows


def _mean_per_peak(per_seed: Sequence[dict], key: str) -> list[float]:
    if not per_seed or not per_seed[0]["final_peak_counts"]:
        return []
    peaks = len(per_seed[0]["final_peak_counts"])
    return [
        math.fsum(sorted(s["final_peak_counts"][k][key] for s in per_seed)) / len(per_seed)
        for k in range(peaks)
    ]


def placement_comparison(config: ScenarioConfig, layouts: Mapping[str, PlacementPolicy],
                         seeds: Optional[Sequence[int]] = None,
                         max_workers: Optional[int] = None) -> list[dict]:
    """
    One batch per initial layout, everything else unchanged.

    Each row reports the success fraction, the median all-captured
    iteration and, per peak, the mean number of agents that ended nearest
    to it and inside its capture radius.
    """
    if not layouts:
        raise InvalidParamsError("a placement comparison needs at least one layout")
    rows = []
    for name, placement in layouts.items():
        laid_out = replace(config, placement=placement)
        result = run_batch(laid_out, seeds, max_workers)
        aggregate = result["aggregate"]
        rows.append({
            "layout": name,
            "placement": placement.to_dict(),
            "success_fraction": aggregate["success_fraction"],
            "median_all_captured_iteration": aggregate["median_all_captured_iteration"],
            "mean_final_distance": aggregate["mean_final_peak_distance"],
            "mean_agents_nearest_peak": _mean_per_peak(result["per_seed"], "nearest"),
            "mean_agents_inside_peak": _mean_per_peak(result["per_seed"], "inside"),
        })
        logger.info(f"Layout {name} on {config.name}: success fraction {aggregate['success_fraction']:.2f}")
    return rows
