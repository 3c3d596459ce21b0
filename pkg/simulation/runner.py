"""
Single-run experiment driver.

run_experiment() validates the scenario, lays out the swarm and calls the
synchronous BMO step max_iters times. Iteration t of the trace holds the
positions before the t-th move together with the UV, fitness and l-mate
sensed there; a final sensing pass records iteration max_iters, so the
trace covers t = 0..max_iters and metrics see the converged positions.
"""
import logging
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from bmo.engine import advance, init_swarm, sense_and_select
from harness.config import ScenarioConfig
from harness.trace import TraceRecord, records_for
from landscapes.fields import Landscape, MovableCentersLandscape

from .metrics import capture_metrics, final_mean_peak_distance, final_peak_counts, nearest_agent_distances

logger = logging.getLogger("bflyflow")


@dataclass
class RunResult:
    scenario: str
    seed: int
    capture_iteration: list[Optional[int]]
    all_captured_iteration: Optional[int]
    final_mean_peak_distance: float
    tracking_error_series: list[list[float]]
    final_peak_counts: list[dict]
    final_positions: np.ndarray
    trace: list[TraceRecord] = field(default_factory=list)
    elapsed_seconds: float = 0.0

    @property
    def captured(self) -> bool:
        return self.all_captured_iteration is not None

    @property
    def captured_fraction(self) -> float:
        if not self.capture_iteration:
            return 0.0
        hits = sum(1 for t in self.capture_iteration if t is not None)
        return hits / len(self.capture_iteration)

    def summary(self) -> dict:
        """JSON-ready metrics (no trace, no timing, so equal seeds give equal summaries)."""
        return {
            "scenario": self.scenario,
            "seed": self.seed,
            "captured": self.captured,
            "capture_iteration": list(self.capture_iteration),
            "captured_fraction": self.captured_fraction,
            "all_captured_iteration": self.all_captured_iteration,
            "final_mean_peak_distance": self.final_mean_peak_distance,
            "final_peak_counts": self.final_peak_counts,
            "tracking_error_series": self.tracking_error_series,
            "final_positions": self.final_positions.tolist(),
        }


def _moving_indices(landscape: Landscape) -> list[int]:
    if isinstance(landscape, MovableCentersLandscape):
        return sorted(landscape.trajectories)
    return []


def run_experiment(config: ScenarioConfig, seed: Optional[int] = None,
                   keep_trace: bool = True) -> RunResult:
    """
    Run one replicate of a scenario.

    seed defaults to the scenario's first seed. With keep_trace=False the
    per-agent trace rows are not collected (batches only need the metrics).

    Raises:
        ScenarioConfigError: the scenario does not validate (before iteration 0)
        NonFiniteFitnessError, OutOfDomainError: the landscape failed mid-run
    """
    seed = config.seeds[0] if seed is None else seed
    config = config.with_seed(seed)
    landscape = config.validate()
    params = config.params
    domain = landscape.domain
    started = time.perf_counter()

    state = init_swarm(params, domain, config.placement)
    positions = np.empty((params.max_iters + 1, params.n_agents, domain.dim))
    trace: list[TraceRecord] = []
    logger.info(
        f"Running {config.name} (seed {seed}): {params.n_agents} agents, "
        f"{params.max_iters} iterations on {landscape.kind}"
    )

    for t in range(params.max_iters + 1):
        sensed = sense_and_select(state, landscape, params)
        positions[t] = sensed.positions
        if keep_trace:
            trace.extend(records_for(sensed))
        if t < params.max_iters:
            state = advance(sensed, landscape, params)
        if t % 100 == 0:
            logger.debug(f"{config.name} t={t}: best fitness {sensed.fitness.max():.6g}")

    radius = config.effective_capture_radius
    report = capture_metrics(positions, landscape.peaks_at, radius, config.dwell, domain.distances)
    final_peaks = landscape.peaks_at(params.max_iters)
    result = RunResult(
        scenario=config.name,
        seed=seed,
        capture_iteration=report.capture_iteration,
        all_captured_iteration=report.all_captured_iteration,
        final_mean_peak_distance=final_mean_peak_distance(positions[-1], final_peaks, domain.distances),
        tracking_error_series=nearest_agent_distances(
            positions, landscape.peaks_at, _moving_indices(landscape), domain.distances
        ),
        final_peak_counts=final_peak_counts(positions[-1], final_peaks, radius, domain.distances),
        final_positions=positions[-1].copy(),
        trace=trace,
        elapsed_seconds=time.perf_counter() - started,
    )
    logger.info(
        f"Finished {config.name} (seed {seed}) in {result.elapsed_seconds:.2f}s: "
        f"{report.captured_count}/{len(report.capture_iteration)} peaks captured, "
        f"all at t={result.all_captured_iteration}"
    )
    return result
