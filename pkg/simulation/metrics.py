"""
Capture, convergence and tracking metrics.

All metrics work on a positions array of shape (T, N, d), iteration t at
index t, and a peaks_at(t) callable giving the ground-truth peaks at t.
A trace (list of TraceRecord) converts to that array with
positions_from_trace().
"""
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.spatial.distance import cdist

from bmo.exceptions import InvalidParamsError

PeaksAt = Callable[[int], np.ndarray]
Distances = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class CaptureReport:
    capture_iteration: list[Optional[int]]
    all_captured_iteration: Optional[int]

    @property
    def captured_count(self) -> int:
        return sum(1 for t in self.capture_iteration if t is not None)


def positions_from_trace(trace: Sequence) -> np.ndarray:
    """(T, N, d) positions from trace records ordered by iteration then agent."""
    if not trace:
        return np.zeros((0, 0, 2))
    iterations = sorted({record.iter for record in trace})
    agents = sorted({record.agent_id for record in trace})
    positions = np.full((len(iterations), len(agents), trace[0].dim), np.nan)
    row_of = {t: k for k, t in enumerate(iterations)}
    for record in trace:
        positions[row_of[record.iter], record.agent_id] = record.position
    return positions


def _as_positions(trace) -> np.ndarray:
    if isinstance(trace, np.ndarray):
        return trace
    return positions_from_trace(trace)


def _as_peaks_at(peaks) -> PeaksAt:
    if callable(peaks):
        return peaks
    fixed = np.atleast_2d(np.asarray(peaks, dtype=float))
    return lambda t: fixed


def capture_metrics(trace: Union[np.ndarray, Sequence], peaks: Union[PeaksAt, np.ndarray],
                    capture_radius: float, dwell: int = 3,
                    distances: Distances = cdist) -> CaptureReport:
    """
    First capture iteration per peak and the first iteration at which every
    peak is captured at once.

    A peak is captured at t when one agent has been within capture_radius of
    it for dwell consecutive iterations ending at t.
    """
    if dwell < 1:
        raise InvalidParamsError(f"dwell must be >= 1, got {dwell}")
    positions = _as_positions(trace)
    peaks_at = _as_peaks_at(peaks)
    steps = positions.shape[0]
    k = len(peaks_at(0)) if steps else 0

    runs = np.zeros((positions.shape[1] if steps else 0, k), dtype=int)
    capture_iteration: list[Optional[int]] = [None] * k
    all_captured = None
    for t in range(steps):
        inside = distances(positions[t], peaks_at(t)) <= capture_radius  # (N, K)
        runs = np.where(inside, runs + 1, 0)
        captured = np.any(runs >= dwell, axis=0)
        for index in np.flatnonzero(captured):
            if capture_iteration[index] is None:
                capture_iteration[index] = t
        if all_captured is None and k and np.all(captured):
            all_captured = t
    return CaptureReport(capture_iteration=capture_iteration, all_captured_iteration=all_captured)


def nearest_agent_distances(positions: np.ndarray, peaks_at: PeaksAt, indices: Sequence[int],
                            distances: Distances = cdist) -> list[list[float]]:
    """Per iteration, distance from each selected peak (moving source) to its nearest agent."""
    if not len(indices):
        return []
    series = []
    for t in range(positions.shape[0]):
        sources = peaks_at(t)[list(indices)]
        series.append([float(d) for d in distances(sources, positions[t]).min(axis=1)])
    return series


def final_mean_peak_distance(final_positions: np.ndarray, peaks: np.ndarray,
                             distances: Distances = cdist) -> float:
    """Mean over agents of the distance to the nearest peak."""
    nearest = distances(final_positions, peaks).min(axis=1)
    return math.fsum(float(d) for d in nearest) / len(nearest)


def final_peak_counts(final_positions: np.ndarray, peaks: np.ndarray, capture_radius: float,
                      distances: Distances = cdist) -> list[dict]:
    """
    Per peak, how many agents ended nearest to it and how many ended inside
    its capture radius.
    """
    table = distances(final_positions, peaks)
    nearest = table.argmin(axis=1)
    return [
        {
            "peak": index,
            "nearest": int(np.sum(nearest == index)),
            "inside": int(np.sum(table[:, index] <= capture_radius)),
        }
        for index in range(table.shape[1])
    ]


def _tail_start(length: int, start_fraction: float) -> int:
    if not 0.0 <= start_fraction < 1.0:
        raise InvalidParamsError(f"start_fraction must lie in [0, 1), got {start_fraction}")
    return int(math.floor(start_fraction * length))


def position_autocorrelation(positions: np.ndarray, max_lag: int,
                             start_fraction: float = 0.5) -> np.ndarray:
    """
    Autocorrelation r(0..max_lag) of agent positions over the tail of a run.

    Only iterations from start_fraction of the run onward are used. Each
    agent coordinate is centred on its own mean over that window, and the
    lagged products are pooled over agents and coordinates before dividing
    by the lag-0 sum. A swarm that does not move in the window gives zeros.
    A source on a closed orbit of period p shows up as a peak at lag p.
    """
    if not isinstance(max_lag, int) or max_lag < 1:
        raise InvalidParamsError(f"max_lag must be an integer >= 1, got {max_lag!r}")
    positions = np.asarray(positions, dtype=float)
    window = positions[_tail_start(positions.shape[0], start_fraction):]
    steps = window.shape[0]
    if steps <= max_lag:
        raise InvalidParamsError(f"a window of {steps} iterations is too short for lag {max_lag}")

    centred = window - window.mean(axis=0)
    total = float(np.sum(centred * centred))
    if total == 0.0:
        return np.zeros(max_lag + 1)
    return np.array([
        float(np.sum(centred[k:] * centred[:steps - k])) / total for k in range(max_lag + 1)
    ])


def tail_median_tracking_error(series: Sequence[Sequence[float]],
                               start_fraction: float = 0.5) -> list[float]:
    """
    Median over the tail of a run of each moving source's nearest-agent
    distance (the rows of nearest_agent_distances).
    """
    tail = np.asarray(series, dtype=float)[_tail_start(len(series), start_fraction):]
    if tail.size == 0:
        return []
    return [float(v) for v in np.median(tail, axis=0)]
