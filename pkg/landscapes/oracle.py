"""
Grid local-maximum oracle: ground-truth peak finder for metrics and tests.

The landscape is sampled at the cell centers of a uniform grid. A cell is a
peak when its value is strictly greater than all 8 neighbours (border cells
have fewer neighbours and never qualify). Each peak is then refined by a
bounded hill-climb inside its own cell neighbourhood and peaks closer than
one cell are merged.
"""
import logging

import numpy as np
from scipy import ndimage
from scipy.optimize import minimize

from .exceptions import OracleError, UnsupportedLandscapeError
from .fields import Landscape

logger = logging.getLogger("bflyflow")

MIN_RESOLUTION = 100
DEFAULT_RESOLUTION = 400

_RING = np.array([[1, 1, 1], [1, 0, 1], [1, 1, 1]], dtype=bool)


def sample_grid(landscape: Landscape, resolution: int, t: int = 0):
    """Cell-center coordinates per axis and the (ny, nx) grid of fitness values."""
    domain = landscape.domain
    axes = [
        lo + (np.arange(resolution) + 0.5) * (hi - lo) / resolution
        for lo, hi in domain.bounds
    ]
    xx, yy = np.meshgrid(axes[0], axes[1], indexing="xy")
    values = landscape.evaluate_many(np.column_stack([xx.ravel(), yy.ravel()]), t)
    return axes, values.reshape(xx.shape)


def grid_local_max_oracle(landscape: Landscape, resolution: int = DEFAULT_RESOLUTION,
                          t: int = 0) -> np.ndarray:
    """
    Local maxima of a 2-D box landscape at time t, highest first (K x 2 array).

    Raises:
        UnsupportedLandscapeError: sphere domains (use the analytic pole) or non 2-D boxes
        OracleError: resolution below MIN_RESOLUTION
    """
    domain = landscape.domain
    if not domain.is_box or domain.dim != 2:
        raise UnsupportedLandscapeError(
            f"grid oracle needs a 2-D box domain, {landscape.kind} has {domain.kind}"
        )
    if resolution < MIN_RESOLUTION:
        raise OracleError(f"resolution must be at least {MIN_RESOLUTION} per axis, got {resolution}")

    (xs, ys), values = sample_grid(landscape, resolution, t)
    neighbours = ndimage.maximum_filter(values, footprint=_RING, mode="constant", cval=-np.inf)
    is_peak = values > neighbours
    is_peak[0, :] = is_peak[-1, :] = False
    is_peak[:, 0] = is_peak[:, -1] = False

    cell = np.array([xs[1] - xs[0], ys[1] - ys[0]])
    candidates = []
    for row, col in np.argwhere(is_peak):
        start = np.array([xs[col], ys[row]])
        candidates.append(_refine(landscape, start, float(values[row, col]), cell, t))

    candidates.sort(key=lambda item: -item[1])
    peaks: list[np.ndarray] = []
    for position, _ in candidates:
        if all(np.any(np.abs(position - kept) >= cell) for kept in peaks):
            peaks.append(position)
    logger.debug(f"Grid oracle on {landscape.kind}: {len(peaks)} peaks at resolution {resolution}")
    return np.array(peaks).reshape(-1, 2)


def _refine(landscape: Landscape, start: np.ndarray, start_value: float,
            cell: np.ndarray, t: int) -> tuple[np.ndarray, float]:
    lower = np.maximum(start - cell, landscape.domain.lower)
    upper = np.minimum(start + cell, landscape.domain.upper)
    result = minimize(
        lambda p: -landscape.evaluate(p, t),
        start,
        method="L-BFGS-B",
        bounds=list(zip(lower, upper)),
    )
    if result.success and -result.fun > start_value:
        return np.asarray(result.x, dtype=float), float(-result.fun)
    return start, start_value
