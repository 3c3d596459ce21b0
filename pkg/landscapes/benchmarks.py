"""
Analytic benchmark landscapes: three Gaussian peaks, Schwefel, Rastrigin and
the sphere surface.

Schwefel and Rastrigin are minimisation functions; they are negated and
shifted so their optima become nonnegative maxima. The default bounds
are chosen so the grid oracle counts exactly 15 Schwefel and 100 Rastrigin
local maxima:

  Rastrigin, [-4.52, 5.48]^2: one maximum near every integer point of
  {-4..5}^2. The bounds are offset from half-integers so no two grid cell
  centers sit symmetrically about the origin (an exact tie would hide the
  central peak).

  Schwefel, x in [-150, 250], y in [-50, 100]: along one axis the term
  x sin(sqrt|x|) peaks near -125, -25.9, 5.24, 65.5 and 204.7 (5 maxima)
  for x and near -25.9, 5.24 and 65.5 (3 maxima) for y. The function is
  separable, so the 2-D maxima are the 5 x 3 = 15 combinations.
"""
import functools
import json
import logging
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .domain import Domain
from .fields import GaussianPeaksField, Landscape, SphereField

logger = logging.getLogger("bflyflow")

THREE_PEAKS_CONSTANTS = Path(__file__).parent / "data" / "three_peaks.json"

RASTRIGIN_BOUNDS = ((-4.52, 5.48), (-4.52, 5.48))
SCHWEFEL_BOUNDS = ((-150.0, 250.0), (-50.0, 100.0))
SCHWEFEL_CONSTANT = 418.9829

# Samples per axis when locating one-dimensional maxima of a separable term.
_AXIS_SAMPLES = 20001


def rastrigin(points: np.ndarray) -> np.ndarray:
    """Standard Rastrigin (minimisation form), row-wise over an n x d array."""
    points = np.atleast_2d(points)
    d = points.shape[1]
    return 10.0 * d + np.sum(points ** 2 - 10.0 * np.cos(2.0 * np.pi * points), axis=1)


def schwefel(points: np.ndarray) -> np.ndarray:
    """Standard Schwefel (minimisation form), row-wise over an n x d array."""
    points = np.atleast_2d(points)
    d = points.shape[1]
    return SCHWEFEL_CONSTANT * d - np.sum(points * np.sin(np.sqrt(np.abs(points))), axis=1)


def _axis_maxima(term: Callable[[np.ndarray], np.ndarray], lo: float, hi: float) -> np.ndarray:
    """Interior local maxima of a one-dimensional function on [lo, hi]."""
    xs = np.linspace(lo, hi, _AXIS_SAMPLES)
    ys = term(xs)
    interior = np.flatnonzero((ys[1:-1] > ys[:-2]) & (ys[1:-1] > ys[2:])) + 1
    maxima = []
    for k in interior:
        result = minimize_scalar(
            lambda x: -float(term(np.array([x]))[0]),
            bounds=(xs[k - 1], xs[k + 1]),
            method="bounded",
            options={"xatol": 1e-10},
        )
        maxima.append(float(result.x))
    return np.array(maxima)


class SeparableBenchmark(Landscape):
    """
    Negated separable benchmark: raw(x) = sum_i axis_term(x_i) - offset.

    Ground-truth peaks are every combination of the per-axis maxima.
    """

    offset = 0.0

    def __init__(self, bounds, **kwargs):
        domain = Domain.box(bounds)
        super().__init__(domain, affine_shift=self.shift_for(domain), **kwargs)
        axis_maxima = [_axis_maxima(self.axis_term, lo, hi) for lo, hi in domain.bounds]
        grid = np.meshgrid(*axis_maxima, indexing="ij")
        self._peaks = np.stack([g.ravel() for g in grid], axis=1)
        logger.debug(f"{self.kind}: {len(self._peaks)} analytic peaks over {domain.bounds}")

    @staticmethod
    def axis_term(x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def shift_for(self, domain: Domain) -> float:
        raise NotImplementedError

    def raw_many(self, points: np.ndarray, t: int) -> np.ndarray:
        return np.sum(self.axis_term(points), axis=1) - self.offset * points.shape[1]


class RastriginField(SeparableBenchmark):
    """Negated Rastrigin; its global maximum is the origin."""

    kind = "rastrigin"
    offset = 10.0

    @staticmethod
    def axis_term(x: np.ndarray) -> np.ndarray:
        return -(x ** 2 - 10.0 * np.cos(2.0 * np.pi * x))

    def shift_for(self, domain: Domain) -> float:
        # per axis x^2 - 10 cos(2 pi x) + 10 <= x^2 + 20
        return float(np.sum(np.maximum(domain.lower ** 2, domain.upper ** 2) + 20.0))


class SchwefelField(SeparableBenchmark):
    """Negated Schwefel."""

    kind = "schwefel"
    offset = SCHWEFEL_CONSTANT

    @staticmethod
    def axis_term(x: np.ndarray) -> np.ndarray:
        return x * np.sin(np.sqrt(np.abs(x)))

    def shift_for(self, domain: Domain) -> float:
        # |x sin(sqrt|x|)| <= |x|
        return float(np.sum(np.maximum(np.abs(domain.lower), np.abs(domain.upper)) + SCHWEFEL_CONSTANT))


@functools.lru_cache(maxsize=8)
def _read_constants(path: str) -> dict:
    with open(path) as f:
        return json.load(f)


def load_three_peaks_constants(path: Optional[Path] = None) -> dict:
    """Load (and cache) the three-peaks constants file."""
    return _read_constants(str(path or THREE_PEAKS_CONSTANTS))


def make_three_peaks(constants_path: Optional[Path] = None) -> GaussianPeaksField:
    constants = load_three_peaks_constants(constants_path)
    peaks = constants["peaks"]
    return GaussianPeaksField(
        Domain.box(constants["domain"]),
        centers=[p["center"] for p in peaks],
        heights=[p["height"] for p in peaks],
        sigmas=[p["sigma"] for p in peaks],
    )


def make_rastrigin(domain_bounds=RASTRIGIN_BOUNDS) -> RastriginField:
    return RastriginField(domain_bounds)


def make_schwefel(domain_bounds=SCHWEFEL_BOUNDS) -> SchwefelField:
    return SchwefelField(domain_bounds)


def make_sphere_field(r: float = 1.0) -> SphereField:
    return SphereField(r)
