"""
Sensed intensity versus source rotation speed.

A probe sits still at a fixed ground point while one light source circles
around a center at several RPM values. The probe reads the true field once
per iteration, so faster rotation only changes where on the circle the
source is sampled; there is no sensor lag.
"""
import logging
import math
from typing import Iterable

import numpy as np

from landscapes.fields import LightField

from .binding import bind
from .exceptions import UnsupportedBindingError
from .trajectories import Circular

logger = logging.getLogger("bflyflow")


def sensed_intensity_profile(landscape: LightField, probe, rpms: Iterable[float],
                             iter_per_minute: float, iters: int, center=None,
                             radius: float = 25.0, source_index: int = 0) -> list[dict]:
    """
    One row per RPM: {rpm, period, series, mean, min, max}.

    The circle is centered on the source's resting position unless center
    is given. The probe must lie in the landscape domain.
    """
    if not isinstance(landscape, LightField):
        raise UnsupportedBindingError("sensed intensity profiles need a light field")
    if iters < 1:
        raise UnsupportedBindingError(f"iters must be >= 1, got {iters}")
    probe = np.asarray(probe, dtype=float)
    pivot = landscape.centers[source_index] if center is None else np.asarray(center, dtype=float)

    rows = []
    for rpm in rpms:
        orbit = Circular(center=tuple(pivot), radius=radius, rpm=float(rpm), iter_per_minute=iter_per_minute)
        moving = bind(landscape, [(source_index, orbit)], max_iters=iters)
        series = [moving.evaluate(probe, t) for t in range(iters)]
        rows.append({
            "rpm": float(rpm),
            "period": orbit.period(),
            "series": series,
            "mean": math.fsum(series) / len(series),
            "min": min(series),
            "max": max(series),
        })
        logger.debug(f"rpm {rpm}: mean sensed intensity {rows[-1]['mean']:.6g}")
    return rows
