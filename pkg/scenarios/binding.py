"""Attach trajectories to the movable centers of a landscape."""
import logging
from typing import Iterable, Optional

from landscapes.fields import Landscape, MovableCentersLandscape

from .exceptions import UnsupportedBindingError
from .trajectories import Trajectory, validate_trajectory

logger = logging.getLogger("bflyflow")


def bind(landscape: Landscape, bindings: Iterable[tuple[int, Trajectory]],
         max_iters: Optional[int] = None) -> MovableCentersLandscape:
    """
    Return a time-dependent copy of landscape whose bound centers follow
    their trajectories. Indices address Gaussian centers of benchmark
    landscapes or sources of light fields; unbound centers stay fixed.
    Trajectories without a start position start from the center they move.

    With max_iters, every trajectory is also checked against the domain
    for the whole iteration budget.

    Raises:
        UnsupportedBindingError: image/sphere/analytic landscapes, bad or repeated index
        TrajectoryError: a trajectory leaves the domain within max_iters
    """
    if not isinstance(landscape, MovableCentersLandscape):
        raise UnsupportedBindingError(f"{landscape.kind} landscapes have no movable centers to bind")

    count = len(landscape.centers)
    anchored: dict[int, Trajectory] = {}
    for index, trajectory in bindings:
        if isinstance(index, bool) or not isinstance(index, int) or not 0 <= index < count:
            raise UnsupportedBindingError(
                f"binding index {index!r} out of range for {count} centers of {landscape.kind}"
            )
        if index in anchored:
            raise UnsupportedBindingError(f"center {index} is bound twice")
        anchored[index] = trajectory.anchored(landscape.centers[index])
        if max_iters is not None:
            validate_trajectory(anchored[index], landscape.domain, max_iters)

    logger.debug(f"Bound {len(anchored)} of {count} {landscape.kind} centers to trajectories")
    return landscape.with_trajectories(anchored)
