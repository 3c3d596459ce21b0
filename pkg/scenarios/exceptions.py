from bmo.exceptions import BmoError


class TrajectoryError(BmoError):
    """Raised for malformed trajectories or ones that leave the domain within the budget."""
    exit_code = 3


class UnsupportedBindingError(BmoError):
    """Raised when trajectories are bound to a landscape without movable centers."""
    exit_code = 3
