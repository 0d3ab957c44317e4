"""Exact evolution of two coupled lossy bosonic modes."""

from ._core import (
    EvolveInfo,
    SimConfig,
    __version__,
    coincidence_rate,
    evolve,
    integrate,
    mode_occupation,
    number_state_density,
    thermal_density,
    trace_distance,
)

__all__ = [
    "EvolveInfo",
    "SimConfig",
    "__version__",
    "coincidence_rate",
    "evolve",
    "integrate",
    "mode_occupation",
    "number_state_density",
    "thermal_density",
    "trace_distance",
]
