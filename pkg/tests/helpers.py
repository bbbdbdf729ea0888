"""Hand-built samples for deterministic oracles."""

import numpy as np

from roughwz.gsim import GBMSample, UncertaintyInterval, VolatilityControl
from roughwz.path_core import GridPath, TimeGrid


def fixed_sample(b_values, qv_values=None, t_end=1.0):
    """A GBMSample whose B (and <B>) are given node values."""
    b_values = np.asarray(b_values, dtype=float)
    n = b_values.size - 1
    grid = TimeGrid(n, 0.0, t_end)
    if qv_values is None:
        qv_values = np.zeros(n + 1)
    control = VolatilityControl(grid, np.ones(n), "constant_hi", UncertaintyInterval(1.0, 1.0))
    return GBMSample(control, np.diff(b_values), GridPath(grid, b_values), GridPath(grid, qv_values), 0)
