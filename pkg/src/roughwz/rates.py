"""Log-log least-squares rate fits."""

from dataclasses import dataclass, asdict
from typing import Optional, Sequence

import numpy as np

from .errors import ParameterError

EXACT_FLOOR = 1e-14


@dataclass(frozen=True)
class RateFit:
    slope: Optional[float]
    intercept: Optional[float]
    r_squared: Optional[float]
    n_used: int
    n_excluded: int

    @property
    def exact(self) -> bool:
        """Every error was below the exact-zero floor; no slope exists."""
        return self.n_used == 0

    def to_dict(self):
        d = asdict(self)
        d["exact"] = self.exact
        return d


def fit_rate(ns: Sequence[float], errors: Sequence[float], floor: float = EXACT_FLOOR) -> RateFit:
    """OLS of ``log(error)`` on ``log(n)``; rows with ``error < floor`` count as exact and are dropped."""
    ns = np.asarray(ns, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if ns.shape != errors.shape or ns.ndim != 1:
        raise ParameterError("ns and errors must be 1-D sequences of equal length")
    if np.any(ns <= 0) or np.any(~np.isfinite(errors)) or np.any(errors < 0):
        raise ParameterError("need positive ns and finite nonnegative errors")
    keep = errors >= floor
    n_used = int(keep.sum())
    n_excluded = int((~keep).sum())
    if n_used == 0:
        return RateFit(None, None, None, 0, n_excluded)
    if n_used == 1:
        return RateFit(None, None, None, 1, n_excluded)
    x = np.log(ns[keep])
    y = np.log(errors[keep])
    if np.ptp(x) == 0:
        raise ParameterError("rate fit needs at least two distinct n")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return RateFit(float(slope), float(intercept), r2, n_used, n_excluded)
