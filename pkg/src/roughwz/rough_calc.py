"""Controlled paths and the compensated Riemann-sum (Gubinelli) integral."""

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import ParameterError
from .fields import ScalarField
from .kernels import level2_prefix
from .path_core import GridPath, RoughPath, holder_norm, pair_gaps
from .rates import RateFit, fit_rate

EXACT_DEFECT = 1e-12


class ControlledPath:
    """A pair ``(Y, Y')`` controlled by a reference rough path."""

    __slots__ = ("y", "y_prime", "reference")

    def __init__(self, y: GridPath, y_prime: GridPath, reference: RoughPath):
        if y.grid != reference.grid or y_prime.grid != reference.grid:
            raise ParameterError("controlled path and reference must share a grid")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "y_prime", y_prime)
        object.__setattr__(self, "reference", reference)

    def __setattr__(self, name, value):
        raise AttributeError("ControlledPath is immutable")

    def remainder(self, s_idx: int, t_idx: int) -> float:
        """``R_{s,t} = Y_{s,t} - Y'_s X_{s,t}``."""
        y = self.y.values
        x = self.reference.first.values
        return float(y[t_idx] - y[s_idx] - self.y_prime.values[s_idx] * (x[t_idx] - x[s_idx]))

    def remainder_norm(self, exact: Optional[bool] = None) -> float:
        """``||R^Y||_{2 alpha}`` over the grid-pair set used by the Hölder norms."""
        grid = self.y.grid
        y, yp, x = self.y.values, self.y_prime.values, self.reference.first.values
        two_alpha = 2 * self.reference.alpha
        best = 0.0
        for g in pair_gaps(grid.n_steps, exact):
            r = y[g:] - y[:-g] - yp[:-g] * (x[g:] - x[:-g])
            best = max(best, float(np.max(np.abs(r))) / (g * grid.dt) ** two_alpha)
        return best

    def seminorm(self, exact: Optional[bool] = None) -> float:
        """``||Y'||_alpha + ||R^Y||_{2 alpha}``."""
        return holder_norm(self.y_prime, self.reference.alpha, exact) + self.remainder_norm(exact)

    def scaled(self, c: float) -> "ControlledPath":
        grid = self.y.grid
        return ControlledPath(GridPath(grid, c * self.y.values), GridPath(grid, c * self.y_prime.values), self.reference)

    def __add__(self, other: "ControlledPath") -> "ControlledPath":
        grid = self.y.grid
        return ControlledPath(
            GridPath(grid, self.y.values + other.y.values),
            GridPath(grid, self.y_prime.values + other.y_prime.values),
            self.reference,
        )


def make_controlled(y_values, y_prime_values, reference: RoughPath) -> ControlledPath:
    grid = reference.grid
    n = grid.n_steps + 1
    if len(y_values) != n or len(y_prime_values) != n:
        raise ParameterError(f"expected {n} values for Y and Y', got {len(y_values)} and {len(y_prime_values)}")
    return ControlledPath(GridPath(grid, y_values), GridPath(grid, y_prime_values), reference)


def compose_field(f: ScalarField, cp: ControlledPath) -> ControlledPath:
    """``(f(Y), f'(Y) Y')``."""
    y = cp.y.values
    grid = cp.y.grid
    return ControlledPath(
        GridPath(grid, f.eval(y)), GridPath(grid, f.d1(y) * cp.y_prime.values), cp.reference
    )


def compensated_terms(cp: ControlledPath, rough: RoughPath) -> np.ndarray:
    """Per-cell terms ``Y_k dX_k + Y'_k XX_k`` of the compensated sum."""
    if cp.y.grid != rough.grid:
        raise ParameterError("controlled path and rough path must share a grid")
    y = cp.y.values[:-1]
    yp = cp.y_prime.values[:-1]
    return y * rough.first.increments() + yp * rough.second.step_blocks


def gubinelli_integral(cp: ControlledPath, rough: RoughPath, s_idx: int = 0, t_idx: Optional[int] = None) -> float:
    """Compensated Riemann sum over every grid cell between ``s_idx`` and ``t_idx``."""
    n = rough.grid.n_steps
    if t_idx is None:
        t_idx = n
    if not 0 <= s_idx <= t_idx <= n:
        raise ParameterError(f"need 0 <= s_idx <= t_idx <= {n}, got ({s_idx}, {t_idx})")
    return float(np.sum(compensated_terms(cp, rough)[s_idx:t_idx]))


@dataclass(frozen=True)
class ExponentReport:
    gaps: Tuple[int, ...]
    widths: Tuple[float, ...]
    defects: Tuple[float, ...]
    fit: RateFit

    @property
    def exact(self) -> bool:
        return all(d < EXACT_DEFECT for d in self.defects)

    @property
    def slope(self) -> Optional[float]:
        return None if self.exact else self.fit.slope

    def rows(self):
        return [(g, w, d) for g, w, d in zip(self.gaps, self.widths, self.defects)]


def window_defects(cp: ControlledPath, rough: RoughPath, gap: int) -> np.ndarray:
    """``|int_s^{s+h} Y dX - Y_s X_{s,s+h} - Y'_s XX_{s,s+h}|`` for every window start ``s``."""
    x = rough.first.values
    total = np.concatenate(([0.0], np.cumsum(compensated_terms(cp, rough))))
    prefix = level2_prefix(x, rough.second.step_blocks)
    g = gap
    integral = total[g:] - total[:-g]
    xx = prefix[g:] - prefix[:-g] - x[:-g] * (x[g:] - x[:-g])
    local = cp.y.values[:-g] * (x[g:] - x[:-g]) + cp.y_prime.values[:-g] * xx
    return np.abs(integral - local)


def default_gap_ladder(n_steps: int, exponents=range(4, 10)) -> Sequence[int]:
    """Window widths ``2^-k`` of the horizon, in grid cells, that fit on the grid."""
    gaps = [n_steps >> k for k in exponents if n_steps >> k >= 1 and n_steps % (1 << k) == 0]
    if len(gaps) < 2:
        raise ParameterError(f"grid with {n_steps} cells too coarse for a window ladder")
    return gaps


def local_error_exponent(cp: ControlledPath, rough: RoughPath, gaps: Optional[Sequence[int]] = None) -> ExponentReport:
    """Fit the exponent of the worst local defect against window width.

    For a controlled path the defect over ``[s, t]`` is bounded by a constant
    times ``|t - s|^{3 alpha}``. A report whose defects all vanish is marked
    ``exact`` and carries no slope.
    """
    n = rough.grid.n_steps
    if gaps is None:
        gaps = default_gap_ladder(n)
    gaps = sorted(int(g) for g in gaps)
    if gaps[0] < 1 or gaps[-1] > n:
        raise ParameterError(f"window gaps must lie in 1..{n}")
    defects = [float(np.max(window_defects(cp, rough, g))) for g in gaps]
    widths = [g * rough.grid.dt for g in gaps]
    fit = fit_rate(widths, defects, floor=EXACT_DEFECT)
    return ExponentReport(tuple(gaps), tuple(widths), tuple(defects), fit)
