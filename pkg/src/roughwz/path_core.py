"""Grid paths, Chen-composed second levels, Hölder norms and rough distances.

All paths live on uniform grids. A second level is stored as one block per
grid cell; any two-parameter value ``eval(s, t)`` is obtained by Chen
composition, so Chen's identity holds by construction.

Suprema over ``s < t`` are taken over grid pairs. Up to
:data:`EXACT_PAIR_LIMIT` cells every pair is visited; above it only pairs
whose index gap is a power of two (plus the full span) are used, and
:func:`pair_mode` reports ``"dyadic"`` so callers can flag the approximation.
"""

from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

import numpy as np

from . import kernels
from .errors import ParameterError

EXACT_PAIR_LIMIT = 4096
ALGEBRAIC_TOL = 1e-12
ALGEBRAIC_TOL_LARGE = 1e-9


def algebraic_tol(n_steps: int) -> float:
    """Tolerance for exact algebraic identities on a grid of ``n_steps`` cells."""
    return ALGEBRAIC_TOL if n_steps <= 10_000 else ALGEBRAIC_TOL_LARGE


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class TimeGrid:
    n_steps: int
    t_start: float = 0.0
    t_end: float = 1.0

    def __post_init__(self):
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise ParameterError(f"n_steps must be a positive integer, got {self.n_steps}")
        if not self.t_end > self.t_start:
            raise ParameterError(f"empty time interval [{self.t_start}, {self.t_end}]")
        object.__setattr__(self, "n_steps", int(self.n_steps))

    @property
    def dt(self) -> float:
        return (self.t_end - self.t_start) / self.n_steps

    @property
    def span(self) -> float:
        return self.t_end - self.t_start

    def node(self, i: int) -> float:
        if not 0 <= i <= self.n_steps:
            raise ParameterError(f"node index {i} outside 0..{self.n_steps}")
        return self.t_start + i * self.dt

    def nodes(self) -> np.ndarray:
        return self.t_start + self.dt * np.arange(self.n_steps + 1)

    def coarsen(self, n_coarse: int) -> "TimeGrid":
        """Grid over the same interval with ``n_coarse`` cells; must divide ``n_steps``."""
        if n_coarse < 1 or self.n_steps % n_coarse:
            raise ParameterError(f"{n_coarse} does not divide n_steps={self.n_steps}")
        return TimeGrid(n_coarse, self.t_start, self.t_end)


def pair_mode(n_steps: int, exact: Optional[bool] = None) -> str:
    if exact is None:
        exact = n_steps <= EXACT_PAIR_LIMIT
    return "exact" if exact else "dyadic"


def pair_gaps(n_steps: int, exact: Optional[bool] = None) -> np.ndarray:
    """Index gaps ``t - s`` visited by the Hölder sups."""
    if pair_mode(n_steps, exact) == "exact":
        return np.arange(1, n_steps + 1, dtype=np.int64)
    gaps = []
    g = 1
    while g < n_steps:
        gaps.append(g)
        g *= 2
    gaps.append(n_steps)
    return np.array(gaps, dtype=np.int64)


class GridPath:
    """Real-valued path sampled at the nodes of a :class:`TimeGrid`."""

    __slots__ = ("grid", "values")

    def __init__(self, grid: TimeGrid, values):
        values = _frozen(values)
        if values.ndim != 1 or values.shape[0] != grid.n_steps + 1:
            raise ParameterError(
                f"expected {grid.n_steps + 1} values on this grid, got shape {values.shape}"
            )
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    def __setattr__(self, name, value):
        raise AttributeError("GridPath is immutable")

    def __len__(self):
        return self.values.shape[0]

    def __repr__(self):
        return f"GridPath(n_steps={self.grid.n_steps}, end={self.values[-1]:.6g})"

    def increment(self, s_idx: int, t_idx: int) -> float:
        return float(self.values[t_idx] - self.values[s_idx])

    def increments(self) -> np.ndarray:
        return np.diff(self.values)

    def restrict(self, every: int) -> "GridPath":
        """Sub-sample every ``every``-th node (a coarser grid on the same interval)."""
        grid = self.grid.coarsen(self.grid.n_steps // every)
        return GridPath(grid, self.values[::every])

    def __sub__(self, other: "GridPath") -> "GridPath":
        _check_same_grid(self.grid, other.grid)
        return GridPath(self.grid, self.values - other.values)


class Level2:
    """Second level of a 1-D rough path, stored as per-cell blocks."""

    __slots__ = ("grid", "step_blocks", "first")

    def __init__(self, first: GridPath, step_blocks):
        blocks = _frozen(step_blocks)
        if blocks.shape != (first.grid.n_steps,):
            raise ParameterError(
                f"expected {first.grid.n_steps} step blocks, got shape {blocks.shape}"
            )
        object.__setattr__(self, "grid", first.grid)
        object.__setattr__(self, "step_blocks", blocks)
        object.__setattr__(self, "first", first)

    def __setattr__(self, name, value):
        raise AttributeError("Level2 is immutable")

    def eval(self, s_idx: int, t_idx: int) -> float:
        return eval_level2(self, s_idx, t_idx)


class RoughPath:
    """A first-level path together with a Chen-composed second level."""

    __slots__ = ("first", "second", "alpha")

    def __init__(self, first: GridPath, second: Level2, alpha: float):
        if second.first is not first and not np.array_equal(second.first.values, first.values):
            raise ParameterError("second level is bound to a different first level")
        # Closed at 1/2 so smooth drivers (alpha = 1/2) are representable.
        if not 1.0 / 3.0 < alpha <= 0.5:
            raise ParameterError(f"alpha must lie in (1/3, 1/2], got {alpha}")
        object.__setattr__(self, "first", first)
        object.__setattr__(self, "second", second)
        object.__setattr__(self, "alpha", float(alpha))

    def __setattr__(self, name, value):
        raise AttributeError("RoughPath is immutable")

    @classmethod
    def from_blocks(cls, first: GridPath, blocks, alpha: float) -> "RoughPath":
        return cls(first, Level2(first, blocks), alpha)

    @property
    def grid(self) -> TimeGrid:
        return self.first.grid

    def eval2(self, s_idx: int, t_idx: int) -> float:
        return eval_level2(self.second, s_idx, t_idx)


def _check_same_grid(a: TimeGrid, b: TimeGrid):
    if a != b:
        raise ParameterError(f"grid mismatch: {a} vs {b}")


def _check_alpha(alpha, upper=1.0):
    if not 0.0 < alpha <= upper:
        raise ParameterError(f"Hölder exponent must lie in (0, {upper}], got {alpha}")


def holder_norm(path: GridPath, alpha: float, exact: Optional[bool] = None) -> float:
    """Discrete alpha-Hölder semi-norm ``max |X_{s,t}| / (t-s)^alpha`` over grid pairs."""
    _check_alpha(alpha)
    grid = path.grid
    return kernels.holder_sup(path.values, grid.dt, alpha, pair_gaps(grid.n_steps, exact))


def holder_norm2(level2: Level2, two_alpha: float, exact: Optional[bool] = None) -> float:
    """Discrete ``two_alpha``-Hölder norm of a second level over grid pairs."""
    _check_alpha(two_alpha, upper=2.0)
    grid = level2.grid
    zeros = np.zeros_like(level2.first.values)
    return kernels.level2_diff_sup(
        level2.first.values,
        level2.step_blocks,
        zeros,
        zeros[:-1],
        grid.dt,
        two_alpha,
        pair_gaps(grid.n_steps, exact),
    )


def eval_level2(level2: Level2, s_idx: int, t_idx: int) -> float:
    """Second-level increment over ``[s, t]`` by one left-to-right Chen pass."""
    n = level2.grid.n_steps
    if not (0 <= s_idx <= n and 0 <= t_idx <= n):
        raise ParameterError(f"indices ({s_idx}, {t_idx}) outside 0..{n}")
    if s_idx > t_idx:
        raise ParameterError(f"s_idx={s_idx} > t_idx={t_idx}")
    return kernels.chen_eval(level2.first.values, level2.step_blocks, s_idx, t_idx)


def chen_defect(rough: RoughPath, probe_triples: Iterable[Tuple[int, int, int]]) -> float:
    """Largest violation of Chen's identity over the given ``(s, u, t)`` triples.

    Only ``rough.first`` and ``rough.eval2`` are used, so a tabulated second
    level that does not come from blocks can be checked too.
    """
    x = rough.first.values
    worst = 0.0
    for s, u, t in probe_triples:
        if not s <= u <= t:
            raise ParameterError(f"triple ({s}, {u}, {t}) is not ordered")
        lhs = rough.eval2(s, t) - rough.eval2(s, u) - rough.eval2(u, t)
        rhs = (x[u] - x[s]) * (x[t] - x[u])
        worst = max(worst, abs(lhs - rhs))
    return worst


def random_triples(n_steps: int, count: int, seed: int = 0) -> np.ndarray:
    """``count`` random ordered index triples on a grid, for Chen probes."""
    rng = np.random.default_rng(seed)
    triples = np.sort(rng.integers(0, n_steps + 1, size=(count, 3)), axis=1)
    return triples


def rough_seminorm(rough: RoughPath, exact: Optional[bool] = None) -> float:
    """``||X||_alpha + sqrt(||XX||_{2 alpha})``."""
    a = rough.alpha
    return holder_norm(rough.first, a, exact) + float(np.sqrt(holder_norm2(rough.second, 2 * a, exact)))


def rough_distance_parts(a: RoughPath, b: RoughPath, exact: Optional[bool] = None) -> Tuple[float, float]:
    """Level-one and level-two parts of the inhomogeneous rough distance.

    The level-two difference is taken pairwise, ``eval_a(s,t) - eval_b(s,t)``;
    the difference itself is not a rough path.
    """
    _check_same_grid(a.grid, b.grid)
    if a.alpha != b.alpha:
        raise ParameterError(f"alpha mismatch: {a.alpha} vs {b.alpha}")
    grid = a.grid
    gaps = pair_gaps(grid.n_steps, exact)
    xa, xb = a.first.values, b.first.values
    d1 = kernels.holder_sup(xa - xb, grid.dt, a.alpha, gaps)
    d2 = kernels.level2_diff_sup(
        xa, a.second.step_blocks, xb, b.second.step_blocks, grid.dt, 2 * a.alpha, gaps
    )
    return d1, d2


def rough_distance(a: RoughPath, b: RoughPath, exact: Optional[bool] = None) -> float:
    """``||X - Y||_alpha + ||XX - YY||_{2 alpha}`` over grid pairs."""
    d1, d2 = rough_distance_parts(a, b, exact)
    return d1 + d2


def canonical_lift(path: GridPath, alpha: float) -> RoughPath:
    """Lift whose cell blocks are ``dX**2 / 2`` (geometric, 1-D)."""
    dx = path.increments()
    return RoughPath.from_blocks(path, 0.5 * dx * dx, alpha)


def linear_path(grid: TimeGrid, slope: float, intercept: float = 0.0) -> GridPath:
    return GridPath(grid, intercept + slope * (grid.nodes() - grid.t_start))
