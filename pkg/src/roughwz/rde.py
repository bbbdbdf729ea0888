"""Rough differential equations ``dY = f(Y) dB + g(Y) d<B> + h(Y) dt``.

Solved by the explicit second-order (Davie) step

    Y_{k+1} = Y_k + f(Y_k) dB_k + f'(Y_k) f(Y_k) BB_k + g(Y_k) d<B>_k + h(Y_k) dt

where ``BB_k`` is the cell block of the driving rough path.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DivergenceError, ParameterError
from .fields import ZERO, ScalarField
from .path_core import GridPath, RoughPath, TimeGrid, holder_norm, rough_distance, rough_seminorm
from .rough_calc import ControlledPath

DIVERGENCE_GUARD = 1e6


@dataclass(frozen=True)
class RDEProblem:
    rough: RoughPath
    qv: GridPath
    f: ScalarField
    g: ScalarField = ZERO
    h: ScalarField = ZERO
    xi: float = 0.0

    def __post_init__(self):
        if self.qv.grid != self.rough.grid:
            raise ParameterError("quadratic variation and driver live on different grids")

    @property
    def grid(self) -> TimeGrid:
        return self.rough.grid

    def window(self, s_idx: int, t_idx: int, xi: float) -> "RDEProblem":
        """The same equation restricted to nodes ``s_idx..t_idx``, restarted at ``xi``."""
        grid = self.grid
        if not 0 <= s_idx < t_idx <= grid.n_steps:
            raise ParameterError(f"bad window ({s_idx}, {t_idx})")
        sub = TimeGrid(t_idx - s_idx, grid.node(s_idx), grid.node(t_idx))
        first = GridPath(sub, self.rough.first.values[s_idx : t_idx + 1])
        blocks = self.rough.second.step_blocks[s_idx:t_idx]
        rough = RoughPath.from_blocks(first, blocks, self.rough.alpha)
        qv = GridPath(sub, self.qv.values[s_idx : t_idx + 1])
        return RDEProblem(rough, qv, self.f, self.g, self.h, xi)


def raise_divergence(bad_path: int, bad_step: int, what: str):
    where = f"step {bad_step}" if bad_path <= 0 else f"path {bad_path}, step {bad_step}"
    raise DivergenceError(
        f"{what} left |y| <= {DIVERGENCE_GUARD:g} at {where}", step=bad_step, path=bad_path
    )


def solve_rde(problem: RDEProblem) -> GridPath:
    grid = problem.grid
    rough = problem.rough
    out, bad_path, bad_step = kernels.taylor2(
        np.array([problem.xi]),
        rough.first.increments()[None, :],
        np.asarray(rough.second.step_blocks)[None, :],
        problem.qv.increments()[None, :],
        grid.dt,
        problem.f.spec,
        problem.g.spec,
        problem.h.spec,
        DIVERGENCE_GUARD,
    )
    if bad_step >= 0:
        raise_divergence(bad_path, bad_step, "RDE solution")
    return GridPath(grid, out[0])


def solution_controlled(problem: RDEProblem, y: GridPath) -> ControlledPath:
    """The controlled structure ``(Y, f(Y))`` of a solution."""
    return ControlledPath(y, GridPath(y.grid, problem.f.eval(y.values)), problem.rough)


@dataclass(frozen=True)
class ContinuityReport:
    solution_distance: float
    input_distance: float

    @property
    def ratio(self) -> float:
        if self.input_distance == 0.0:
            return 0.0 if self.solution_distance == 0.0 else np.inf
        return self.solution_distance / self.input_distance


def itolyons_continuity_probe(p1: RDEProblem, p2: RDEProblem, bound: float, exact=None) -> ContinuityReport:
    """Compare ``||Y - Y~||_alpha`` with ``|xi - xi~| + rho_alpha(X, X~)``.

    The Lipschitz estimate is only local, so drivers whose rough-path
    semi-norm exceeds ``bound`` are refused.
    """
    if p1.rough.alpha != p2.rough.alpha:
        raise ParameterError("problems use different alpha")
    for p in (p1, p2):
        norm = rough_seminorm(p.rough, exact)
        if norm > bound:
            raise ParameterError(f"driver semi-norm {norm:.4g} exceeds declared bound {bound:.4g}")
    y1 = solve_rde(p1)
    y2 = solve_rde(p2)
    num = holder_norm(y1 - y2, p1.rough.alpha, exact)
    den = abs(p1.xi - p2.xi) + rough_distance(p1.rough, p2.rough, exact)
    return ContinuityReport(num, den)
