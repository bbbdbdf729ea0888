"""Simulation of one-dimensional G-Brownian motion under volatility scenarios.

A scenario is a piecewise-constant volatility control ``a`` with values in
``[sigma_lo, sigma_hi]``. Under that control the canonical process is
``B = int a dW`` and its quadratic variation is ``<B> = int a^2 ds``.
Every scenario gives one classical law; the sublinear expectation is the
supremum over them.

Random numbers come from Philox streams keyed by ``(seed, stream)``, so each
(scenario, seed) sample is reproducible and independent of evaluation order.
"""

import csv
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import ParameterError
from .path_core import GridPath, TimeGrid

CONSTANT_LO = "constant_lo"
CONSTANT_HI = "constant_hi"
IID_UNIFORM = "iid_uniform"
BANG_BANG = "bang_bang_random"
CONTROL_KINDS = (CONSTANT_LO, CONSTANT_HI, IID_UNIFORM, BANG_BANG)

_STREAM_INCREMENTS = 0
_STREAM_CONTROL = 1
_STREAM_BATCH = 2


def rng_for(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator for a ``(seed, stream)`` key."""
    if int(seed) != seed or seed < 0:
        raise ParameterError(f"seeds must be non-negative integers, got {seed!r}")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), stream])))


@dataclass(frozen=True)
class UncertaintyInterval:
    sigma_lo: float
    sigma_hi: float

    def __post_init__(self):
        if not (0.0 <= self.sigma_lo <= self.sigma_hi and self.sigma_hi > 0.0):
            raise ParameterError(
                f"need 0 <= sigma_lo <= sigma_hi, sigma_hi > 0; got [{self.sigma_lo}, {self.sigma_hi}]"
            )

    @property
    def classical(self) -> bool:
        return self.sigma_lo == self.sigma_hi


def _check_kind(kind):
    if kind not in CONTROL_KINDS:
        raise ParameterError(f"unknown control kind {kind!r}; expected one of {CONTROL_KINDS}")


def draw_controls(kind: str, interval: UncertaintyInterval, shape, rng: np.random.Generator) -> np.ndarray:
    """Volatility values of the given shape for one scenario kind."""
    _check_kind(kind)
    lo, hi = interval.sigma_lo, interval.sigma_hi
    if kind == CONSTANT_LO:
        return np.full(shape, lo)
    if kind == CONSTANT_HI:
        return np.full(shape, hi)
    if kind == IID_UNIFORM:
        return rng.uniform(lo, hi, size=shape)
    return np.where(rng.random(size=shape) < 0.5, lo, hi)


class VolatilityControl:
    __slots__ = ("grid", "a_values", "kind", "interval")

    def __init__(self, grid: TimeGrid, a_values, kind: str, interval: UncertaintyInterval):
        _check_kind(kind)
        a = np.array(a_values, dtype=float)
        if a.shape != (grid.n_steps,):
            raise ParameterError(f"expected {grid.n_steps} control values, got shape {a.shape}")
        if np.any(a < interval.sigma_lo) or np.any(a > interval.sigma_hi):
            raise ParameterError("control values leave the uncertainty interval")
        a.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "a_values", a)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "interval", interval)

    def __setattr__(self, name, value):
        raise AttributeError("VolatilityControl is immutable")


class GBMSample:
    """One simulated ``(B, <B>)`` pair under a fixed control."""

    __slots__ = ("control", "w_increments", "b", "qv", "seed")

    def __init__(self, control, w_increments, b, qv, seed):
        object.__setattr__(self, "control", control)
        object.__setattr__(self, "w_increments", w_increments)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "qv", qv)
        object.__setattr__(self, "seed", seed)

    def __setattr__(self, name, value):
        raise AttributeError("GBMSample is immutable")

    @property
    def grid(self) -> TimeGrid:
        return self.control.grid

    @property
    def db(self) -> np.ndarray:
        return np.diff(self.b.values)

    @property
    def dq(self) -> np.ndarray:
        return np.diff(self.qv.values)


def sample_control(kind: str, interval: UncertaintyInterval, grid: TimeGrid, rng_seed: int) -> VolatilityControl:
    rng = rng_for(rng_seed, _STREAM_CONTROL)
    return VolatilityControl(grid, draw_controls(kind, interval, grid.n_steps, rng), kind, interval)


def _cumulate(steps):
    out = np.zeros(steps.shape[:-1] + (steps.shape[-1] + 1,))
    np.cumsum(steps, axis=-1, out=out[..., 1:])
    return out


def sample_gbm(control: VolatilityControl, rng_seed: int) -> GBMSample:
    grid = control.grid
    rng = rng_for(rng_seed, _STREAM_INCREMENTS)
    w = rng.standard_normal(grid.n_steps) * np.sqrt(grid.dt)
    w.setflags(write=False)
    a = control.a_values
    b = GridPath(grid, _cumulate(a * w))
    qv = GridPath(grid, _cumulate(a * a * grid.dt))
    return GBMSample(control, w, b, qv, int(rng_seed))


def sample_scenario(kind: str, interval: UncertaintyInterval, grid: TimeGrid, seed: int) -> GBMSample:
    """Control and path for one ``(kind, seed)`` pair."""
    return sample_gbm(sample_control(kind, interval, grid, seed), seed)


@dataclass(frozen=True)
class BatchSample:
    """Many independent paths of one scenario, as ``(n_paths, n_steps)`` arrays."""

    grid: TimeGrid
    kind: str
    a: np.ndarray
    db: np.ndarray
    dq: np.ndarray

    @property
    def b(self) -> np.ndarray:
        return _cumulate(self.db)

    @property
    def qv(self) -> np.ndarray:
        return _cumulate(self.dq)

    @property
    def terminal(self) -> np.ndarray:
        return self.db.sum(axis=1)


def simulate_batch(kind: str, interval: UncertaintyInterval, grid: TimeGrid, n_paths: int, seed: int) -> BatchSample:
    """Vectorised sampling of ``n_paths`` paths from a single stream."""
    if n_paths < 1:
        raise ParameterError("n_paths must be positive")
    rng = rng_for(seed, _STREAM_BATCH)
    shape = (n_paths, grid.n_steps)
    a = draw_controls(kind, interval, shape, rng)
    w = rng.standard_normal(shape) * np.sqrt(grid.dt)
    return BatchSample(grid, kind, a, a * w, a * a * grid.dt)


def _left_values(integrand: Union[GridPath, Sequence[float]], grid: TimeGrid) -> np.ndarray:
    if isinstance(integrand, GridPath):
        if integrand.grid != grid:
            raise ParameterError("integrand and sample live on different grids")
        return integrand.values[:-1]
    eta = np.asarray(integrand, dtype=float)
    if eta.shape != (grid.n_steps,):
        raise ParameterError(f"expected {grid.n_steps} cell values, got shape {eta.shape}")
    return eta


def ito_integral(integrand, sample: GBMSample) -> float:
    """Left-point sum ``sum_i eta_{t_i} (B_{t_{i+1}} - B_{t_i})``."""
    eta = _left_values(integrand, sample.grid)
    return float(np.dot(eta, sample.db))


def qv_bracket(y: GridPath, b: GridPath) -> float:
    """Discrete covariation ``sum_i dY_i dB_i`` on the common grid."""
    if y.grid != b.grid:
        raise ParameterError("paths live on different grids")
    return float(np.dot(y.increments(), b.increments()))


def write_sample_csv(sample: GBMSample, path, header_lines=()):
    """Export ``t, a, B, qv`` columns; ``a`` on a node is the control of the cell it starts."""
    t = sample.grid.nodes()
    a = np.append(sample.control.a_values, np.nan)
    with open(path, "w", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(["t", "a", "B", "qv"])
        for row in zip(t, a, sample.b.values, sample.qv.values):
            writer.writerow([repr(float(v)) for v in row])
