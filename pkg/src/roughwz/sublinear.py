"""Monte Carlo estimates of the upper expectation and of the upper capacity.

The upper expectation is a supremum over all volatility controls; here it is
estimated by the largest mean over a finite family of scenarios, which is a
lower-bound estimator of the true supremum. Reports say so explicitly.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Sequence

import numpy as np

from .errors import ParameterError
from .gsim import CONTROL_KINDS, UncertaintyInterval, simulate_batch
from .path_core import TimeGrid

ESTIMATOR_LABEL = "lower-bound estimator over a finite control family"
MIN_PATHS = 100

# name -> (function of x, convex, concave)
CATALOGUE = {
    "x2": (lambda x: x * x, True, False),
    "x4": (lambda x: x**4, True, False),
    "abs": (np.abs, True, False),
    "-x2": (lambda x: -(x * x), False, True),
    "-x4": (lambda x: -(x**4), False, True),
    "-abs": (lambda x: -np.abs(x), False, True),
    "x": (lambda x: x, True, True),
}


@dataclass
class ScenarioStat:
    mean: float
    stderr: float
    n: int


@dataclass
class EstimateReport:
    scenarios: Dict[str, ScenarioStat]
    seed: int
    label: str = ESTIMATOR_LABEL
    meta: Dict[str, object] = field(default_factory=dict)

    @property
    def argmax_scenario(self) -> str:
        # ties resolved by scenario order, which is deterministic
        return max(self.scenarios, key=lambda k: self.scenarios[k].mean)

    @property
    def estimator(self) -> float:
        return self.scenarios[self.argmax_scenario].mean

    @property
    def stderr(self) -> float:
        return self.scenarios[self.argmax_scenario].stderr

    def to_json(self):
        out = {k: {"mean": s.mean, "stderr": s.stderr, "n": s.n} for k, s in self.scenarios.items()}
        return {
            "scenarios": out,
            "estimator": self.estimator,
            "argmax_scenario": self.argmax_scenario,
            "label": self.label,
            "seed": self.seed,
            **self.meta,
        }


def _resolve(phi):
    if isinstance(phi, str):
        if phi not in CATALOGUE:
            raise ParameterError(f"unknown payoff {phi!r}; catalogue is {sorted(CATALOGUE)}")
        return CATALOGUE[phi][0]
    return phi


def _check(scenario_kinds, paths_per_scenario):
    if paths_per_scenario < MIN_PATHS:
        raise ParameterError(f"need at least {MIN_PATHS} paths per scenario, got {paths_per_scenario}")
    if not scenario_kinds:
        raise ParameterError("no scenarios given")
    for k in scenario_kinds:
        if k not in CONTROL_KINDS:
            raise ParameterError(f"unknown scenario {k!r}")


def _scenario_seed(seed: int, index: int) -> int:
    return seed * 1009 + index


def estimate_upper_expectation(
    phi,
    interval: UncertaintyInterval,
    scenario_kinds: Sequence[str] = CONTROL_KINDS,
    paths_per_scenario: int = 10_000,
    seed: int = 0,
    n_steps: int = 64,
    on: str = "terminal",
) -> EstimateReport:
    """Per-scenario means of ``phi`` and their maximum.

    ``phi`` is a catalogue name or a vectorised callable. With
    ``on="terminal"`` it receives ``B_T`` as a 1-D array; with ``on="path"``
    it receives the ``(n_paths, n_steps + 1)`` array of ``B`` and must return
    one value per row.
    """
    _check(scenario_kinds, paths_per_scenario)
    if on not in ("terminal", "path"):
        raise ParameterError(f"on must be 'terminal' or 'path', got {on!r}")
    fn = _resolve(phi)
    grid = TimeGrid(n_steps)
    stats = {}
    for i, kind in enumerate(scenario_kinds):
        batch = simulate_batch(kind, interval, grid, paths_per_scenario, _scenario_seed(seed, i))
        arg = batch.terminal if on == "terminal" else batch.b
        vals = np.asarray(fn(arg), dtype=float)
        if vals.shape != (paths_per_scenario,):
            vals = np.broadcast_to(vals, (paths_per_scenario,))
        # constant payoffs must come back exactly, without summation rounding
        mean = float(vals[0]) if np.all(vals == vals[0]) else float(vals.mean())
        stats[kind] = ScenarioStat(mean, float(vals.std(ddof=1) / math.sqrt(vals.size)), int(vals.size))
    return EstimateReport(stats, seed, meta={"n_steps": n_steps, "on": on})


def gnormal_exact(phi_tag: str, interval: UncertaintyInterval) -> float:
    """Exact upper expectation of a catalogue payoff of a G-normal variable.

    Convex payoffs are evaluated under the Gaussian law with ``sigma_hi``,
    concave ones under ``sigma_lo``.
    """
    if phi_tag not in CATALOGUE:
        raise ParameterError(f"unknown payoff {phi_tag!r}")
    hi, lo = interval.sigma_hi, interval.sigma_lo
    abs_mean = math.sqrt(2.0 / math.pi)
    table = {
        "x2": hi**2,
        "x4": 3.0 * hi**4,
        "abs": hi * abs_mean,
        "-x2": -(lo**2),
        "-x4": -3.0 * lo**4,
        "-abs": -lo * abs_mean,
        "x": 0.0,
    }
    return table[phi_tag]


def is_convex(phi_tag: str) -> bool:
    return CATALOGUE[phi_tag][1]


def is_concave(phi_tag: str) -> bool:
    return CATALOGUE[phi_tag][2]


def capacity_estimate(
    event: Callable[[np.ndarray], np.ndarray],
    interval: UncertaintyInterval,
    scenario_kinds: Sequence[str] = CONTROL_KINDS,
    paths_per_scenario: int = 10_000,
    seed: int = 0,
    n_steps: int = 64,
    on: str = "terminal",
) -> EstimateReport:
    """Upper capacity of an event: the largest empirical frequency over scenarios.

    ``event`` maps ``B_T`` (or the path array) to booleans.
    """
    report = estimate_upper_expectation(
        lambda x: np.asarray(event(x), dtype=float),
        interval, scenario_kinds, paths_per_scenario, seed, n_steps, on,
    )
    report.meta["quantity"] = "capacity"
    return report
