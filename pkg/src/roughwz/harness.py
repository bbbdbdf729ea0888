"""Convergence experiments, rate fits and their CSV/JSON artifacts.

Each ``run_*`` function takes an :class:`ExperimentConfig` and returns a
:class:`ConvergenceReport`. Work is split into (scenario, seed-chunk) tasks
that are pure functions of the config; with ``workers > 1`` they run in a
process pool, and results are always merged in task order so outputs are
byte-identical regardless of scheduling.

Quasi-sure (all-path, all-scenario) statements cannot be checked on finite
samples; reports use per-scenario means or medians over seeds instead and
say so in their ``notes`` field.
"""

import csv
import json
import logging
import math
import subprocess
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .errors import ParameterError
from .gsim import BANG_BANG, CONSTANT_HI, CONSTANT_LO, CONTROL_KINDS, UncertaintyInterval, sample_scenario
from .lifts import pw_linear, pw_linear_lift, strat_lift
from .path_core import GridPath, TimeGrid, holder_norm, pair_mode, rough_distance_parts
from .rates import RateFit, fit_rate
from .rde import RDEProblem, solve_rde
from .rough_calc import compose_field, default_gap_ladder, local_error_exponent, make_controlled
from .schemes import coeffs_from_name, default_m_sub, reference_batch, wz_batch

log = logging.getLogger(__name__)

QS_NOTE = (
    "quasi-sure statements are not reproducible on finite samples; "
    "reported values are per-scenario Monte Carlo means or medians over seeds"
)
MIN_FIT_POINTS = 4


def _ints(text) -> Tuple[int, ...]:
    if isinstance(text, str):
        return tuple(int(v) for v in text.replace(",", " ").split())
    return tuple(int(v) for v in text)


def _strs(text) -> Tuple[str, ...]:
    if isinstance(text, str):
        return tuple(v for v in text.replace(",", " ").split())
    return tuple(text)


@dataclass(frozen=True)
class ExperimentConfig:
    sigma_lo: float = 0.5
    sigma_hi: float = 1.0
    alpha: float = 0.4
    theta: float = 0.05
    n_fine: int = 4096
    ladder: Tuple[int, ...] = (4, 8, 16, 32, 64, 128, 256)
    seeds: int = 100
    seed_base: int = 0
    scenarios: Tuple[str, ...] = (CONSTANT_LO, CONSTANT_HI, BANG_BANG)
    coeffs: str = "sin"
    x0: float = 1.0
    m_sub: Optional[int] = None
    wz_metric: str = "terminal"
    exact_pairs: Optional[bool] = None
    workers: int = 1
    out: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "ladder", _ints(self.ladder))
        object.__setattr__(self, "scenarios", _strs(self.scenarios))
        self.interval  # validates sigma bounds
        if not 1.0 / 3.0 < self.alpha < 0.5:
            raise ParameterError(f"alpha must lie in (1/3, 1/2), got {self.alpha}")
        if not 0.0 < self.theta < 0.5 - self.alpha:
            raise ParameterError(f"need 0 < theta < 1/2 - alpha = {0.5 - self.alpha:g}, got {self.theta}")
        if self.n_fine < 1:
            raise ParameterError("n_fine must be positive")
        if not self.ladder:
            raise ParameterError("empty ladder")
        for n in self.ladder:
            if n < 1 or self.n_fine % n:
                raise ParameterError(f"ladder value {n} does not divide n_fine={self.n_fine}")
        if self.seeds < 1:
            raise ParameterError("need at least one seed")
        if self.seed_base < 0:
            raise ParameterError("seed_base must be nonnegative")
        if not self.scenarios:
            raise ParameterError("no scenarios given")
        for k in self.scenarios:
            if k not in CONTROL_KINDS:
                raise ParameterError(f"unknown scenario {k!r}; expected one of {CONTROL_KINDS}")
        if self.wz_metric not in ("terminal", "sup_t"):
            raise ParameterError(f"wz_metric must be 'terminal' or 'sup_t', got {self.wz_metric!r}")
        if self.workers < 1:
            raise ParameterError("workers must be at least 1")
        coeffs_from_name(self.coeffs)

    @property
    def interval(self) -> UncertaintyInterval:
        return UncertaintyInterval(self.sigma_lo, self.sigma_hi)

    @property
    def grid(self) -> TimeGrid:
        return TimeGrid(self.n_fine)

    @property
    def seed_list(self) -> List[int]:
        return list(range(self.seed_base, self.seed_base + self.seeds))

    def to_dict(self):
        # worker count is scheduling only; leaving it out keeps artifacts byte-stable
        d = asdict(self)
        d.pop("workers")
        d["ladder"] = list(self.ladder)
        d["scenarios"] = list(self.scenarios)
        return d


_CONFIG_FIELDS = {f.name: f for f in fields(ExperimentConfig)}


def _coerce(name, text):
    if name in ("ladder", "scenarios"):
        return text
    default = _CONFIG_FIELDS[name].default
    if name in ("m_sub",):
        return None if text.lower() in ("", "none") else int(text)
    if name == "exact_pairs":
        if text.lower() in ("", "none", "auto"):
            return None
        return text.lower() in ("1", "true", "yes")
    if name in ("out",):
        return text or None
    if isinstance(default, bool):
        return text.lower() in ("1", "true", "yes")
    if isinstance(default, int):
        return int(text)
    if isinstance(default, float):
        return float(text)
    return text


def load_config_file(path) -> Dict[str, object]:
    """Parse a flat ``key = value`` file; ``#`` starts a comment, dashes in keys are allowed."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"{path}:{lineno}: expected key=value")
        key, val = (p.strip() for p in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CONFIG_FIELDS:
            raise ParameterError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _coerce(key, val)
        except ValueError as exc:
            raise ParameterError(f"{path}:{lineno}: {exc}") from None
    return values


def make_config(file_values=None, **overrides) -> ExperimentConfig:
    merged = dict(file_values or {})
    merged.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**merged)


@dataclass
class ConvergenceReport:
    experiment: str
    config: ExperimentConfig
    rows: List[Tuple[str, str, int, int, str, float]]
    ns: List[int]
    series: List[float]
    fit: RateFit
    aggregate: str
    pair_mode: str = "exact"
    extra: Dict[str, object] = field(default_factory=dict)
    runtime: float = 0.0
    notes: str = QS_NOTE

    @property
    def slope(self) -> Optional[float]:
        return self.fit.slope

    @property
    def exact(self) -> bool:
        return self.fit.exact

    @property
    def fit_ok(self) -> bool:
        """Enough non-exact ladder points for a meaningful slope."""
        return self.fit.n_used >= MIN_FIT_POINTS

    def summary(self):
        return {
            "experiment": self.experiment,
            "version": version_stamp(),
            "config": self.config.to_dict(),
            "aggregate": self.aggregate,
            "ns": list(self.ns),
            "series": list(self.series),
            "fit": self.fit.to_dict(),
            "fit_points_ok": self.fit_ok,
            "holder_pairs": self.pair_mode,
            "extra": self.extra,
            "notes": self.notes,
        }


_VERSION = None


def version_stamp() -> str:
    """Package version, plus ``git describe`` output when run from a checkout."""
    global _VERSION
    if _VERSION is None:
        desc = None
        try:
            res = subprocess.run(
                ["git", "describe", "--always", "--dirty", "--tags"],
                cwd=Path(__file__).resolve().parent,
                capture_output=True, text=True, timeout=5,
            )
            if res.returncode == 0:
                desc = res.stdout.strip()
        except (OSError, subprocess.SubprocessError):
            pass
        _VERSION = f"{__version__}+g{desc}" if desc else __version__
    return _VERSION


# ---------------------------------------------------------------------------
# task fan-out


def _chunks(seq, size):
    return [seq[i : i + size] for i in range(0, len(seq), size)]


def _run_tasks(func, config: ExperimentConfig, chunk: int = 50):
    """Results of ``func(config, kind, seeds)`` over all tasks, in task order."""
    tasks = [(config, kind, seeds) for kind in config.scenarios for seeds in _chunks(config.seed_list, chunk)]
    if config.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(func, *zip(*tasks)))
    return [func(*t) for t in tasks]


def _run_rows(func, config: ExperimentConfig):
    rows = []
    for r in _run_tasks(func, config):
        rows.extend(r)
    return rows


def _stack(config: ExperimentConfig, kind: str, seeds: Sequence[int]):
    samples = [sample_scenario(kind, config.interval, config.grid, s) for s in seeds]
    db = np.stack([s.db for s in samples])
    dq = np.stack([s.dq for s in samples])
    return samples, db, dq


def _by(rows, metric):
    """``{(scenario, n): [values...]}`` for one metric, in row order."""
    out: Dict[Tuple[str, int], List[float]] = {}
    for _, kind, _, n, m, v in rows:
        if m == metric:
            out.setdefault((kind, n), []).append(v)
    return out


def _per_scenario(config, grouped, reducer):
    return {
        kind: [float(reducer(grouped[(kind, n)])) for n in config.ladder]
        for kind in config.scenarios
    }


def _scenario_fits(config, per_scenario):
    return {kind: fit_rate(config.ladder, vals).to_dict() for kind, vals in per_scenario.items()}


# ---------------------------------------------------------------------------
# Wong–Zakai L2 rate


def _wz_task(config: ExperimentConfig, kind: str, seeds):
    _, db, dq = _stack(config, kind, seeds)
    coeffs = coeffs_from_name(config.coeffs)
    dt = config.grid.dt
    ref = reference_batch(config.x0, db, dq, dt, coeffs)
    rows = []
    node_sums = {}
    for n in config.ladder:
        m = config.m_sub or default_m_sub(config.n_fine, n)
        y = wz_batch(config.x0, db, dq, dt, coeffs, n, m)
        if config.wz_metric == "terminal":
            err = (y[:, -1] - ref[:, -1]) ** 2
            metric = "sq_err"
        else:
            err_t = _common_node_sq_err(ref, y)
            node_sums[n] = err_t.sum(axis=0)
            err = err_t.max(axis=1)
            metric = "max_t_sq_err"
        for seed, e in zip(seeds, err):
            rows.append(("wong-zakai", kind, int(seed), int(n), metric, float(e)))
    return rows, node_sums


def _common_node_sq_err(ref, y):
    n_ref, n_y = ref.shape[1] - 1, y.shape[1] - 1
    if n_ref % n_y == 0:
        ref = ref[:, :: n_ref // n_y]
    elif n_y % n_ref == 0:
        y = y[:, :: n_y // n_ref]
    else:
        raise ParameterError("sub-grid and fine grid share no common nodes")
    return (y - ref) ** 2


def run_wz_l2(config: ExperimentConfig) -> ConvergenceReport:
    """Squared Wong–Zakai error against the fine reference, worst scenario mean per n.

    With ``wz_metric="sup_t"`` the per-scenario mean squared error is taken
    node-wise and then maximised over time, instead of read at ``T``.
    """
    t0 = time.perf_counter()
    results = _run_tasks(_wz_task, config)
    rows = [row for r, _ in results for row in r]
    if config.wz_metric == "terminal":
        per = _per_scenario(config, _by(rows, "sq_err"), np.mean)
    else:
        tasks = [kind for kind in config.scenarios for _ in _chunks(config.seed_list, 50)]
        per = {}
        for kind in config.scenarios:
            vals = []
            for n in config.ladder:
                total = sum(ns[n] for k, (_, ns) in zip(tasks, results) if k == kind)
                vals.append(float(np.max(total / config.seeds)))
            per[kind] = vals
    series = [max(per[k][i] for k in config.scenarios) for i in range(len(config.ladder))]
    report = ConvergenceReport(
        "wong-zakai", config, rows, list(config.ladder), series, fit_rate(config.ladder, series),
        aggregate="max over scenarios of mean squared error"
        + (" (terminal time)" if config.wz_metric == "terminal" else " (sup over time)"),
        extra={
            "per_scenario": per,
            "per_scenario_fit": _scenario_fits(config, per),
            "metric": config.wz_metric,
            "target_slope": -0.5,
        },
    )
    report.runtime = time.perf_counter() - t0
    return report


# ---------------------------------------------------------------------------
# lift distance rate


def _lift_task(config: ExperimentConfig, kind: str, seeds):
    rows = []
    for seed in seeds:
        sample = sample_scenario(kind, config.interval, config.grid, seed)
        strat = strat_lift(sample, config.alpha)
        for n in config.ladder:
            pw = pw_linear_lift(pw_linear(sample, n), config.alpha)
            d1, d2 = rough_distance_parts(strat, pw, config.exact_pairs)
            rows.append(("lift-distance", kind, int(seed), int(n), "dist_level1", d1))
            rows.append(("lift-distance", kind, int(seed), int(n), "dist_level2", d2))
            rows.append(("lift-distance", kind, int(seed), int(n), "rho", d1 + d2))
    return rows


def run_lift_distance(config: ExperimentConfig) -> ConvergenceReport:
    """Rough distance between the Stratonovich and polygonal lifts, median over seeds.

    The series is the worst scenario's median at each n.
    """
    t0 = time.perf_counter()
    rows = _run_rows(_lift_task, config)
    per = _per_scenario(config, _by(rows, "rho"), np.median)
    series = [max(per[k][i] for k in config.scenarios) for i in range(len(config.ladder))]
    report = ConvergenceReport(
        "lift-distance", config, rows, list(config.ladder), series, fit_rate(config.ladder, series),
        aggregate="max over scenarios of median rho_alpha",
        pair_mode=pair_mode(config.n_fine, config.exact_pairs),
        extra={
            "per_scenario": per,
            "per_scenario_fit": _scenario_fits(config, per),
            "median_level1": _per_scenario(config, _by(rows, "dist_level1"), np.median),
            "median_level2": _per_scenario(config, _by(rows, "dist_level2"), np.median),
            "theta": config.theta,
        },
    )
    report.runtime = time.perf_counter() - t0
    return report


def lift_rows_wide(report: ConvergenceReport):
    """``(scenario, seed, n, alpha, dist_level1, dist_level2, rho)`` rows."""
    table: Dict[Tuple[str, int, int], Dict[str, float]] = {}
    for _, kind, seed, n, metric, value in report.rows:
        table.setdefault((kind, seed, n), {})[metric] = value
    return [
        (kind, seed, n, report.config.alpha, v["dist_level1"], v["dist_level2"], v["rho"])
        for (kind, seed, n), v in table.items()
    ]


# ---------------------------------------------------------------------------
# RDE against SDE


def _rde_task(config: ExperimentConfig, kind: str, seeds):
    coeffs = coeffs_from_name(config.coeffs)
    grid = config.grid
    rows = []
    for seed in seeds:
        sample = sample_scenario(kind, config.interval, grid, seed)
        strat = strat_lift(sample, config.alpha)
        y = solve_rde(RDEProblem(strat, sample.qv, coeffs.f, coeffs.g, coeffs.h, config.x0))
        x = reference_batch(config.x0, sample.db, sample.dq, grid.dt, coeffs)[0]
        rows.append(("rde-vs-sde", kind, int(seed), 0, "equiv_holder",
                     holder_norm(GridPath(grid, x - y.values), config.alpha, config.exact_pairs)))
        for n in config.ladder:
            m = config.m_sub or default_m_sub(config.n_fine, n)
            yn = wz_batch(config.x0, sample.db, sample.dq, grid.dt, coeffs, n, m)[0]
            if yn.shape[0] != grid.n_steps + 1:
                raise ParameterError("rde-vs-sde needs the Wong-Zakai sub-grid to equal the fine grid")
            rows.append(("rde-vs-sde", kind, int(seed), int(n), "wz_holder",
                         holder_norm(GridPath(grid, yn - y.values), config.alpha, config.exact_pairs)))
    return rows


def run_rde_vs_sde(config: ExperimentConfig) -> ConvergenceReport:
    """``||X - Y||_alpha`` (SDE reference vs RDE) and ``||Y^(n) - Y||_alpha`` over the ladder."""
    t0 = time.perf_counter()
    rows = _run_rows(_rde_task, config)
    per = _per_scenario(config, _by(rows, "wz_holder"), np.median)
    series = [max(per[k][i] for k in config.scenarios) for i in range(len(config.ladder))]
    equiv = {k: float(np.median([r[5] for r in rows if r[1] == k and r[4] == "equiv_holder"]))
             for k in config.scenarios}
    report = ConvergenceReport(
        "rde-vs-sde", config, rows, list(config.ladder), series, fit_rate(config.ladder, series),
        aggregate="max over scenarios of median ||Y^(n) - Y||_alpha",
        pair_mode=pair_mode(config.n_fine, config.exact_pairs),
        extra={
            "median_equiv_holder": equiv,
            "per_scenario": per,
            "per_scenario_fit": _scenario_fits(config, per),
        },
    )
    report.runtime = time.perf_counter() - t0
    return report


# ---------------------------------------------------------------------------
# rough-integral local error exponent


def _integral_task(config: ExperimentConfig, kind: str, seeds):
    coeffs = coeffs_from_name(config.coeffs)
    gaps = default_gap_ladder(config.n_fine)
    rows = []
    for seed in seeds:
        sample = sample_scenario(kind, config.interval, config.grid, seed)
        strat = strat_lift(sample, config.alpha)
        base = make_controlled(sample.b.values, np.ones_like(sample.b.values), strat)
        cp = compose_field(coeffs.f, base)
        rep = local_error_exponent(cp, strat, gaps)
        for g, d in zip(rep.gaps, rep.defects):
            rows.append(("rough-integral-rate", kind, int(seed), int(g), "window_defect", d))
        slope = float("nan") if rep.slope is None else rep.slope
        rows.append(("rough-integral-rate", kind, int(seed), 0, "fitted_slope", slope))
    return rows


def run_rough_integral_rate(config: ExperimentConfig) -> ConvergenceReport:
    """Local defect exponent of the compensated sum for ``(f(B), f'(B))``.

    ``ns`` holds window widths in grid cells; the per-seed slopes are fitted
    against the window width in time units.
    """
    t0 = time.perf_counter()
    rows = _run_rows(_integral_task, config)
    gaps = default_gap_ladder(config.n_fine)
    widths = [g * config.grid.dt for g in gaps]
    slopes = [r[5] for r in rows if r[4] == "fitted_slope"]
    finite = [s for s in slopes if not math.isnan(s)]
    per = {
        kind: [float(np.median([r[5] for r in rows if r[1] == kind and r[3] == g and r[4] == "window_defect"]))
               for g in gaps]
        for kind in config.scenarios
    }
    series = [max(per[k][i] for k in config.scenarios) for i in range(len(gaps))]
    report = ConvergenceReport(
        "rough-integral-rate", config, rows, list(gaps), series, fit_rate(widths, series, floor=1e-12),
        aggregate="max over scenarios of median window defect (fit against window width)",
        pair_mode="all windows",
        extra={
            "median_seed_slope": float(np.median(finite)) if finite else None,
            "exact_seeds": len(slopes) - len(finite),
            "target_exponent": 3 * config.alpha,
            "widths": widths,
        },
    )
    report.runtime = time.perf_counter() - t0
    return report


EXPERIMENTS = {
    "wong-zakai": run_wz_l2,
    "lift-distance": run_lift_distance,
    "rde-vs-sde": run_rde_vs_sde,
    "rough-integral-rate": run_rough_integral_rate,
}


# ---------------------------------------------------------------------------
# artifacts


def header_lines(config: ExperimentConfig, experiment: str) -> List[str]:
    return [
        f"roughwz {version_stamp()}",
        f"experiment={experiment} seed_base={config.seed_base} seeds={config.seeds}",
        "config=" + json.dumps(config.to_dict(), sort_keys=True),
    ]


def write_rows_csv(report: ConvergenceReport, path):
    """Long format: one row per (experiment, scenario, seed, n, metric, value)."""
    with open(path, "w", newline="") as fh:
        for line in header_lines(report.config, report.experiment):
            fh.write(f"# {line}\n")
        w = csv.writer(fh)
        w.writerow(["experiment", "scenario", "seed", "n", "metric", "value"])
        for row in sorted(report.rows, key=lambda r: (r[1], r[2], r[3], r[4])):
            w.writerow(list(row[:5]) + [repr(float(row[5]))])


def write_lift_csv(report: ConvergenceReport, path):
    with open(path, "w", newline="") as fh:
        for line in header_lines(report.config, report.experiment):
            fh.write(f"# {line}\n")
        w = csv.writer(fh)
        w.writerow(["scenario", "seed", "n", "alpha", "dist_level1", "dist_level2", "rho"])
        for row in sorted(lift_rows_wide(report)):
            w.writerow(list(row[:4]) + [repr(float(v)) for v in row[4:]])


def write_plot_data(report: ConvergenceReport, path):
    """Whitespace-separated ``n value`` columns readable by gnuplot."""
    with open(path, "w") as fh:
        fh.write(f"# {report.experiment}: {report.aggregate}\n# n value\n")
        for n, v in zip(report.ns, report.series):
            fh.write(f"{n} {v!r}\n")


def write_summary_json(report: ConvergenceReport, path):
    Path(path).write_text(json.dumps(report.summary(), indent=2, sort_keys=True) + "\n")


def write_report(report: ConvergenceReport, out, plot: bool = False) -> List[Path]:
    """Write ``<out>.csv`` and ``<out>.json`` (plus extras); returns the paths written."""
    base = Path(out)
    base.parent.mkdir(parents=True, exist_ok=True)
    written = [base.with_suffix(".csv"), base.with_suffix(".json")]
    write_rows_csv(report, written[0])
    write_summary_json(report, written[1])
    if report.experiment == "lift-distance":
        p = base.with_name(base.name + ".distances.csv")
        write_lift_csv(report, p)
        written.append(p)
    if plot:
        p = base.with_suffix(".dat")
        write_plot_data(report, p)
        written.append(p)
    return written


def with_overrides(config: ExperimentConfig, **kw) -> ExperimentConfig:
    return replace(config, **kw)
