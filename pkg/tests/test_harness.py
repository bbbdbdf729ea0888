import json
import math

import numpy as np
import pytest

from roughwz.errors import ParameterError
from roughwz.harness import (
    ExperimentConfig,
    load_config_file,
    make_config,
    run_lift_distance,
    run_rde_vs_sde,
    run_rough_integral_rate,
    run_wz_l2,
    version_stamp,
    with_overrides,
    write_report,
)
from roughwz.rates import fit_rate

SMALL = dict(n_fine=256, ladder=(4, 8, 16, 32), seeds=6)


class TestFitRate:
    def test_power_law(self):
        ns = [4, 8, 16, 32, 64]
        fit = fit_rate(ns, [3.0 * n**-0.5 for n in ns])
        assert fit.slope == pytest.approx(-0.5, abs=1e-12)
        assert fit.r_squared == pytest.approx(1.0, abs=1e-12)

    def test_constant(self):
        fit = fit_rate([1, 2, 4], [0.3, 0.3, 0.3])
        assert fit.slope == pytest.approx(0.0, abs=1e-12)

    def test_two_points(self):
        assert fit_rate([2, 8], [1.0, 0.25]).slope == pytest.approx(-1.0, abs=1e-12)

    def test_exact_rows_only_excluded(self):
        fit = fit_rate([1, 2, 4, 8], [1.0, 0.0, 0.25, 1e-15])
        assert (fit.n_used, fit.n_excluded) == (2, 2)
        assert fit.slope == pytest.approx(-1.0)

    def test_all_exact_sentinel(self):
        fit = fit_rate([1, 2, 4], [0.0, 0.0, 0.0])
        assert fit.exact and fit.slope is None

    def test_length_mismatch(self):
        with pytest.raises(ParameterError):
            fit_rate([1, 2], [1.0])


class TestConfig:
    def test_defaults_valid(self):
        ExperimentConfig()

    @pytest.mark.parametrize(
        "kw",
        [dict(alpha=0.5), dict(alpha=0.3), dict(theta=0.1), dict(ladder=(3,)), dict(sigma_lo=2.0),
         dict(scenarios=("nope",)), dict(seeds=0), dict(coeffs="bogus"), dict(wz_metric="l1")],
    )
    def test_rejects(self, kw):
        with pytest.raises(ParameterError):
            ExperimentConfig(**kw)

    def test_file_then_flags(self, tmp_path):
        p = tmp_path / "run.cfg"
        p.write_text("# sample\nsigma-lo = 0.25\nladder = 8,16\nseeds=3\ncoeffs = cos\n")
        values = load_config_file(p)
        cfg = make_config(values, seeds=7, coeffs=None)
        assert cfg.sigma_lo == 0.25 and cfg.ladder == (8, 16)
        assert cfg.seeds == 7 and cfg.coeffs == "cos"

    def test_file_errors(self, tmp_path):
        p = tmp_path / "bad.cfg"
        p.write_text("colour = blue\n")
        with pytest.raises(ParameterError):
            load_config_file(p)
        p.write_text("just words\n")
        with pytest.raises(ParameterError):
            load_config_file(p)


class TestExperiments:
    def test_zero_fields_sentinel(self):
        report = run_wz_l2(ExperimentConfig(coeffs="zero", **SMALL))
        assert report.exact and report.slope is None
        assert all(v == 0.0 for v in report.series)

    def test_constant_field_sentinel(self):
        report = run_wz_l2(ExperimentConfig(coeffs="const", **SMALL))
        assert report.exact

    def test_max_over_scenarios(self):
        report = run_wz_l2(ExperimentConfig(**SMALL))
        per = report.extra["per_scenario"]
        for i, v in enumerate(report.series):
            assert v >= 0 and all(v >= per[k][i] for k in per)

    def test_sup_t_metric(self):
        report = run_wz_l2(ExperimentConfig(wz_metric="sup_t", **SMALL))
        terminal = run_wz_l2(ExperimentConfig(**SMALL))
        assert all(s >= t - 1e-15 for s, t in zip(report.series, terminal.series))

    def test_lift_distance_full_resolution_row(self):
        cfg = ExperimentConfig(n_fine=256, ladder=(4, 16, 64, 256), seeds=8)
        report = run_lift_distance(cfg)
        assert report.series[-1] == 0.0
        assert all(r[5] >= 0 for r in report.rows)
        assert report.series[0] > report.series[2]

    def test_rde_vs_sde_constant_field(self):
        report = run_rde_vs_sde(ExperimentConfig(coeffs="const", **SMALL))
        assert max(r[5] for r in report.rows if r[4] == "equiv_holder") <= 1e-12

    def test_rde_vs_sde_zero_fields(self):
        report = run_rde_vs_sde(ExperimentConfig(coeffs="zero", **SMALL))
        assert all(r[5] == 0.0 for r in report.rows)

    def test_rde_vs_sde_equivalence_below_coarsest(self):
        report = run_rde_vs_sde(ExperimentConfig(n_fine=1024, ladder=(8, 16), seeds=10))
        for kind, equiv in report.extra["median_equiv_holder"].items():
            assert equiv < report.extra["per_scenario"][kind][0]

    def test_integral_rate_runs(self):
        report = run_rough_integral_rate(ExperimentConfig(n_fine=1024, seeds=3, ladder=(1,)))
        assert report.extra["median_seed_slope"] > 0
        assert len(report.ns) == 6

    @pytest.mark.parametrize("runner", [run_wz_l2, run_lift_distance, run_rde_vs_sde])
    def test_bit_reproducible(self, runner, tmp_path):
        cfg = ExperimentConfig(**SMALL)
        a = write_report(runner(cfg), tmp_path / "a")
        b = write_report(runner(cfg), tmp_path / "b")
        for pa, pb in zip(a, b):
            assert pa.read_bytes() == pb.read_bytes()

    def test_workers_do_not_change_output(self, tmp_path):
        cfg = ExperimentConfig(n_fine=128, ladder=(4, 8, 16, 32), seeds=120)
        serial = write_report(run_wz_l2(cfg), tmp_path / "s")
        pooled = write_report(run_wz_l2(with_overrides(cfg, workers=2)), tmp_path / "p")
        assert serial[0].read_bytes() == pooled[0].read_bytes()
        js = json.loads(serial[1].read_text())
        jp = json.loads(pooled[1].read_text())
        assert js == jp


def test_artifacts(tmp_path):
    report = run_lift_distance(ExperimentConfig(seed_base=11, **SMALL))
    paths = write_report(report, tmp_path / "out" / "lift", plot=True)
    names = sorted(p.name for p in paths)
    assert names == ["lift.csv", "lift.dat", "lift.distances.csv", "lift.json"]
    header = (tmp_path / "out" / "lift.csv").read_text().splitlines()
    assert header[0] == f"# roughwz {version_stamp()}"
    assert "seed_base=11" in header[1]
    assert header[3] == "experiment,scenario,seed,n,metric,value"
    summary = json.loads((tmp_path / "out" / "lift.json").read_text())
    assert summary["version"] == version_stamp()
    assert summary["config"]["seed_base"] == 11
    assert summary["holder_pairs"] == "exact"
    wide = (tmp_path / "out" / "lift.distances.csv").read_text().splitlines()
    assert wide[3] == "scenario,seed,n,alpha,dist_level1,dist_level2,rho"
    assert len(wide) == 3 + 1 + 3 * 6 * 4
    row = wide[4].split(",")
    assert math.isclose(float(row[4]) + float(row[5]), float(row[6]), rel_tol=1e-15)
