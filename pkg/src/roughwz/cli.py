"""Command line interface: ``roughwz <subcommand> [flags]``.

Settings may also come from a flat ``key = value`` file given with
``--config``; command line flags override the file. Exit status is 0 on
success, 2 on a parameter error and 3 when a trajectory diverges.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from . import harness, sublinear
from ._accel import backend_name
from .errors import DivergenceError, ParameterError
from .gsim import sample_scenario, write_sample_csv

EXIT_OK = 0
EXIT_PARAM = 2
EXIT_DIVERGED = 3

log = logging.getLogger("roughwz")


def _common(parser):
    p = parser.add_argument
    p("--config", help="flat key=value file; flags override it")
    p("--sigma-lo", type=float)
    p("--sigma-hi", type=float)
    p("--alpha", type=float)
    p("--theta", type=float)
    p("--n-fine", type=int)
    p("--ladder", help="coarse step counts, e.g. 8,16,32")
    p("--seeds", type=int, help="number of seeds")
    p("--seed-base", type=int)
    p("--scenarios", help="comma separated control kinds")
    p("--coeffs", help="preset name or 'f,g,h' field list (e.g. 'sin,0.5*cos,')")
    p("--x0", type=float)
    p("--m-sub", type=int, help="Euler sub-steps per coarse cell (default: fine-aligned)")
    p("--wz-metric", choices=("terminal", "sup_t"))
    p("--exact-pairs", choices=("auto", "yes", "no"))
    p("--workers", type=int)
    p("--out", help="output path stem")
    p("--plot", action="store_true", help="also write gnuplot data")
    p("-v", "--verbose", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(prog="roughwz", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("simulate", "simulate one G-Brownian sample and write t,a,B,qv as CSV"),
        ("lift-distance", "rough distance between Stratonovich and polygonal lifts"),
        ("wong-zakai", "squared Wong-Zakai error against the SDE reference"),
        ("rde-vs-sde", "RDE solution vs SDE reference and Wong-Zakai Hölder error"),
        ("rough-integral-rate", "local error exponent of the compensated Riemann sum"),
        ("expectation", "upper expectation of a payoff of B_1 over scenarios"),
    ]:
        sp = sub.add_parser(name, help=help_text)
        _common(sp)
        if name == "expectation":
            sp.add_argument("--payoff", default="x2", choices=sorted(sublinear.CATALOGUE))
            sp.add_argument("--paths", type=int, default=10_000, help="paths per scenario")
            sp.add_argument("--n-steps", type=int, default=64)
    return parser


def config_from_args(args) -> harness.ExperimentConfig:
    file_values = harness.load_config_file(args.config) if args.config else {}
    exact = {"auto": None, "yes": True, "no": False}.get(args.exact_pairs) if args.exact_pairs else None
    overrides = dict(
        sigma_lo=args.sigma_lo, sigma_hi=args.sigma_hi, alpha=args.alpha, theta=args.theta,
        n_fine=args.n_fine, ladder=args.ladder, seeds=args.seeds, seed_base=args.seed_base,
        scenarios=args.scenarios, coeffs=args.coeffs, x0=args.x0, m_sub=args.m_sub,
        wz_metric=args.wz_metric, exact_pairs=exact, workers=args.workers, out=args.out,
    )
    if args.command in ("simulate", "expectation") and args.ladder is None and "ladder" not in file_values:
        overrides["ladder"] = (1,)
    return harness.make_config(file_values, **overrides)


def _emit(obj, out, suffix=".json"):
    text = json.dumps(obj, indent=2, sort_keys=True)
    if out:
        path = Path(out).with_suffix(suffix)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + "\n")
    print(text)


def _run(args) -> int:
    config = config_from_args(args)
    log.info("backend=%s config=%s", backend_name(), config.to_dict())
    if args.command == "simulate":
        kind = config.scenarios[0]
        sample = sample_scenario(kind, config.interval, config.grid, config.seed_base)
        lines = harness.header_lines(config, "simulate") + [f"scenario={kind} seed={config.seed_base}"]
        if config.out:
            path = Path(config.out).with_suffix(".csv")
            path.parent.mkdir(parents=True, exist_ok=True)
            write_sample_csv(sample, path, lines)
            print(path)
        else:
            write_sample_csv(sample, "/dev/stdout", lines)
        return EXIT_OK
    if args.command == "expectation":
        report = sublinear.estimate_upper_expectation(
            args.payoff, config.interval, config.scenarios, args.paths, config.seed_base, args.n_steps
        )
        payload = report.to_json()
        payload["payoff"] = args.payoff
        payload["version"] = harness.version_stamp()
        if sublinear.is_convex(args.payoff) or sublinear.is_concave(args.payoff):
            payload["gnormal_exact"] = sublinear.gnormal_exact(args.payoff, config.interval)
        _emit(payload, config.out)
        return EXIT_OK
    report = harness.EXPERIMENTS[args.command](config)
    log.info("%s finished in %.1fs", args.command, report.runtime)
    if config.out:
        for p in harness.write_report(report, config.out, plot=args.plot):
            log.info("wrote %s", p)
    print(json.dumps(report.summary(), indent=2, sort_keys=True))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return _run(args)
    except ParameterError as exc:
        print(f"roughwz: parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    except DivergenceError as exc:
        print(f"roughwz: diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED


if __name__ == "__main__":
    sys.exit(main())
