"""Command-line front end.

Exit codes: 0 success, 2 configuration problems, 3 numerical failure
(non-finite field data mid-run).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .driver import (
    BOUNDARIES,
    INITS,
    MODES,
    SCHEMES,
    ConfigError,
    NumericalError,
    RunConfig,
    energy_csv,
    make_config,
    parse_config,
    rates_csv,
    run_experiment,
)

_CORE_FLAGS = (
    ("--scheme", dict(choices=SCHEMES, help="time stepper family")),
    ("--m", dict(type=int, help="derivative order carried per node")),
    ("--lambda", dict(type=float, dest="lam", metavar="LAM",
                      help="CFL number c*dt/h, in (0, 1]")),
    ("--levels", dict(type=int, help="number of refinement levels")),
    ("--n0", dict(type=int, help="coarsest cell count per direction")),
    ("--steps", dict(type=int, help="update count (conserve1d)")),
    ("--seed", dict(type=int, help="RNG seed for random-mode data")),
    ("--out", dict(help="CSV output path (default: print summary only)")),
    ("--config", dict(help="key=value file; flags override its entries")),
)

_CUSTOM_FLAGS = (
    ("--experiment", dict(help="which built-in experiment to run")),
    ("--init", dict(choices=INITS, help="conservative start-up data")),
    ("--boundary", dict(choices=BOUNDARIES, help="wall treatment (gaussian1d)")),
    ("--mode", dict(choices=MODES, help="conserve1d data: smooth or random")),
    ("--refine", dict(type=float, help="grid growth factor between levels")),
    ("--sample-every", dict(type=int, dest="sample_every",
                            help="energy sampling stride (conserve1d)")),
    ("--stage-cap", dict(type=int, dest="stage_cap",
                         help="truncate Taylor stages (debugging aid)")),
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hermwave",
        description="Hermite solvers for the scalar wave equation",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "gaussian1d": "reflecting-box convergence study",
        "conserve1d": "long-run energy conservation trace",
        "planewave2d": "2D plane-wave convergence study",
        "custom": "any experiment with every knob exposed",
    }
    for name, blurb in specs.items():
        p = sub.add_parser(name, help=blurb)
        flags = _CORE_FLAGS + (_CUSTOM_FLAGS if name == "custom" else ())
        for flag, kwargs in flags:
            p.add_argument(flag, **kwargs)
        if name == "gaussian1d":
            p.add_argument("--boundary", choices=BOUNDARIES,
                           help="wall treatment at both ends")
            p.add_argument("--init", choices=INITS,
                           help="conservative start-up data")
    return parser


_FLAG_KEYS = ("scheme", "m", "lam", "levels", "n0", "steps", "seed", "out",
              "init", "boundary", "mode", "refine", "sample_every", "stage_cap")


def _assemble(args: argparse.Namespace) -> RunConfig:
    file_overrides = {}
    if args.config is not None:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError(f"config file not found: {args.config}")
        file_overrides = parse_config(path.read_text())
    experiment = args.command
    if experiment == "custom":
        experiment = getattr(args, "experiment", None) or file_overrides.get("experiment")
        if experiment is None:
            raise ConfigError("custom runs need --experiment or an experiment= config entry")
    flag_overrides = {k: getattr(args, k, None) for k in _FLAG_KEYS}
    return make_config(experiment, file_overrides, flag_overrides)


def _report_summary(cfg: RunConfig, report) -> None:
    pair = report.pair_rates() if len(report.ns) > 1 else []
    print(f"{cfg.experiment} scheme={cfg.scheme} m={cfg.m} lambda={cfg.lam:g}")
    for i in range(len(report.ns)):
        rate = f"{pair[i-1]:7.3f}" if i > 0 else "      -"
        print(f"  n={report.ns[i]:4d}  h={report.hs[i]:.4e}  "
              f"err={report.err_u[i]:.6e}  rate={rate}")
    if len(report.ns) >= 3:
        print(f"fitted rate: {report.rate():.3f}")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _assemble(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        result = run_experiment(cfg)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    if cfg.experiment == "conserve1d":
        steps, times, deltas, e0 = result
        if cfg.out:
            Path(cfg.out).write_text(energy_csv(steps, times, deltas))
        rel = float(np.max(np.abs(deltas)) / e0) if e0 else float("nan")
        print(f"conserve1d scheme={cfg.scheme} m={cfg.m} mode={cfg.mode} "
              f"steps={cfg.steps}")
        print(f"energy: initial={e0:.10e}  max |drift|/initial={rel:.3e}")
    else:
        if cfg.out:
            Path(cfg.out).write_text(rates_csv(result))
        _report_summary(cfg, result)
    return 0


if __name__ == "__main__":
    sys.exit(main())
