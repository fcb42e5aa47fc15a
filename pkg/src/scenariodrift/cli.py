"""Command-line front end for the experiment runners.

Exit codes: 0 success, 2 configuration error, 3 capacity (enumeration
guard) error, 4 validation failure.  Output is CSV only; with --out the
primary table lands at the given path and any extra tables beside it as
<stem>_<table>.csv, without --out every table goes to stdout preceded by a
"# table: <name>" line.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .drift import parse_config_text
from .errors import CapacityError, ConfigError
from .experiments import ExperimentConfig, run_experiment, write_tables

_EXIT_OK = 0
_EXIT_CONFIG = 2
_EXIT_CAPACITY = 3
_EXIT_VALIDATION = 4

# CLI flag -> parameter key, per experiment.
_OVERRIDES: dict[str, dict[str, str]] = {
    "cover": {
        "n": "n_scenarios",
        "epsilon": "epsilon",
        "complexity": "complexity",
        "r0": "r0_list",
        "preset": "drift_preset",
    },
    "control": {
        "n": "n_scenarios",
        "beta": "beta",
        "rho": "rho_list",
        "r0": "r0_list",
        "horizon": "horizon",
        "strategy": "strategy",
        "entry_std": "entry_std",
    },
    "validate": {
        "mode": "mode",
        "repetitions": "repetitions",
        "n": "n_scenarios",
        "epsilon": "epsilon",
        "beta": "beta",
        "r0": "r0",
        "eval_samples": "eval_samples",
        "preset": "drift_preset",
    },
    "wasserstein": {"n": "n_scenarios", "tol": "tol", "preset": "drift_preset"},
    "bounds": {
        "n": "n_scenarios",
        "epsilon": "epsilon",
        "beta": "beta",
        "complexity": "complexity",
        "r0": "r0_list",
        "epsilon_grid": "epsilon_list",
        "preset": "drift_preset",
    },
}

_HELP = {
    "cover": "covering benchmark: radius sweep on one drawn scenario set",
    "control": "control benchmark: risk schedules plus one solved instance",
    "wasserstein": "distance of each step distribution to the evaluation one",
    "bounds": "certificate sweep over r0 and sample sizes over epsilon",
    "validate": "repeated draw-solve-evaluate pipeline against certified beta",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scenariodrift",
        description="Scenario-approach experiments under drifting distributions (CSV output).",
    )
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name, overrides in _OVERRIDES.items():
        p = sub.add_parser(name, help=_HELP[name])
        p.add_argument("--seed", type=int, default=None, help="RNG seed (default 0)")
        p.add_argument("--config", type=Path, default=None, help="key = value config file")
        p.add_argument("--out", type=Path, default=None, help="primary CSV output path")
        for flag in overrides:
            p.add_argument(f"--{flag.replace('_', '-')}", dest=flag, default=None)
    return parser


def _resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    parameters: dict[str, object] = {}
    seed = 0
    if args.config is not None:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {args.config}: {exc}") from None
        file_params = parse_config_text(text)
        if "seed" in file_params:
            try:
                seed = int(file_params.pop("seed"))
            except ValueError:
                raise ConfigError("config key 'seed' must be an integer") from None
        parameters.update(file_params)
    for flag, key in _OVERRIDES[args.experiment].items():
        value = getattr(args, flag)
        if value is not None:
            parameters[key] = value
    if args.seed is not None:
        seed = args.seed
    return ExperimentConfig(experiment=args.experiment, seed=seed, parameters=parameters)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _resolve_config(args)
        tables = run_experiment(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return _EXIT_CAPACITY
    write_tables(tables, str(args.out) if args.out is not None else None)
    if args.experiment == "validate":
        summary = next(t for t in tables if t.name == "summary")
        passed = bool(summary.rows[0][summary.header.index("passed")])
        if not passed:
            print("validation failed: exceedance rate above certified threshold", file=sys.stderr)
            return _EXIT_VALIDATION
    return _EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
