"""Command-line benchmark runner.

Subcommands:
  run       execute splitting trials and write a report directory
  spectrum  build the experiment families and emit the singular spectrum only
  split     one-shot: read a signal CSV and write its two components

Options can come from a key=value config file (--config); command-line flags
override file entries, which override built-in defaults.
"""
from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from .bench import (ExperimentConfig, build_experiment, emit_outputs,
                    run_experiment)
from .dictionaries import family_from_csv
from .oblique import build_oblique_projector
from .pursuit import PursuitConfig, oblique_pursuit, prepare_families

__all__ = ["main"]

def _parse_bool(text: str) -> bool:
    if text.lower() in ("1", "true", "yes", "on"):
        return True
    if text.lower() in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


_CONFIG_KEYS = {
    "experiment": str, "trials": int, "K": int, "seed": int,
    "grid_step": float, "baseline": _parse_bool,
    "coeff_law": str, "out": str,
    "stop_tol": float, "stab_tol": float, "r_max": int,
    "max_swap_depth": int, "max_restarts": int,
    "v_family": str, "wperp_family": str,
}


def read_config_file(path: str) -> dict:
    """Parse a `key = value` file; '#' starts a comment."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, _, text = line.partition("=")
            key = key.strip()
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = _CONFIG_KEYS[key](text.strip())
    return values


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key = value settings file")
    parser.add_argument("--experiment",
                        choices=["example1", "example2", "example3", "custom"])
    parser.add_argument("--grid-step", type=float, dest="grid_step")
    parser.add_argument("--v-family", dest="v_family",
                        help="CSV atom family (custom experiment)")
    parser.add_argument("--wperp-family", dest="wperp_family",
                        help="CSV noise family (custom experiment)")
    parser.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="obliquesplit",
        description="Structured-noise filtering benchmarks (oblique "
                    "projection + adaptive sparse pursuit)")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run splitting trials")
    _add_common(run_p)
    run_p.add_argument("--trials", type=int)
    run_p.add_argument("--K", type=int, dest="K")
    run_p.add_argument("--seed", type=int)
    run_p.add_argument("--coeff-law", dest="coeff_law",
                       choices=["uniform", "normal"])
    run_p.add_argument("--no-baseline", action="store_true")
    run_p.add_argument("--sparsity-sweep", dest="sparsity_sweep",
                       help="comma-separated K values, one report per K")
    run_p.add_argument("--stop-tol", type=float, dest="stop_tol")
    run_p.add_argument("--stab-tol", type=float, dest="stab_tol")
    run_p.add_argument("--r-max", type=int, dest="r_max")
    run_p.add_argument("--max-swap-depth", type=int, dest="max_swap_depth")
    run_p.add_argument("--max-restarts", type=int, dest="max_restarts")

    spec_p = sub.add_parser("spectrum", help="emit the singular spectrum only")
    _add_common(spec_p)

    split_p = sub.add_parser("split", help="split one signal from a CSV file")
    _add_common(split_p)
    split_p.add_argument("--signal", required=True,
                         help="CSV with a grid column and a signal column")
    split_p.add_argument("--stop-tol", type=float, dest="stop_tol")
    split_p.add_argument("--stab-tol", type=float, dest="stab_tol")
    return parser


def _merged(args: argparse.Namespace, key: str, file_cfg: dict, default):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in file_cfg:
        return file_cfg[key]
    return default


def _experiment_config(args, file_cfg, *, trials=1) -> ExperimentConfig:
    pursuit = PursuitConfig(
        stop_tol=_merged(args, "stop_tol", file_cfg, PursuitConfig.stop_tol),
        stab_tol=_merged(args, "stab_tol", file_cfg, PursuitConfig.stab_tol),
        r_max=_merged(args, "r_max", file_cfg, None),
        max_swap_depth=_merged(args, "max_swap_depth", file_cfg, 3),
        max_restarts=_merged(args, "max_restarts", file_cfg, 10),
    )
    baseline = not getattr(args, "no_baseline", False)
    if "baseline" in file_cfg and not getattr(args, "no_baseline", False):
        baseline = file_cfg["baseline"]
    return ExperimentConfig(
        experiment=_merged(args, "experiment", file_cfg, "example1"),
        trials=_merged(args, "trials", file_cfg, trials),
        K=_merged(args, "K", file_cfg, None),
        seed=_merged(args, "seed", file_cfg, 0),
        grid_step=_merged(args, "grid_step", file_cfg, None),
        pursuit=pursuit,
        baseline=baseline,
        output_dir=_merged(args, "out", file_cfg, None),
        coeff_law=_merged(args, "coeff_law", file_cfg, "uniform"),
        v_family_csv=_merged(args, "v_family", file_cfg, None),
        wperp_family_csv=_merged(args, "wperp_family", file_cfg, None),
    )


def _cmd_run(args, file_cfg) -> int:
    config = _experiment_config(args, file_cfg, trials=50)
    out = config.output_dir or "obliquesplit-out"
    sweep = getattr(args, "sparsity_sweep", None)
    k_values = [int(k) for k in sweep.split(",")] if sweep else [config.K]
    for k in k_values:
        config.K = k
        report = run_experiment(config)
        target = os.path.join(out, f"K{k}") if sweep else out
        emit_outputs(report, target)
        agg = report.aggregates
        print(f"experiment={config.experiment} K={report.environment['K']} "
              f"trials={agg['trials']} successes={agg['success_count']} "
              f"mean_error={agg['mean_error']:.3e} "
              f"reinit_trials={agg['reinit_count']} -> {target}")
    return 0


def _cmd_spectrum(args, file_cfg) -> int:
    config = _experiment_config(args, file_cfg)
    setup = build_experiment(config)
    projector = build_oblique_projector(setup.v_family, setup.wperp_raw)
    out = config.output_dir or "obliquesplit-out"
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, "spectrum.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "sigma"])
        for i, s in enumerate(projector.sigma, start=1):
            writer.writerow([i, format(float(s), ".17g")])
    print(f"rank={projector.rank} sigma_1={projector.sigma[0]:.6g} "
          f"sigma_N={projector.sigma[-1]:.6g} -> {path}")
    return 0


def _cmd_split(args, file_cfg) -> int:
    config = _experiment_config(args, file_cfg)
    setup = build_experiment(config)
    with open(args.signal, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    data = np.array([[float(x) for x in row] for row in rows[1:]])
    f = data[:, 1] if data.shape[1] > 1 else data[:, 0]
    if f.size != setup.v_family.space.size:
        print(f"error: signal has {f.size} samples, experiment grid has "
              f"{setup.v_family.space.size}", file=sys.stderr)
        return 2
    prepared = prepare_families(setup.v_family, setup.wperp_raw)
    result = oblique_pursuit(f, config=config.pursuit, prepared=prepared)
    out = config.output_dir or "obliquesplit-out"
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, "components.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["grid", "f", "f1_est", "f2_est"])
        for g, fv, c in zip(setup.v_family.space.grid, f, result.component):
            writer.writerow([format(v, ".17g") for v in (g, fv, c, fv - c)])
    status = "converged" if result.converged else "NOT converged"
    print(f"{status}: support size {len(result.support)}, residual "
          f"{result.diagnostics['residual']:.3e} -> {path}")
    return 0 if result.converged else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    file_cfg = read_config_file(args.config) if args.config else {}
    if args.command == "run":
        return _cmd_run(args, file_cfg)
    if args.command == "spectrum":
        return _cmd_spectrum(args, file_cfg)
    return _cmd_split(args, file_cfg)


if __name__ == "__main__":
    raise SystemExit(main())
