"""Command-line entry point: ``lwrbc {run,validate,sweep,oracle}``.

Exit codes: 0 success, 1 invalid configuration or input, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import compound, synthesis
from .flux import DomainError, FluxModel
from .functionals import FunctionalParams
from .oracle import ORACLES, run_oracle
from .output import emit_plots
from .scenario import (
    ConfigError,
    MODES,
    ScenarioConfig,
    SynthesisFailure,
    config_from_dict,
    config_to_dict,
    load_config,
    run_scenario,
)
from .solver import IntegrationError

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2


def _out_dir(args, cfg: ScenarioConfig) -> Path:
    if args.out:
        return Path(args.out)
    if cfg.out_dir:
        return Path(cfg.out_dir)
    return Path(os.environ.get("LWR_OUT_DIR", "lwr_out"))


def _summary(run) -> dict:
    V, B = run.column("V"), run.column("B")
    return {
        "mode": run.config.mode,
        "V0": float(V[0]),
        "V_final": float(V[-1]),
        "B_min": float(B.min()),
        "B_final": float(B[-1]),
        "fallback_steps": run.fallback_steps,
    }


def cmd_validate(args) -> int:
    cfg = _load(args)
    if not args.quiet:
        print(json.dumps(config_to_dict(cfg), indent=2))
    return EXIT_OK


def _load(args) -> ScenarioConfig:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    return cfg


def cmd_run(args) -> int:
    cfg = _load(args)
    out = _out_dir(args, cfg)
    runs = {cfg.mode: run_scenario(cfg)}
    for mode in args.compare or ():
        if mode not in runs:
            runs[mode] = run_scenario(replace(cfg, mode=mode).validate())
    written = emit_plots(runs, out / cfg.prefix)
    if not args.quiet:
        for run in runs.values():
            print(json.dumps(_summary(run)))
        print(f"wrote {len(written)} files to {out}")
    return EXIT_OK


def _set_param(cfg: ScenarioConfig, name: str, value: float) -> ScenarioConfig:
    data = config_to_dict(cfg)
    if name.startswith("initial."):
        data["initial"][name.split(".", 1)[1]] = value
    elif name in data:
        data[name] = int(value) if name in ("n_cells", "seed") else value
    else:
        raise ConfigError(f"{name}: unknown field")
    return config_from_dict(data)


def _sweep_one(job):
    cfg, out, name, value = job
    run = run_scenario(cfg)
    tag = f"{cfg.prefix}_{name}={value:g}"
    emit_plots(run, out / tag, snapshot_times=())
    return {name: value, **_summary(run)}


def cmd_sweep(args) -> int:
    cfg = _load(args)
    if args.values:
        try:
            values = [float(v) for v in args.values.split(",") if v.strip()]
        except ValueError:
            raise ConfigError(f"--values: not a comma-separated list of numbers: {args.values}") from None
    else:
        lo, hi = args.range
        rng = np.random.default_rng(cfg.seed)
        values = sorted(float(v) for v in rng.uniform(lo, hi, args.samples))
    out = _out_dir(args, cfg)
    jobs = [(_set_param(cfg, args.param, v), out, args.param, v) for v in values]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_one, jobs))
    else:
        rows = [_sweep_one(job) for job in jobs]
    if not args.quiet:
        for row in rows:
            print(json.dumps(row))
    return EXIT_OK


_SOLVERS = {
    "solve_stab_left": lambda i, p, m: synthesis.solve_stab_left(i["u_b"], i["C"], p, m),
    "solve_stab_right": lambda i, p, m: synthesis.solve_stab_right(i["u_a"], i["C"], p, m),
    "solve_inv_left": lambda i, p, m: synthesis.solve_inv_left(i["u_b"], i["D"], m),
    "solve_inv_right": lambda i, p, m: synthesis.solve_inv_right(i["u_a"], i["D"], m),
    "solve_stab_both": lambda i, p, m: synthesis.solve_stab_both(i["C"], p, m),
    "solve_inv_both": lambda i, p, m: synthesis.solve_inv_both(i["D"], m),
    "solve_compound_left": lambda i, p, m: compound.solve_compound_left(i["C"], i["D"], p, m),
    "solve_compound_right": lambda i, p, m: compound.solve_compound_right(i["C"], i["D"], p, m),
}


def _read_instance(text: str) -> dict:
    path = Path(text)
    if not text.lstrip().startswith("{") and path.exists():
        text = path.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"instance: parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise ConfigError("instance: must be a JSON object")
    return data


def cmd_oracle(args) -> int:
    inst = _read_instance(args.instance)
    try:
        result = run_oracle(args.solver, inst)
    except KeyError as exc:
        raise ConfigError(str(exc.args[0])) from None
    m = FluxModel(float(inst.get("u_max", 1.0)))
    p = FunctionalParams(u_star=float(inst.get("u_star", m.u_max / 3)))
    solved = _SOLVERS[args.solver]({k: float(v) for k, v in inst.items()}, p, m)
    report = {
        "solver": args.solver,
        "oracle": {"feasible": result.feasible, "value": result.value, "objective": result.objective},
        "solution": {"status": solved.status.value, "case": solved.case_label, "value": solved.value},
    }
    if args.quiet:
        print(json.dumps(result.value))
    else:
        print(json.dumps(report, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output directory (default: $LWR_OUT_DIR or ./lwr_out)")
    common.add_argument("--seed", type=int, default=None, help="override the config's rng seed")
    common.add_argument("--quiet", action="store_true", help="suppress progress output")

    parser = argparse.ArgumentParser(prog="lwrbc", description="LWR boundary-control scenarios")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", parents=[common], help="simulate a scenario and write CSV + plot scripts")
    p_run.add_argument("config", type=Path)
    p_run.add_argument("--compare", nargs="+", choices=MODES, metavar="MODE",
                       help="also run these modes and overlay them in the plots")
    p_run.set_defaults(func=cmd_run)

    p_val = sub.add_parser("validate", parents=[common], help="parse and validate a config")
    p_val.add_argument("config", type=Path)
    p_val.set_defaults(func=cmd_validate)

    p_sweep = sub.add_parser("sweep", parents=[common], help="batch runs varying one scalar field")
    p_sweep.add_argument("config", type=Path)
    p_sweep.add_argument("--param", required=True, help="field name, e.g. alpha_gain or initial.amplitude")
    grp = p_sweep.add_mutually_exclusive_group(required=True)
    grp.add_argument("--values", help="comma-separated values")
    grp.add_argument("--range", nargs=2, type=float, metavar=("LO", "HI"),
                     help="draw --samples values uniformly (seeded)")
    p_sweep.add_argument("--samples", type=int, default=5)
    p_sweep.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p_sweep.set_defaults(func=cmd_sweep)

    p_or = sub.add_parser("oracle", parents=[common], help="grid brute-force oracle for one synthesis instance")
    p_or.add_argument("solver", choices=sorted(ORACLES))
    p_or.add_argument("instance", help="JSON file or inline JSON object")
    p_or.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, DomainError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (SynthesisFailure, IntegrationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
