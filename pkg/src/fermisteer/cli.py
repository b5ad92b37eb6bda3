"""Command-line entry points."""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .config import ConfigError, ExperimentConfig, load_config
from .observables import TimeSeries
from .runner import final_entropy_profile, run_ensemble, run_experiment, run_sweep, write_sweep_table
from .scaling import ScalingExponents, collapse_score, collapse_transform, fit_log_chord
from .verify import dump_failures, oracle_check


def _add_run_flags(sub):
    sub.add_argument("--config", required=True, help="JSON config file")
    sub.add_argument("--out", help="output CSV path (overrides config)")
    sub.add_argument("--seed", type=int, help="master seed override")
    sub.add_argument("--trajectories", type=int, help="ensemble size override")
    sub.add_argument("--threads", type=int, default=1, help="parallel trajectory workers")


def _load(args, expected_mode: str) -> ExperimentConfig:
    cfg = load_config(args.config)
    if cfg.mode != expected_mode:
        raise ConfigError(f"config mode {cfg.mode!r} does not match subcommand {expected_mode!r}")
    if args.seed is not None:
        cfg.seed = args.seed
    if args.trajectories is not None:
        cfg.trajectories = args.trajectories
    cfg.validate()
    return cfg


def _cmd_run(args, mode: str) -> int:
    cfg = _load(args, mode)
    out = args.out or cfg.out
    if not out:
        raise ConfigError("no output path: set 'out' in the config or pass --out")
    ts = run_experiment(cfg, out_path=out, threads=args.threads)
    last = {name: ts.columns[name][-1] for name in ts.column_names()}
    print(f"{mode}: wrote {out} ({cfg.trajectories} trajectories); final {json.dumps(last, sort_keys=True)}")
    return 0


def _cmd_sweep(args) -> int:
    with open(args.config) as fh:
        raw = json.load(fh)
    unknown = set(raw) - {"base", "grid", "out"}
    if unknown:
        raise ConfigError(f"unknown sweep keys: {sorted(unknown)}")
    if "base" not in raw or "grid" not in raw:
        raise ConfigError("sweep config needs 'base' (quantum config) and 'grid' ([[p, r], ...])")
    base = ExperimentConfig.from_dict(raw["base"])
    if base.mode != "quantum":
        raise ConfigError("sweep base config must have mode 'quantum'")
    if args.seed is not None:
        base.seed = args.seed
    if args.trajectories is not None:
        base.trajectories = args.trajectories
    grid = [(float(p), float(r)) for p, r in raw["grid"]]
    out = args.out or raw.get("out")
    if not out:
        raise ConfigError("no output path: set 'out' in the sweep config or pass --out")
    rows = run_sweep(grid, base, threads=args.threads)
    write_sweep_table(rows, out)
    failed = sum(1 for row in rows if row["error"])
    print(f"sweep: wrote {out} ({len(rows)} points, {failed} failed)")
    return 0


def _cmd_entropy_profile(args) -> int:
    cfg = _load(args, "quantum")
    if len(cfg.entropy_cut_sizes()) < 5:
        raise ConfigError("entropy-profile needs at least 5 entropy_cuts")
    out = args.out or cfg.out
    if not out:
        raise ConfigError("no output path: set 'out' in the config or pass --out")
    ts = run_ensemble(cfg, threads=args.threads)
    sizes, chords, s_mean, s_err = final_entropy_profile(ts, cfg.L)
    alpha, intercept, r2 = fit_log_chord(chords, s_mean)
    with open(out, "w") as fh:
        fh.write("A,chord,S2_mean,S2_stderr\n")
        for k in range(sizes.size):
            fh.write(f"{sizes[k]},{chords[k]:.17g},{s_mean[k]:.17g},{s_err[k]:.17g}\n")
    meta = ts.metadata | {"alpha": alpha, "intercept": intercept, "r_squared": r2}
    with open(f"{out}.meta.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"entropy-profile: wrote {out}; alpha={alpha:.4f} r2={r2:.4f}")
    return 0


def _collapse_exponents(raw: dict) -> ScalingExponents:
    if {"beta", "nu_par", "nu_perp"} <= set(raw):
        return ScalingExponents(raw["beta"], raw["nu_par"], raw["nu_perp"])
    if {"theta", "z"} <= set(raw):
        return ScalingExponents.from_theta_z(raw["theta"], raw["z"])
    raise ConfigError("collapse config needs exponents: theta+z or beta+nu_par+nu_perp")


def _cmd_collapse(args) -> int:
    with open(args.config) as fh:
        raw = json.load(fh)
    allowed = {"inputs", "transform", "column", "p_c", "theta", "z",
               "beta", "nu_par", "nu_perp", "t_min", "max_rel_err", "out"}
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigError(f"unknown collapse keys: {sorted(unknown)}")
    transform = raw.get("transform")
    if transform not in ("critical_L", "off_critical_p"):
        raise ConfigError("transform must be 'critical_L' or 'off_critical_p'")
    column = raw.get("column", "rho_active")
    t_min = float(raw.get("t_min", 100.0))
    max_rel = raw.get("max_rel_err")
    curves = {}
    for item in raw.get("inputs", []):
        ts = TimeSeries.from_csv(item["path"])
        t, y = ts.curve(column)
        keep = (t >= t_min) & (y > 0)
        if max_rel is not None:
            keep &= ts.stderr[column] <= float(max_rel) * y
        curves[float(item["key"])] = (t[keep], y[keep])
    if len(curves) < 2:
        raise ConfigError("collapse needs at least two input curves")
    exp = _collapse_exponents(raw)
    transformed = collapse_transform(curves, transform, float(raw.get("p_c", 0.0)), exp)
    score = collapse_score(transformed)
    out = args.out or raw.get("out")
    if out:
        with open(out, "w") as fh:
            fh.write("key,x,y\n")
            for key in sorted(transformed):
                x, y = transformed[key]
                for xv, yv in zip(x, y):
                    fh.write(f"{key:.17g},{xv:.17g},{yv:.17g}\n")
    print(f"collapse: score={score:.17g}" + (f"; wrote {out}" if out else ""))
    return 0


def _cmd_oracle_check(args) -> int:
    sizes = tuple(int(s) for s in args.sizes.split(","))
    report = oracle_check(depth=args.depth, sizes=sizes, trials=args.trials, seed=args.seed)
    print(
        "oracle-check: max deviations covariance={max_covariance:.3g} "
        "born={max_born:.3g} renyi2={max_renyi2:.3g}".format(**report)
    )
    if report["failures"]:
        path = args.out or "oracle_failures.json"
        dump_failures(report, path)
        print(f"oracle-check: FAILED ({len(report['failures'])} scripts); replay dump: {path}")
        return 1
    print("oracle-check: OK")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fermisteer",
        description="Adaptive free-fermion circuit simulator and analysis toolkit",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    for mode in ("quantum", "classical", "barw"):
        sub = subs.add_parser(mode, help=f"run a {mode} ensemble")
        _add_run_flags(sub)
    sweep = subs.add_parser("sweep", help="phase-diagram sweep over (p, r) points")
    _add_run_flags(sweep)
    prof = subs.add_parser("entropy-profile", help="steady-state entanglement profile and chord fit")
    _add_run_flags(prof)
    col = subs.add_parser("collapse", help="scaling collapse of stored curves")
    col.add_argument("--config", required=True)
    col.add_argument("--out")
    oc = subs.add_parser("oracle-check", help="differential test against the Fock oracle")
    oc.add_argument("--depth", type=int, default=10)
    oc.add_argument("--sizes", default="2,4,6,8")
    oc.add_argument("--trials", type=int, default=100)
    oc.add_argument("--seed", type=int, default=0)
    oc.add_argument("--out", help="failure dump path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command in ("quantum", "classical", "barw"):
            return _cmd_run(args, args.command)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "entropy-profile":
            return _cmd_entropy_profile(args)
        if args.command == "collapse":
            return _cmd_collapse(args)
        return _cmd_oracle_check(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
