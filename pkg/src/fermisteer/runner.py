"""Ensemble orchestration and data emission.

Trajectories are embarrassingly parallel: each one runs on its own
counter-based stream keyed by (master seed, trajectory index), workers are
pinned to single-threaded BLAS, and the reduction always sums in
trajectory-index order, so the emitted bytes depend only on (config, seed)
and never on the worker count.
"""
from __future__ import annotations

import json

import numpy as np
from joblib import Parallel, delayed
from threadpoolctl import threadpool_limits

from . import __version__
from .circuit import ProbeSpec, run_trajectory
from .classical import run_barw, run_classical
from .config import ExperimentConfig
from .observables import TimeSeries, chord_coordinate, ensemble_average
from .scaling import fit_log_chord


def _one_trajectory(config: ExperimentConfig, index: int) -> TimeSeries:
    with threadpool_limits(limits=1):
        if config.mode == "quantum":
            probe = ProbeSpec(entropy_cuts=config.entropy_cut_sizes())
            return run_trajectory(config.circuit_params(), probe, trajectory_index=index)
        if config.mode == "classical":
            return run_classical(config.circuit_params(), noise=config.noise, trajectory_index=index)
        return run_barw(config.barw_params(), trajectory_index=index)


def run_ensemble(config: ExperimentConfig, threads: int = 1) -> TimeSeries:
    indices = range(config.trajectories)
    if threads > 1:
        series = Parallel(n_jobs=threads, backend="loky")(
            delayed(_one_trajectory)(config, k) for k in indices
        )
    else:
        series = [_one_trajectory(config, k) for k in indices]
    ts = ensemble_average(series)
    ts.metadata = {
        "config": config.to_dict(),
        "master_seed": config.seed,
        "version": __version__,
        "trajectories": config.trajectories,
    }
    return ts


def write_outputs(ts: TimeSeries, out_path: str) -> None:
    ts.to_csv(out_path)
    with open(f"{out_path}.meta.json", "w") as fh:
        json.dump(ts.metadata | {"columns": ts.column_names()}, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_experiment(config: ExperimentConfig, out_path: str | None = None, threads: int = 1) -> TimeSeries:
    """Run the configured ensemble; write the CSV and metadata sidecar if a path is set."""
    ts = run_ensemble(config, threads=threads)
    path = out_path or config.out
    if path:
        write_outputs(ts, path)
    return ts


def final_entropy_profile(ts: TimeSeries, L: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(sizes, chords, mean entropy, stderr) at the last probe time of a quantum ensemble."""
    names = [n for n in ts.column_names() if n.startswith("S2_A")]
    if not names:
        raise ValueError("ensemble has no entropy columns; set entropy_cuts")
    sizes = np.array(sorted(int(n.split("S2_A")[1]) for n in names))
    s = np.array([ts.columns[f"S2_A{a}"][-1] for a in sizes])
    err = np.array([ts.stderr[f"S2_A{a}"][-1] for a in sizes])
    return sizes, chord_coordinate(L, sizes), s, err


def run_sweep(
    grid: list[tuple[float, float]],
    base: ExperimentConfig,
    threads: int = 1,
) -> list[dict]:
    """Quantum ensemble per (p, r) grid point: steady-state densities plus the chord fit.

    Point failures are recorded in the row's ``error`` field without aborting
    the remaining points.
    """
    if not grid:
        raise ValueError("sweep grid is empty")
    rows = []
    for p, r in grid:
        row = {"p": p, "r": r, "rho_active": np.nan, "delta": np.nan,
               "alpha": np.nan, "r_squared": np.nan, "error": ""}
        try:
            cfg_dict = base.to_dict() | {"p": p, "r": r, "out": None}
            cfg_dict = {k: v for k, v in cfg_dict.items() if v is not None}
            cfg = ExperimentConfig.from_dict(cfg_dict)
            ts = run_ensemble(cfg, threads=threads)
            row["rho_active"] = float(ts.columns["rho_active"][-1])
            row["delta"] = float(ts.columns["delta"][-1])
            if cfg.entropy_cut_sizes():
                _, chords, s, _ = final_entropy_profile(ts, cfg.L)
                alpha, _, r2 = fit_log_chord(chords, s)
                row["alpha"], row["r_squared"] = alpha, r2
        except Exception as exc:  # per-point isolation is the contract here
            row["error"] = str(exc).replace(",", ";")
        rows.append(row)
    return rows


def write_sweep_table(rows: list[dict], out_path: str) -> None:
    cols = ["p", "r", "rho_active", "delta", "alpha", "r_squared", "error"]
    with open(out_path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for row in rows:
            cells = []
            for c in cols:
                v = row[c]
                cells.append(v if isinstance(v, str) else f"{v:.17g}")
            fh.write(",".join(cells) + "\n")
