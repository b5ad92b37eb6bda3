"""Randomized differential testing of the Gaussian simulator against the
Fock-space oracle: random scripts of gates, swaps, and shared-draw measurements."""
from __future__ import annotations

import json

import numpy as np

from .fock import FockState
from .gaussian import GaussianState, build_gate_kernel

COV_TOL = 1e-8
RENYI_TOL = 1e-8
BORN_TOL = 1e-10


def random_script(L: int, depth: int, rng: np.random.Generator) -> list[dict]:
    """A serializable sequence of ops with every random choice already drawn."""
    script = [{"op": "init", "occupations": [int(b) for b in rng.integers(0, 2, L)]}]
    for _ in range(depth):
        kind = rng.choice(["hopping", "pairing", "swap", "measure"])
        if kind == "measure":
            script.append({"op": "measure", "i": int(rng.integers(L)), "u": float(rng.random())})
        elif kind == "swap":
            i, j = (int(x) for x in rng.choice(L, 2, replace=False))
            script.append({"op": "swap", "i": i, "j": j})
        else:
            i, j = (int(x) for x in rng.choice(L, 2, replace=False))
            script.append(
                {"op": "gate", "kind": str(kind), "i": i, "j": j,
                 "angle": float(rng.uniform(0, np.pi))}
            )
    return script


def run_script_pair(L: int, script: list[dict]) -> dict:
    """Run a script on both simulators; return the worst deviations observed."""
    gs = fk = None
    dev = {"covariance": 0.0, "born": 0.0, "renyi2": 0.0}
    for op in script:
        if op["op"] == "init":
            gs = GaussianState.from_occupations(op["occupations"])
            fk = FockState.from_occupations(op["occupations"])
        elif op["op"] == "gate":
            gs.apply_unitary(build_gate_kernel(op["kind"], op["i"], op["j"], op["angle"], L))
            fk.apply_gate(op["kind"], op["i"], op["j"], op["angle"])
        elif op["op"] == "swap":
            gs.apply_mode_swap(op["i"], op["j"])
            fk.apply_mode_swap(op["i"], op["j"])
        elif op["op"] == "measure":
            i, u = op["i"], op["u"]
            dev["born"] = max(dev["born"], abs(gs.born_probability(i) - fk.born_probability(i)))
            out_g = gs.measure_occupation(i, u)
            out_f = fk.measure_occupation(i, u)
            if out_g != out_f:
                dev["born"] = np.inf  # draws straddled a probability mismatch
        else:
            raise ValueError(f"unknown script op {op['op']!r}")
        dev["covariance"] = max(
            dev["covariance"], float(np.max(np.abs(gs.covariance() - fk.covariance())))
        )
    for m in range(1, L):
        dev["renyi2"] = max(
            dev["renyi2"],
            abs(gs.renyi_entropy(range(m), 2) - fk.renyi_entropy(range(m), 2)),
        )
    return dev


def oracle_check(depth: int = 10, sizes=(2, 4, 6, 8), trials: int = 100, seed: int = 0) -> dict:
    """Differential test campaign; the report's ``ok`` reflects the acceptance tolerances."""
    if max(sizes) > 12:
        raise ValueError("oracle sizes are capped at 12 sites")
    rng = np.random.default_rng(seed)
    report = {
        "depth": depth, "sizes": list(sizes), "trials": trials, "seed": seed,
        "max_covariance": 0.0, "max_born": 0.0, "max_renyi2": 0.0,
        "failures": [],
    }
    for L in sizes:
        for _ in range(trials):
            script = random_script(int(L), depth, rng)
            dev = run_script_pair(int(L), script)
            report["max_covariance"] = max(report["max_covariance"], dev["covariance"])
            report["max_born"] = max(report["max_born"], dev["born"])
            report["max_renyi2"] = max(report["max_renyi2"], dev["renyi2"])
            if dev["covariance"] > COV_TOL or dev["renyi2"] > RENYI_TOL or dev["born"] > BORN_TOL:
                report["failures"].append({"L": int(L), "script": script, "deviations": dev})
    report["ok"] = not report["failures"]
    return report


def dump_failures(report: dict, path) -> None:
    """Serialize failing scripts for replay."""
    with open(path, "w") as fh:
        json.dump(report["failures"], fh, indent=2)
        fh.write("\n")
