"""Diagnostics extracted from trajectory states, and ensemble reduction."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gaussian import GaussianState


@dataclass
class TimeSeries:
    """Probe times plus named real-valued columns (optionally with standard errors)."""

    times: np.ndarray
    columns: dict[str, np.ndarray]
    stderr: dict[str, np.ndarray] | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times)
        n = self.times.size
        for name, col in self.columns.items():
            self.columns[name] = np.asarray(col, dtype=float)
            if self.columns[name].size != n:
                raise ValueError(f"column {name!r} length does not match times")
        if self.stderr is not None:
            for name, col in self.stderr.items():
                self.stderr[name] = np.asarray(col, dtype=float)
                if self.stderr[name].size != n:
                    raise ValueError(f"stderr {name!r} length does not match times")
                if np.any(self.stderr[name] < 0):
                    raise ValueError("standard errors must be nonnegative")

    def column_names(self) -> list[str]:
        return list(self.columns)

    def curve(self, name: str) -> tuple[np.ndarray, np.ndarray]:
        return self.times, self.columns[name]

    def to_csv(self, path) -> None:
        names = self.column_names()
        err = self.stderr or {n: np.zeros(self.times.size) for n in names}
        with open(path, "w") as fh:
            header = ["t"]
            for n in names:
                header += [f"{n}_mean", f"{n}_stderr"]
            fh.write(",".join(header) + "\n")
            for k, t in enumerate(self.times):
                row = [f"{int(t)}"]
                for n in names:
                    row += [f"{self.columns[n][k]:.17g}", f"{err[n][k]:.17g}"]
                fh.write(",".join(row) + "\n")

    @classmethod
    def from_csv(cls, path) -> "TimeSeries":
        with open(path) as fh:
            header = fh.readline().strip().split(",")
            data = np.array(
                [[float(x) for x in line.strip().split(",")] for line in fh if line.strip()]
            )
        if header[0] != "t" or (len(header) - 1) % 2:
            raise ValueError(f"{path}: not a fermisteer time-series CSV")
        names = [h[: -len("_mean")] for h in header[1::2]]
        cols = {n: data[:, 1 + 2 * k] for k, n in enumerate(names)}
        errs = {n: data[:, 2 + 2 * k] for k, n in enumerate(names)}
        return cls(times=data[:, 0].astype(int), columns=cols, stderr=errs)


def active_density(flags) -> float:
    """Fraction of sites whose classical flag is active."""
    f = np.asarray(flags)
    return float(np.mean(f))


def occupation_imbalance(occupations) -> float:
    """Mean absolute occupation difference across neighboring sites (periodic)."""
    n = np.asarray(occupations, dtype=float)
    return float(np.mean(np.abs(n - np.roll(n, -1))))


def charge_imbalance(state: GaussianState) -> float:
    """Per-trajectory charge imbalance of the quantum state (1 on the CDW target)."""
    return occupation_imbalance(state.occupations())


def chord_coordinate(L: int, sizes) -> np.ndarray:
    """log((L/pi) sin(pi |A| / L)), the finite-ring stand-in for log|A|."""
    a = np.asarray(sizes, dtype=float)
    return np.log((L / np.pi) * np.sin(np.pi * a / L))


def entropy_profile(state: GaussianState, n: int, cuts) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Renyi-n entropies of the regions [0, cut) plus the chord coordinate per cut."""
    sizes = np.asarray(list(cuts), dtype=int)
    if np.any(sizes <= 0) or np.any(sizes >= state.L):
        raise ValueError("cuts must lie strictly between 0 and L")
    ent = np.array([state.renyi_entropy(range(int(a)), n) for a in sizes])
    return sizes, chord_coordinate(state.L, sizes), ent


def ensemble_average(series: list[TimeSeries]) -> TimeSeries:
    """Mean and standard error per column per probe time over trajectories."""
    if not series:
        raise ValueError("empty ensemble")
    first = series[0]
    names = first.column_names()
    for s in series[1:]:
        if s.column_names() != names or not np.array_equal(s.times, first.times):
            raise ValueError("ensemble members disagree on times or columns")
    n = len(series)
    cols, errs = {}, {}
    for name in names:
        stack = np.stack([s.columns[name] for s in series])
        cols[name] = stack.mean(axis=0)
        if n > 1:
            errs[name] = stack.std(axis=0, ddof=1) / np.sqrt(n)
        else:
            errs[name] = np.zeros(stack.shape[1])
    meta = dict(first.metadata)
    meta["trajectories"] = n
    return TimeSeries(times=first.times.copy(), columns=cols, stderr=errs, metadata=meta)
