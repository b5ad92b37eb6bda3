"""Experiment configuration: a strict, flat JSON key set per run mode."""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .circuit import CircuitParams
from .classical import BarwParams

_COMMON_KEYS = {"mode", "seed", "trajectories", "out"}
_CIRCUIT_KEYS = {"L", "p", "r", "t_max", "probe_interval", "initial_state"}
_ALLOWED = {
    "quantum": _COMMON_KEYS | _CIRCUIT_KEYS | {"entropy_cuts"},
    "classical": _COMMON_KEYS | _CIRCUIT_KEYS | {"noise"},
    "barw": _COMMON_KEYS | {"L", "q", "branch_prob", "t_max", "probe_interval"},
}
_REQUIRED = {
    "quantum": {"mode", "L", "p", "r", "t_max"},
    "classical": {"mode", "L", "p", "r", "t_max"},
    "barw": {"mode", "L", "q", "t_max"},
}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    mode: str
    L: int
    t_max: int
    p: float | None = None
    r: float | None = None
    q: float | None = None
    branch_prob: float = 0.5
    seed: int = 0
    trajectories: int = 1
    probe_interval: int = 1
    initial_state: str = "random_half_filling"
    noise: float = 0.0
    entropy_cuts: list[float] = field(default_factory=list)
    out: str | None = None

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        mode = raw.get("mode")
        if mode not in _ALLOWED:
            raise ConfigError(f"mode must be one of {sorted(_ALLOWED)}, got {mode!r}")
        unknown = set(raw) - _ALLOWED[mode]
        if unknown:
            raise ConfigError(f"unknown config keys for mode {mode!r}: {sorted(unknown)}")
        missing = _REQUIRED[mode] - set(raw)
        if missing:
            raise ConfigError(f"missing config keys for mode {mode!r}: {sorted(missing)}")
        cfg = cls(
            mode=mode,
            L=int(raw["L"]),
            t_max=int(raw["t_max"]),
            p=float(raw["p"]) if "p" in raw else None,
            r=float(raw["r"]) if "r" in raw else None,
            q=float(raw["q"]) if "q" in raw else None,
            branch_prob=float(raw.get("branch_prob", 0.5)),
            seed=int(raw.get("seed", 0)),
            trajectories=int(raw.get("trajectories", 1)),
            probe_interval=int(raw.get("probe_interval", 1)),
            initial_state=raw.get("initial_state", "random_half_filling"),
            noise=float(raw.get("noise", 0.0)),
            entropy_cuts=list(raw.get("entropy_cuts", [])),
            out=raw.get("out"),
        )
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.trajectories < 1:
            raise ConfigError("trajectories must be at least 1")
        try:
            if self.mode in ("quantum", "classical"):
                self.circuit_params()
            else:
                self.barw_params()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if not (0.0 <= self.noise <= 1.0):
            raise ConfigError("noise rate must lie in [0, 1]")
        for frac in self.entropy_cuts:
            if not (0.0 < frac < 1.0):
                raise ConfigError("entropy cuts are region fractions in (0, 1)")

    def circuit_params(self) -> CircuitParams:
        return CircuitParams(
            L=self.L,
            p=self.p,
            r=self.r,
            t_max=self.t_max,
            seed=self.seed,
            initial_state=self.initial_state,
            probe_interval=self.probe_interval,
        )

    def barw_params(self) -> BarwParams:
        return BarwParams(
            L=self.L,
            q=self.q,
            t_max=self.t_max,
            seed=self.seed,
            branch_prob=self.branch_prob,
            probe_interval=self.probe_interval,
        )

    def entropy_cut_sizes(self) -> tuple[int, ...]:
        sizes = sorted({int(round(frac * self.L)) for frac in self.entropy_cuts})
        sizes = [a for a in sizes if 0 < a < self.L]
        return tuple(sizes)

    def to_dict(self) -> dict:
        keys = _ALLOWED[self.mode]
        full = {
            "mode": self.mode, "L": self.L, "p": self.p, "r": self.r, "q": self.q,
            "branch_prob": self.branch_prob, "seed": self.seed,
            "trajectories": self.trajectories, "probe_interval": self.probe_interval,
            "initial_state": self.initial_state, "noise": self.noise,
            "entropy_cuts": self.entropy_cuts, "t_max": self.t_max, "out": self.out,
        }
        return {k: full[k] for k in sorted(keys) if full[k] is not None}


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return ExperimentConfig.from_dict(raw)
