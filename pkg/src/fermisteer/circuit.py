"""The adaptive brickwork protocol driving a Gaussian state plus flag register.

One time step is: unitary layer on odd links, measurement layer on odd links,
then the same two layers on even links.  Gates (hopping or pairing, equal
probability, angle pi/4) act on links with at least one active endpoint and
reactivate both endpoints.  Measured pairs matching the target pattern are
deactivated; anti-matching pairs receive a feedback swap (probability r) and
are then deactivated; equal pairs are left alone.

Per half-layer the trajectory stream is consumed in a fixed order: unitary
layers draw one gate-type uniform per link; measurement layers draw one
measurement-decision uniform per link, then one outcome uniform per link for
the lower-indexed site, one for the higher, and one feedback uniform per link.
Draws are made for every link whether used or not, so a trajectory is fully
determined by (seed, trajectory index).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gaussian import GaussianState, RankDeficiencyError
from .observables import TimeSeries, active_density, charge_imbalance
from .protocol import (
    initial_occupations,
    link_sites,
    probe_times,
    target_pattern,
    trajectory_stream,
)

GATE_ANGLE = np.pi / 4
FULL_ORTHO_PERIOD = 10


class SimulationError(RuntimeError):
    """A trajectory failed; carries the trajectory index and time step."""


@dataclass
class CircuitParams:
    L: int
    p: float
    r: float
    t_max: int
    seed: int = 0
    initial_state: str = "random_half_filling"
    probe_interval: int = 1

    def __post_init__(self):
        if self.L < 2 or self.L % 2:
            raise ValueError("L must be even and at least 2")
        if not (0.0 <= self.p <= 1.0 and 0.0 <= self.r <= 1.0):
            raise ValueError("rates p and r must lie in [0, 1]")
        if self.t_max < 0:
            raise ValueError("t_max must be nonnegative")
        if self.probe_interval < 1:
            raise ValueError("probe_interval must be positive")


@dataclass
class ProbeSpec:
    """What to record at each probe time."""

    entropy_cuts: tuple[int, ...] = ()
    entropy_order: int = 2

    def column_names(self) -> list[str]:
        names = ["rho_active", "delta"]
        names += [f"S{self.entropy_order}_A{a}" for a in self.entropy_cuts]
        return names


@dataclass
class TrajectoryState:
    state: GaussianState
    flags: np.ndarray
    rng: np.random.Generator
    t: int = 0
    target_phase: int = 0
    events: list | None = None

    def log(self, kind: str, sites) -> None:
        if self.events is not None:
            self.events.append((self.t, kind, tuple(int(s) for s in sites)))


def init_trajectory(
    params: CircuitParams,
    trajectory_index: int = 0,
    record_events: bool = False,
    target_phase: int = 0,
) -> TrajectoryState:
    rng = trajectory_stream(params.seed, trajectory_index)
    occ = initial_occupations(params.initial_state, params.L, rng)
    return TrajectoryState(
        state=GaussianState.from_occupations(occ),
        flags=np.ones(params.L, dtype=np.uint8),
        rng=rng,
        t=0,
        target_phase=target_phase,
        events=[] if record_events else None,
    )


def unitary_half_layer(traj: TrajectoryState, link_parity: str) -> TrajectoryState:
    """Random hopping/pairing gates at angle pi/4 on links with an active endpoint."""
    L = traj.state.L
    a_sites, b_sites = link_sites(L, link_parity)
    u_gate = traj.rng.random(a_sites.size)
    for a, b, u in zip(a_sites, b_sites, u_gate):
        if not (traj.flags[a] or traj.flags[b]):
            continue
        kind = "hopping" if u < 0.5 else "pairing"
        traj.state.apply_two_site(kind, int(a), int(b), GATE_ANGLE)
        traj.flags[a] = traj.flags[b] = 1
        traj.log(f"gate_{kind}", (a, b))
    return traj


def measurement_half_layer(traj: TrajectoryState, link_parity: str, p: float, r: float) -> TrajectoryState:
    """Pair measurements at rate p with target-conditioned deactivation and feedback."""
    L = traj.state.L
    a_sites, b_sites = link_sites(L, link_parity)
    n_links = a_sites.size
    u_meas = traj.rng.random(n_links)
    u_first = traj.rng.random(n_links)
    u_second = traj.rng.random(n_links)
    u_fb = traj.rng.random(n_links)
    target = target_pattern(L, traj.target_phase)
    for k in range(n_links):
        if u_meas[k] >= p:
            continue
        a, b = int(a_sites[k]), int(b_sites[k])
        lo, hi = (a, b) if a < b else (b, a)
        u_lo, u_hi = u_first[k], u_second[k]
        bits = {lo: traj.state.measure_occupation(lo, u_lo)}
        bits[hi] = traj.state.measure_occupation(hi, u_hi)
        n_a, n_b = bits[a], bits[b]
        if (n_a, n_b) == (target[a], target[b]):
            traj.flags[a] = traj.flags[b] = 0
            traj.log("deactivate", (a, b))
        elif (n_a, n_b) == (1 - target[a], 1 - target[b]):
            if u_fb[k] < r:
                traj.state.apply_mode_swap(a, b)
                traj.flags[a] = traj.flags[b] = 0
                traj.log("feedback_swap", (a, b))
    return traj


def step(traj: TrajectoryState, params: CircuitParams) -> TrajectoryState:
    unitary_half_layer(traj, "odd")
    measurement_half_layer(traj, "odd", params.p, params.r)
    unitary_half_layer(traj, "even")
    measurement_half_layer(traj, "even", params.p, params.r)
    traj.t += 1
    if traj.t % FULL_ORTHO_PERIOD == 0:
        traj.state.orthonormalize()
    return traj


def _record(traj: TrajectoryState, probe: ProbeSpec, out: dict[str, list]) -> None:
    out["rho_active"].append(active_density(traj.flags))
    out["delta"].append(charge_imbalance(traj.state))
    for a in probe.entropy_cuts:
        s = traj.state.renyi_entropy(range(int(a)), probe.entropy_order)
        out[f"S{probe.entropy_order}_A{a}"].append(s)


def run_trajectory(
    params: CircuitParams,
    probe: ProbeSpec | None = None,
    trajectory_index: int = 0,
    target_phase: int = 0,
) -> TimeSeries:
    """Evolve one trajectory for t_max steps, recording probes every probe_interval."""
    probe = probe or ProbeSpec()
    traj = init_trajectory(params, trajectory_index, target_phase=target_phase)
    times = probe_times(params.t_max, params.probe_interval)
    out: dict[str, list] = {name: [] for name in probe.column_names()}
    try:
        _record(traj, probe, out)
        for t in range(1, params.t_max + 1):
            step(traj, params)
            if t % params.probe_interval == 0:
                _record(traj, probe, out)
    except RankDeficiencyError as exc:
        raise SimulationError(
            f"trajectory {trajectory_index} failed at step {traj.t}: {exc}"
        ) from exc
    cols = {name: np.asarray(vals) for name, vals in out.items()}
    meta = {"params": params.__dict__.copy(), "trajectory_index": trajectory_index}
    return TimeSeries(times=times, columns=cols, metadata=meta)
