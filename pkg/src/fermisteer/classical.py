"""Classical stochastic twin of the circuit, and the branching-annihilating
random walk used as the parity-conserving reference process.

The twin evolves one definite occupation bitstring plus the flag register under
the support-level transition rules of the gates: a pi/4 hopping gate resamples
an unequal pair uniformly from {10, 01}, a pairing gate resamples an equal pair
uniformly from {00, 11} (squared-amplitude weights), and measurements read the
definite pair and apply the same deactivation/feedback rules as the quantum
circuit.  All half-layer updates are vectorized over the disjoint links of one
parity; per half-layer the stream is consumed as fixed-size uniform blocks
(gate type + resample value for unitary layers, measurement decision + feedback
for measurement layers).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .observables import TimeSeries, active_density, occupation_imbalance
from .protocol import (
    initial_occupations,
    link_sites,
    probe_times,
    target_pattern,
    trajectory_stream,
)

BondConfig = np.ndarray  # bit per bond: 1 iff the two neighboring occupations are equal


@dataclass
class ClassicalState:
    bits: np.ndarray
    flags: np.ndarray
    t: int = 0
    target_phase: int = 0

    @classmethod
    def from_occupations(cls, occupations, target_phase: int = 0) -> "ClassicalState":
        bits = np.asarray(occupations, dtype=np.uint8).copy()
        return cls(bits=bits, flags=np.ones(bits.size, dtype=np.uint8), target_phase=target_phase)

    @property
    def L(self) -> int:
        return self.bits.size

    def parity(self) -> int:
        return int(np.sum(self.bits) % 2)


def bond_particles(bits) -> BondConfig:
    """Bond occupation map: particle at bond i iff sites i and i+1 agree (periodic)."""
    b = np.asarray(bits)
    return (b == np.roll(b, -1)).astype(np.uint8)


def _unitary_links(bits, flags, a, b, u_gate, u_new) -> None:
    elig = (flags[a] | flags[b]).astype(bool)
    hop = u_gate < 0.5
    ba, bb = bits[a].astype(bool), bits[b].astype(bool)
    diff = ba != bb
    hop_act = elig & hop & diff        # hopping resamples within {10, 01}
    pair_act = elig & ~hop & ~diff     # pairing resamples within {00, 11}
    hi = u_new < 0.5                   # resampled value of the lower site
    na = np.where(hop_act | pair_act, hi, ba)
    nb = np.where(hop_act, ~hi, np.where(pair_act, hi, bb))
    bits[a] = na
    bits[b] = nb
    flags[a] |= elig
    flags[b] |= elig


def _measure_links(bits, flags, a, b, t_a, t_b, meas, fb) -> None:
    ba, bb = bits[a].astype(bool), bits[b].astype(bool)
    correct = meas & (ba == t_a) & (bb == t_b)
    wrong = meas & (ba != t_a) & (bb != t_b) & (ba != bb)
    swap = wrong & fb
    bits[a] = np.where(swap, t_a, ba)
    bits[b] = np.where(swap, t_b, bb)
    off = correct | swap
    flags[a] &= ~off
    flags[b] &= ~off


def classical_unitary_update(state: ClassicalState, i: int, rng: np.random.Generator) -> ClassicalState:
    """Gate-level update of the single link (i, i+1); draws gate type then resample value."""
    a = np.array([i])
    b = (a + 1) % state.L
    _unitary_links(state.bits, state.flags, a, b, rng.random(1), rng.random(1))
    return state


def classical_measure_feedback(
    state: ClassicalState, i: int, link_parity: str, p: float, r: float, rng: np.random.Generator
) -> ClassicalState:
    """Measurement-rule update of the single link (i, i+1) with the given parity role."""
    if link_parity not in ("odd", "even"):
        raise ValueError(f"link parity must be 'odd' or 'even', got {link_parity!r}")
    a = np.array([i])
    b = (a + 1) % state.L
    # odd links deactivate on (occupied, empty), even links on (empty, occupied),
    # both flipped when the target translate is shifted
    lower_occupied = (link_parity == "odd") == (state.target_phase % 2 == 0)
    t_a = np.array([lower_occupied])
    t_b = ~t_a
    _measure_links(
        state.bits, state.flags, a, b, t_a, t_b, rng.random(1) < p, rng.random(1) < r
    )
    return state


def _half_unitary(state: ClassicalState, parity: str, rng: np.random.Generator) -> None:
    a, b = link_sites(state.L, parity)
    _unitary_links(state.bits, state.flags, a, b, rng.random(a.size), rng.random(a.size))


def _half_measure(state: ClassicalState, parity: str, p: float, r: float, rng: np.random.Generator) -> None:
    a, b = link_sites(state.L, parity)
    target = target_pattern(state.L, state.target_phase).astype(bool)
    _measure_links(
        state.bits, state.flags, a, b, target[a], target[b],
        rng.random(a.size) < p, rng.random(a.size) < r,
    )


def classical_step(state: ClassicalState, p: float, r: float, rng: np.random.Generator) -> ClassicalState:
    """One time step mirroring the quantum schedule: odd U, odd M, even U, even M."""
    _half_unitary(state, "odd", rng)
    _half_measure(state, "odd", p, r, rng)
    _half_unitary(state, "even", rng)
    _half_measure(state, "even", p, r, rng)
    state.t += 1
    return state


def apply_bitflip_noise(state: ClassicalState, rate: float, rng: np.random.Generator) -> ClassicalState:
    """Flip every bit independently with the given probability (breaks parity)."""
    if not (0.0 <= rate <= 1.0):
        raise ValueError("noise rate must lie in [0, 1]")
    if rate > 0.0:
        flips = rng.random(state.L) < rate
        state.bits ^= flips.astype(np.uint8)
    return state


def run_classical(
    params,
    noise: float = 0.0,
    trajectory_index: int = 0,
    target_phase: int = 0,
) -> TimeSeries:
    """Full classical trajectory recording rho_active, delta, and bond density.

    ``params`` is a CircuitParams; the twin shares L, p, r, t_max, seed,
    initial_state, and probe_interval with the quantum model.
    """
    rng = trajectory_stream(params.seed, trajectory_index)
    occ = initial_occupations(params.initial_state, params.L, rng)
    state = ClassicalState.from_occupations(occ, target_phase=target_phase)
    times = probe_times(params.t_max, params.probe_interval)
    rho, delta, bond = [], [], []

    def record():
        rho.append(active_density(state.flags))
        delta.append(occupation_imbalance(state.bits))
        bond.append(float(np.mean(bond_particles(state.bits))))

    record()
    for t in range(1, params.t_max + 1):
        classical_step(state, params.p, params.r, rng)
        if noise:
            apply_bitflip_noise(state, noise, rng)
        if t % params.probe_interval == 0:
            record()
    cols = {"rho_active": np.array(rho), "delta": np.array(delta), "bond_density": np.array(bond)}
    meta = {"params": params.__dict__.copy(), "noise": noise, "trajectory_index": trajectory_index}
    return TimeSeries(times=times, columns=cols, metadata=meta)


# -- branching-annihilating random walk ------------------------------------


@dataclass
class BarwParams:
    L: int
    q: float
    t_max: int
    seed: int = 0
    branch_prob: float = 0.5
    probe_interval: int = 1

    def __post_init__(self):
        if not (0.0 <= self.q <= 1.0 and 0.0 <= self.branch_prob <= 1.0):
            raise ValueError("rates must lie in [0, 1]")
        # L >= 4 keeps the two branch targets distinct, which the pairwise
        # parity bookkeeping relies on
        if self.L < 4 or self.t_max < 0:
            raise ValueError("invalid lattice size or duration")


class _ParticleSet:
    """Occupancy array plus a position list supporting O(1) removal."""

    def __init__(self, L: int, positions):
        self.occ = np.zeros(L, dtype=bool)
        self.pos = list(int(p) for p in positions)
        self.slot = {}
        for k, p in enumerate(self.pos):
            self.occ[p] = True
            self.slot[p] = k

    def __len__(self):
        return len(self.pos)

    def add(self, p: int) -> None:
        self.slot[p] = len(self.pos)
        self.pos.append(p)
        self.occ[p] = True

    def remove(self, p: int) -> None:
        k = self.slot.pop(p)
        last = self.pos.pop()
        if last != p:
            self.pos[k] = last
            self.slot[last] = k
        self.occ[p] = False

    def move(self, p: int, q: int) -> None:
        k = self.slot.pop(p)
        self.pos[k] = q
        self.slot[q] = k
        self.occ[p] = False
        self.occ[q] = True


def run_barw(params: BarwParams, trajectory_index: int = 0) -> TimeSeries:
    """Hard-core walkers with two-offspring branching and pairwise annihilation.

    Each time step performs N(t) random sequential updates.  An update picks a
    particle; with probability branch_prob it branches (offspring on both
    neighbors, resolved atomically: a blocked placement aborts the whole event,
    otherwise an offspring landing on an occupied site annihilates with it),
    else it hops to a random neighbor (moving onto an occupied site annihilates
    both with probability q, otherwise the move is rejected).  Particle number
    changes only in pairs.
    """
    L = params.L
    rng = trajectory_stream(params.seed, trajectory_index)
    start = rng.permutation(L)[: L // 2]
    ps = _ParticleSet(L, start)
    times = probe_times(params.t_max, params.probe_interval)
    density = [len(ps) / L]
    for t in range(1, params.t_max + 1):
        for _ in range(len(ps)):
            if not ps.pos:
                break
            p = ps.pos[int(rng.integers(len(ps.pos)))]
            if rng.random() < params.branch_prob:
                left, right = (p - 1) % L, (p + 1) % L
                kill, place = [], []
                ok = True
                for tgt in (left, right):
                    if ps.occ[tgt]:
                        if rng.random() < params.q:
                            kill.append(tgt)
                        else:
                            ok = False
                            break
                    else:
                        place.append(tgt)
                if ok:
                    for tgt in kill:
                        ps.remove(tgt)
                    for tgt in place:
                        ps.add(tgt)
            else:
                tgt = (p + (1 if rng.random() < 0.5 else -1)) % L
                if ps.occ[tgt]:
                    if rng.random() < params.q:
                        ps.remove(tgt)
                        ps.remove(p)
                else:
                    ps.move(p, tgt)
        if t % params.probe_interval == 0:
            density.append(len(ps) / L)
    meta = {"params": params.__dict__.copy(), "trajectory_index": trajectory_index}
    return TimeSeries(times=times, columns={"density": np.array(density)}, metadata=meta)
