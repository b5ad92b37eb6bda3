"""Conventions shared by the quantum circuit and its classical twin.

Sites are 0-based on a periodic ring of even length L.  "Odd" links are the
1-based bonds (2j-1, 2j), i.e. lower site 0, 2, 4, ... here; "even" links have
lower site 1, 3, ..., L-1, the last one wrapping to site 0.  The steering
target is the charge-density-wave pattern with site 0 occupied; measured pairs
matching the target pattern are deactivated, anti-matching pairs trigger the
feedback swap.
"""
from __future__ import annotations

import numpy as np

PARITIES = ("odd", "even")


def link_sites(L: int, parity: str) -> tuple[np.ndarray, np.ndarray]:
    """Arrays (a, b) of lower/upper sites of all links of one parity."""
    if L % 2:
        raise ValueError("periodic brickwork needs even L")
    if parity == "odd":
        a = np.arange(0, L, 2)
    elif parity == "even":
        a = np.arange(1, L, 2)
    else:
        raise ValueError(f"link parity must be 'odd' or 'even', got {parity!r}")
    return a, (a + 1) % L


def target_pattern(L: int, phase: int = 0) -> np.ndarray:
    """Occupation pattern of the steering target; phase selects the translate."""
    return ((np.arange(L) + phase) % 2 == 0).astype(np.uint8)


def initial_occupations(kind, L: int, rng: np.random.Generator) -> np.ndarray:
    """Resolve an initial-state spec: 'neel', 'random_half_filling', or explicit bits."""
    if isinstance(kind, str):
        if kind == "neel":
            return target_pattern(L)
        if kind == "random_half_filling":
            occ = np.zeros(L, dtype=np.uint8)
            occ[rng.permutation(L)[: L // 2]] = 1
            return occ
        if set(kind) <= {"0", "1"} and len(kind) == L:
            return np.array([int(c) for c in kind], dtype=np.uint8)
        raise ValueError(f"unknown initial state {kind!r}")
    occ = np.asarray(kind, dtype=np.uint8)
    if occ.size != L:
        raise ValueError("explicit initial bitstring has wrong length")
    return occ


def trajectory_stream(master_seed: int, trajectory_index: int) -> np.random.Generator:
    """Independent counter-based stream for one trajectory of an ensemble."""
    return np.random.Generator(np.random.Philox(key=[master_seed, trajectory_index]))


def probe_times(t_max: int, probe_interval: int) -> np.ndarray:
    if probe_interval < 1:
        raise ValueError("probe interval must be positive")
    return np.arange(0, t_max + 1, probe_interval)
