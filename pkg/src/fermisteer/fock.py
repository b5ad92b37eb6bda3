"""Brute-force Fock-space simulator used as ground truth for small systems.

States live in the full 2^L dimensional occupation basis (index bit i = site i,
0-based).  Fermionic signs follow the Jordan-Wigner convention with ascending
site order, which is the single source of truth the Gaussian simulator's
conventions are checked against.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

MAX_SITES = 12
CERTAINTY_EPS = 1e-12


@lru_cache(maxsize=None)
def _popcount_table(L: int) -> np.ndarray:
    idx = np.arange(1 << L, dtype=np.int64)
    pop = np.zeros(1 << L, dtype=np.int64)
    while np.any(idx):
        pop += idx & 1
        idx >>= 1
    return pop


class FockState:
    def __init__(self, L: int, amplitudes: np.ndarray):
        if L > MAX_SITES:
            raise ValueError(f"Fock simulator capped at {MAX_SITES} sites")
        amps = np.asarray(amplitudes, dtype=complex)
        if amps.shape != (1 << L,):
            raise ValueError("amplitude table has wrong size")
        self.L = L
        self.amps = amps.copy()
        self._pop = _popcount_table(L)

    @classmethod
    def from_occupations(cls, occupations) -> "FockState":
        occ = np.asarray(occupations, dtype=int)
        L = occ.size
        amps = np.zeros(1 << L, dtype=complex)
        index = 0
        for i, n in enumerate(occ):
            if n:
                index |= 1 << i
        amps[index] = 1.0
        return cls(L, amps)

    def copy(self) -> "FockState":
        return FockState(self.L, self.amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    # -- elementary operators ---------------------------------------------

    def _annihilate(self, psi: np.ndarray, i: int) -> np.ndarray:
        out = np.zeros_like(psi)
        idx = np.arange(psi.size)
        src = idx[(idx >> i) & 1 == 1]
        sign = 1 - 2 * (self._pop[src & ((1 << i) - 1)] & 1)
        out[src ^ (1 << i)] = sign * psi[src]
        return out

    def _create(self, psi: np.ndarray, i: int) -> np.ndarray:
        out = np.zeros_like(psi)
        idx = np.arange(psi.size)
        src = idx[(idx >> i) & 1 == 0]
        sign = 1 - 2 * (self._pop[src & ((1 << i) - 1)] & 1)
        out[src | (1 << i)] = sign * psi[src]
        return out

    def _quadratic(self, psi: np.ndarray, kind: str, i: int, j: int) -> np.ndarray:
        if kind == "hopping":  # c^dag_i c_j + c^dag_j c_i
            return self._create(self._annihilate(psi, j), i) + self._create(
                self._annihilate(psi, i), j
            )
        # pairing: c^dag_i c^dag_j + c_j c_i
        return self._create(self._create(psi, j), i) + self._annihilate(
            self._annihilate(psi, i), j
        )

    # -- gates --------------------------------------------------------------

    def apply_gate(self, kind: str, i: int, j: int, angle: float) -> "FockState":
        """Apply exp(-i * angle * H) for H = hopping or pairing on sites i, j.

        Both generators satisfy H^3 = H, so the exponential closes after H^2.
        The pairing generator is antisymmetric in (i, j); the sign is fixed by
        the same i < j convention as the Gaussian kernel builder.
        """
        if i == j:
            raise ValueError("gate requires two distinct sites")
        if kind == "pairing":
            i, j = (i, j) if i < j else (j, i)
        h1 = self._quadratic(self.amps, kind, i, j)
        h2 = self._quadratic(h1, kind, i, j)
        self.amps = self.amps - 1j * np.sin(angle) * h1 + (np.cos(angle) - 1.0) * h2
        return self

    def apply_mode_swap(self, i: int, j: int) -> "FockState":
        """Exact Fock image of the mode relabeling i <-> j (vacuum phase +1)."""
        if i == j:
            raise ValueError("swap requires two distinct sites")
        a, b = (i, j) if i < j else (j, i)
        idx = np.arange(self.amps.size)
        ni = (idx >> a) & 1
        nj = (idx >> b) & 1
        between = ((1 << b) - 1) ^ ((1 << (a + 1)) - 1)
        sign = np.where(
            ni == nj,
            np.where(ni == 1, -1, 1),
            1 - 2 * (self._pop[idx & between] & 1),
        )
        target = np.where(ni == nj, idx, idx ^ (1 << a) ^ (1 << b))
        out = np.zeros_like(self.amps)
        out[target] = sign * self.amps
        self.amps = out
        return self

    # -- measurement ----------------------------------------------------------

    def born_probability(self, i: int) -> float:
        idx = np.arange(self.amps.size)
        mask = (idx >> i) & 1 == 1
        return float(np.sum(np.abs(self.amps[mask]) ** 2))

    def measure_occupation(self, i: int, u: float) -> int:
        p1 = self.born_probability(i)
        if p1 >= 1.0 - CERTAINTY_EPS:
            return 1
        if p1 <= CERTAINTY_EPS:
            return 0
        outcome = 1 if u < p1 else 0
        idx = np.arange(self.amps.size)
        keep = ((idx >> i) & 1) == outcome
        self.amps[~keep] = 0.0
        self.amps /= np.linalg.norm(self.amps)
        return outcome

    # -- observables ------------------------------------------------------------

    def covariance(self) -> np.ndarray:
        """2L x 2L matrix [[<c c^dag>, <c c>], [<c^dag c^dag>, <c^dag c>]]."""
        L = self.L
        v = np.column_stack([self._create(self.amps, b) for b in range(L)])
        w = np.column_stack([self._annihilate(self.amps, b) for b in range(L)])
        vv = v.conj().T @ v
        vw = v.conj().T @ w
        wv = w.conj().T @ v
        ww = w.conj().T @ w
        return np.block([[vv, vw], [wv, ww]])

    def occupations(self) -> np.ndarray:
        idx = np.arange(self.amps.size)
        prob = np.abs(self.amps) ** 2
        return np.array([np.sum(prob[(idx >> i) & 1 == 1]) for i in range(self.L)])

    def parity(self) -> float:
        """Expectation of prod_i (1 - 2 n_i)."""
        sign = 1 - 2 * (self._pop & 1)
        return float(np.sum(sign * np.abs(self.amps) ** 2))

    def renyi_entropy(self, region, n: int = 2) -> float:
        sites = sorted(int(s) for s in region)
        L = self.L
        if not sites or len(sites) >= L:
            raise ValueError("region must be a nonempty proper subset of sites")
        tensor = self.amps.reshape([2] * L)  # axis k corresponds to site L-1-k
        axes_a = [L - 1 - s for s in sites]
        axes_rest = [k for k in range(L) if k not in axes_a]
        m = tensor.transpose(axes_a + axes_rest).reshape(1 << len(sites), -1)
        sv = np.linalg.svd(m, compute_uv=False)
        probs = sv**2
        probs = probs[probs > 1e-300]
        return float(np.log(np.sum(probs**n)) / (1 - n))
