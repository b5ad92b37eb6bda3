"""Pure fermionic Gaussian states tracked through their annihilation-operator matrix.

A pure Gaussian state of L modes is stored as a 2L x L complex matrix ``alpha``
with orthonormal columns; column j encodes the operator

    d_j = sum_k  conj(alpha[k, j]) c_k + conj(alpha[k + L, j]) c^dag_k

that annihilates the state.  The single-particle covariance matrix is
``C = alpha @ alpha^dag`` in the block layout [[<c c^dag>, <c c>], [<c^dag c^dag>, <c^dag c>]].
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

ORTHO_TOL = 1e-12
RANK_TOL = 1e-10
CERTAINTY_EPS = 1e-12


class RankDeficiencyError(RuntimeError):
    """Column set of the mode matrix lost rank; indicates an upstream bug."""


@dataclass(frozen=True)
class QuadraticKernel:
    """Sparse Hermitian single-particle kernel H of a Gaussian unitary exp(-iH).

    Block structure [[A, B], [B^dag, -A^T]] with A Hermitian and B antisymmetric;
    only the nonzero entries are stored.
    """

    L: int
    entries: tuple[tuple[int, int, complex], ...]

    def active_indices(self) -> np.ndarray:
        idx = sorted({i for i, _, _ in self.entries} | {j for _, j, _ in self.entries})
        return np.asarray(idx, dtype=int)

    def dense(self) -> np.ndarray:
        h = np.zeros((2 * self.L, 2 * self.L), dtype=complex)
        for i, j, v in self.entries:
            h[i, j] += v
        return h

    def block(self) -> tuple[np.ndarray, np.ndarray]:
        """Dense kernel restricted to its active rows/columns, plus those indices."""
        idx = self.active_indices()
        pos = {int(k): n for n, k in enumerate(idx)}
        h = np.zeros((idx.size, idx.size), dtype=complex)
        for i, j, v in self.entries:
            h[pos[i], pos[j]] += v
        return h, idx

    def validate(self, tol: float = 1e-12) -> None:
        h, idx = self.block()
        if np.max(np.abs(h - h.conj().T), initial=0.0) > tol:
            raise ValueError("kernel is not Hermitian")
        L = self.L
        for i, j, _ in self.entries:
            if not (0 <= i < 2 * L and 0 <= j < 2 * L):
                raise ValueError("kernel entry out of range")


def build_gate_kernel(kind: str, i: int, j: int, angle: float, L: int) -> QuadraticKernel:
    """Kernel of the two-site gate exp(-i*angle*H) on sites i and j (0-based).

    kind "hopping" gives H = c^dag_i c_j + c^dag_j c_i; kind "pairing" gives
    H = c^dag_i c^dag_j + c_j c_i with the sign fixed by the ordering i < j.
    """
    if i == j:
        raise ValueError("gate requires two distinct sites")
    if not (0 <= i < L and 0 <= j < L):
        raise ValueError(f"site out of range for L={L}")
    th = complex(angle)
    if kind == "hopping":
        entries = (
            (i, j, th), (j, i, th),
            (L + i, L + j, -th), (L + j, L + i, -th),
        )
    elif kind == "pairing":
        a, b = (i, j) if i < j else (j, i)
        entries = (
            (a, L + b, th), (L + b, a, th),
            (b, L + a, -th), (L + a, b, -th),
        )
    else:
        raise ValueError(f"unknown gate kind {kind!r}")
    return QuadraticKernel(L=L, entries=entries)


@lru_cache(maxsize=None)
def _two_site_unitary(kind: str, angle: float) -> np.ndarray:
    """exp(-i*angle*H4) on the ordered block (a, b, L+a, L+b) with a < b."""
    th = float(angle)
    if kind == "hopping":
        h4 = np.array(
            [[0, th, 0, 0], [th, 0, 0, 0], [0, 0, 0, -th], [0, 0, -th, 0]], dtype=complex
        )
    elif kind == "pairing":
        h4 = np.array(
            [[0, 0, 0, th], [0, 0, -th, 0], [0, -th, 0, 0], [th, 0, 0, 0]], dtype=complex
        )
    else:
        raise ValueError(f"unknown gate kind {kind!r}")
    return scipy.linalg.expm(-1j * h4)


class GaussianState:
    """Pure fermionic Gaussian state on ``L`` sites."""

    def __init__(self, alpha: np.ndarray, copy: bool = True):
        alpha = np.array(alpha, dtype=complex, copy=copy)
        if alpha.ndim != 2 or alpha.shape[0] != 2 * alpha.shape[1]:
            raise ValueError("alpha must be a 2L x L matrix")
        self.alpha = alpha

    @property
    def L(self) -> int:
        return self.alpha.shape[1]

    def copy(self) -> "GaussianState":
        return GaussianState(self.alpha, copy=True)

    @classmethod
    def from_occupations(cls, occupations) -> "GaussianState":
        """Product state |n_0 n_1 ...>: empty site i is annihilated by c_i, occupied by c^dag_i."""
        occ = np.asarray(occupations, dtype=int)
        L = occ.size
        if L < 2:
            raise ValueError("need at least two sites")
        alpha = np.zeros((2 * L, L), dtype=complex)
        for i, n in enumerate(occ):
            alpha[i + L * int(bool(n)), i] = 1.0
        return cls(alpha, copy=False)

    # -- readers ---------------------------------------------------------

    def covariance(self) -> np.ndarray:
        return self.alpha @ self.alpha.conj().T

    def occupations(self) -> np.ndarray:
        """Vector of <n_i> = C[L+i, L+i]."""
        L = self.L
        return np.sum(np.abs(self.alpha[L:, :]) ** 2, axis=1)

    def born_probability(self, i: int) -> float:
        """P(n_i = 1) for an occupation measurement on site i."""
        return float(np.sum(np.abs(self.alpha[self.L + i, :]) ** 2))

    def column_gram_error(self) -> float:
        g = self.alpha.conj().T @ self.alpha
        return float(np.max(np.abs(g - np.eye(self.L))))

    def renyi_entropy(self, region, n: int = 2) -> float:
        """Renyi entropy of order n >= 2 for a set of sites (a proper nonempty subset)."""
        sites = np.asarray(list(region), dtype=int)
        L = self.L
        if sites.size == 0 or sites.size >= L:
            raise ValueError("region must be a nonempty proper subset of sites")
        if n < 2:
            raise ValueError("order must be an integer >= 2")
        rows = np.concatenate([sites, sites + L])
        sub = self.alpha[rows, :]
        c_a = sub @ sub.conj().T
        lam = np.linalg.eigvalsh(c_a)
        lam = np.clip(lam.real, 0.0, 1.0)
        s = np.sum(np.log(lam**n + (1.0 - lam) ** n)) / (2.0 * (1.0 - n))
        return max(float(s), 0.0)

    # -- evolution -------------------------------------------------------

    def apply_unitary(self, kernel: QuadraticKernel) -> "GaussianState":
        """alpha -> exp(-i H) alpha, exponentiating only the active block of H."""
        kernel.validate()
        h, idx = kernel.block()
        if idx.size == 0:
            return self
        u = scipy.linalg.expm(-1j * h)
        self.alpha[idx, :] = u @ self.alpha[idx, :]
        return self

    def apply_two_site(self, kind: str, i: int, j: int, angle: float) -> "GaussianState":
        """Fast path for the standard two-site gates; equals apply_unitary on the
        kernel from build_gate_kernel but reuses the cached 4x4 exponential."""
        if i == j:
            raise ValueError("gate requires two distinct sites")
        a, b = (i, j) if i < j else (j, i)
        L = self.L
        rows = [a, b, L + a, L + b]
        self.alpha[rows, :] = _two_site_unitary(kind, angle) @ self.alpha[rows, :]
        return self

    def apply_mode_swap(self, i: int, j: int) -> "GaussianState":
        """Exchange modes i and j (row permutation of alpha in both blocks)."""
        if i == j:
            raise ValueError("swap requires two distinct sites")
        L = self.L
        rows = [i, j, L + i, L + j]
        self.alpha[rows, :] = self.alpha[[j, i, L + j, L + i], :]
        return self

    def translate(self, shift: int) -> "GaussianState":
        """Relabel sites i -> i + shift (mod L) in both blocks."""
        L = self.L
        self.alpha[:L, :] = np.roll(self.alpha[:L, :], shift, axis=0)
        self.alpha[L:, :] = np.roll(self.alpha[L:, :], shift, axis=0)
        return self

    def measure_occupation(self, i: int, u: float) -> int:
        """Projective measurement of n_i driven by one uniform draw u in [0,1).

        Returns the outcome bit and collapses the state.  Outcomes with Born
        probability within 1e-12 of certainty are taken deterministically and
        leave the state untouched (degeneracy guard).
        """
        L = self.L
        p1 = self.born_probability(i)
        if p1 >= 1.0 - CERTAINTY_EPS:
            return 1
        if p1 <= CERTAINTY_EPS:
            return 0
        outcome = 1 if u < p1 else 0
        self._collapse(i, outcome)
        return outcome

    def _collapse(self, i: int, outcome: int) -> None:
        L = self.L
        alpha = self.alpha
        row = i + L if outcome else i          # component that survives
        zrow = i if outcome else i + L         # component forbidden afterwards
        b = alpha[row, :].copy()
        i0 = int(np.argmax(np.abs(b)))
        if abs(b[i0]) < RANK_TOL:
            raise RankDeficiencyError(f"vanishing pivot measuring site {i}")
        coef = b / b[i0]
        coef[i0] = 0.0
        d = alpha[zrow, :] - coef * alpha[zrow, i0]
        d[i0] = 0.0
        alpha -= np.outer(alpha[:, i0], coef)
        alpha[:, i0] = 0.0
        alpha[zrow, :] = 0.0
        alpha[row, :] = 0.0
        alpha[row, i0] = 1.0
        self._reorthonormalize_rank2(coef, d)

    def _reorthonormalize_rank2(self, c: np.ndarray, d: np.ndarray) -> None:
        # The non-pivot Gram matrix after a collapse is exactly I + c* c^T - d* d^T,
        # so symmetric orthonormalization only needs the span of {c*, d*}.
        basis = []
        for v in (c.conj(), d.conj()):
            w = v.copy()
            for q in basis:
                w -= q * (q.conj() @ w)
            nrm = np.linalg.norm(w)
            if nrm > 1e-14:
                basis.append(w / nrm)
        if not basis:
            return
        q = np.array(basis).T  # L x k
        qc = q.conj().T @ c.conj()
        qd = q.conj().T @ d.conj()
        s = np.outer(qc, c @ q) - np.outer(qd, d @ q)
        w, v = np.linalg.eigh((s + s.conj().T) / 2.0)
        if np.any(1.0 + w < RANK_TOL**2):
            raise RankDeficiencyError("post-measurement columns lost rank")
        f = v @ np.diag((1.0 + w) ** -0.5) @ v.conj().T - np.eye(w.size)
        self.alpha += (self.alpha @ q) @ (f @ q.conj().T)

    def orthonormalize(self) -> "GaussianState":
        """Restore exact column orthonormality without changing the column span."""
        q, r = np.linalg.qr(self.alpha)
        diag = np.diag(r)
        if np.min(np.abs(diag)) < RANK_TOL:
            raise RankDeficiencyError("rank-deficient mode matrix")
        phase = diag / np.abs(diag)
        self.alpha = q * phase.conj()
        return self

    # -- sampling ---------------------------------------------------------

    def sample_bitstring(self, rng: np.random.Generator) -> np.ndarray:
        """Draw one occupation configuration per the Born rule; the state is not modified."""
        work = self.copy()
        bits = np.empty(self.L, dtype=np.uint8)
        for i in range(self.L):
            bits[i] = work.measure_occupation(i, rng.random())
        return bits

    # -- serialization (row-major [re, im] pairs) --------------------------

    def to_json(self) -> str:
        flat = [[float(z.real), float(z.imag)] for z in self.alpha.ravel(order="C")]
        return json.dumps({"L": self.L, "alpha": flat})

    @classmethod
    def from_json(cls, text: str) -> "GaussianState":
        obj = json.loads(text)
        L = int(obj["L"])
        flat = np.array([complex(re, im) for re, im in obj["alpha"]])
        return cls(flat.reshape(2 * L, L), copy=False)


def init_product_state(occupations) -> GaussianState:
    return GaussianState.from_occupations(occupations)
