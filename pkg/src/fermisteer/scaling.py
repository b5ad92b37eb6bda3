"""Finite-size-scaling machinery: power-law fits, collapse transforms and
scoring, critical-point scanning, and the log-chord entanglement fit."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

Curve = tuple[np.ndarray, np.ndarray]

COLLAPSE_GRID_POINTS = 64
TRANSIENT_T = 100.0
PLATEAU_SLOPE = 0.05


@dataclass(frozen=True)
class ScalingExponents:
    beta: float
    nu_par: float
    nu_perp: float

    def __post_init__(self):
        if min(self.beta, self.nu_par, self.nu_perp) <= 0:
            raise ValueError("scaling exponents must be positive")

    @property
    def theta(self) -> float:
        return self.beta / self.nu_par

    @property
    def z(self) -> float:
        return self.nu_par / self.nu_perp

    @classmethod
    def from_theta_z(cls, theta: float, z: float, nu_perp: float = 1.0) -> "ScalingExponents":
        return cls(beta=theta * z * nu_perp, nu_par=z * nu_perp, nu_perp=nu_perp)


@dataclass(frozen=True)
class PcReference:
    """Parity-conserving class reference values (critical and diffusive regimes)."""

    theta: float = 0.286
    z: float = 1.744
    diffusive_theta: float = 0.5
    diffusive_z: float = 2.0


PC_REFERENCE = PcReference()


def powerlaw_exponent(times, values, window: tuple[float, float]) -> tuple[float, float]:
    """Decay exponent from a log-log least-squares fit over the time window.

    Returns (exponent, stderr) with the sign flipped so a decay is positive.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    lo, hi = window
    mask = (t >= lo) & (t <= hi)
    if np.count_nonzero(mask) < 10:
        raise ValueError("need at least 10 probe points inside the fit window")
    if np.any(y[mask] <= 0):
        raise ValueError("power-law fit requires positive values in the window")
    x = np.log(t[mask])
    z = np.log(y[mask])
    (slope, intercept), cov = np.polyfit(x, z, 1, cov=True)
    return -float(slope), float(np.sqrt(cov[0, 0]))


def local_slope(times, values, window: tuple[float, float]) -> float:
    exp, _ = powerlaw_exponent(times, values, window)
    return -exp


def select_fit_window(times, values, t_min: float = TRANSIENT_T) -> tuple[float, float]:
    """Default fitting window: drop t < t_min, and drop the final decade when the
    curve has saturated there (|local slope| below the plateau threshold)."""
    t = np.asarray(times, dtype=float)
    hi = float(t.max())
    last_decade = (hi / 10.0, hi)
    try:
        if abs(local_slope(times, values, last_decade)) < PLATEAU_SLOPE:
            hi = hi / 10.0
    except ValueError:
        pass
    return (t_min, hi)


def is_saturated(times, values, t_min: float = TRANSIENT_T) -> bool:
    """Plateau test over the final decade of the series."""
    t = np.asarray(times, dtype=float)
    hi = float(t.max())
    try:
        return abs(local_slope(times, values, (max(hi / 10.0, t_min), hi))) < PLATEAU_SLOPE
    except ValueError:
        return False


def collapse_transform(
    curves: dict[float, Curve],
    mode: str,
    p_c: float,
    exponents: ScalingExponents,
) -> dict[float, Curve]:
    """Rescale a family of density curves onto the one-parameter scaling form.

    mode "critical_L": curves keyed by system size at the critical point;
    (t, n) -> (t / L^z, n * L^(z*theta)).
    mode "off_critical_p": curves keyed by control rate at fixed large L;
    (t, n) -> (|p - p_c| * t^(1/nu_par), n * |p - p_c|^(-beta)).
    """
    out: dict[float, Curve] = {}
    for key, (t, y) in curves.items():
        t = np.asarray(t, dtype=float)
        y = np.asarray(y, dtype=float)
        if mode == "critical_L":
            L = float(key)
            out[key] = (t / L**exponents.z, y * L ** (exponents.z * exponents.theta))
        elif mode == "off_critical_p":
            gap = abs(float(key) - p_c)
            if gap == 0.0:
                raise ValueError("off-critical transform is undefined at p = p_c")
            out[key] = (gap * t ** (1.0 / exponents.nu_par), y * gap**-exponents.beta)
        else:
            raise ValueError(f"unknown collapse mode {mode!r}")
    return out


def collapse_score(curves: dict[float, Curve]) -> float:
    """Mean squared vertical spread between transformed curves in the log-log plane.

    For every pair of curves the log-values are interpolated (linearly in
    log-log coordinates) onto a shared log-spaced grid over that pair's overlap
    window; the score is the mean over pairs of the mean squared vertical
    difference there.  Working with log-values makes the score scale-free, so
    exponent perturbations cannot buy an advantage by sliding the comparison
    window toward smaller ordinates.  Zero iff the curves coincide on the grids.
    """
    if len(curves) < 2:
        raise ValueError("need at least two curves to score a collapse")
    clean = {}
    for key, (x, y) in curves.items():
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        keep = (x > 0) & (y > 0)
        order = np.argsort(x[keep])
        clean[key] = (np.log(x[keep][order]), np.log(y[keep][order]))
    scores = []
    for ka, kb in itertools.combinations(clean, 2):
        xa, ya = clean[ka]
        xb, yb = clean[kb]
        lo = max(xa.min(), xb.min())
        hi = min(xa.max(), xb.max())
        if hi <= lo:
            continue
        grid = np.linspace(lo, hi, COLLAPSE_GRID_POINTS)
        fa = np.interp(grid, xa, ya)
        fb = np.interp(grid, xb, yb)
        scores.append(float(np.mean((fa - fb) ** 2)))
    if not scores:
        raise ValueError("transformed curves have no overlapping support")
    return float(np.mean(scores))


def scan_critical_point(
    family: dict[float, Curve],
    window: tuple[float, float] | None = None,
) -> tuple[float, float, list[tuple[float, float, float]]]:
    """Locate the control value whose curve is the straightest decay in log-log
    coordinates.

    For each candidate (a key of the family) a quadratic is fitted to
    (log t, log n) over the window; the magnitude of the quadratic coefficient
    is the curvature score.  Saturated curves (fitted slope below the plateau
    threshold) sit on the active side of the transition and are excluded from
    the minimum: a constant is perfectly straight but not critical.  Returns
    (best value, decay exponent there, table of (value, curvature, exponent)
    rows sorted by control value).
    """
    if not family:
        raise ValueError("empty curve family")
    table = []
    for key in sorted(family):
        t, y = family[key]
        t = np.asarray(t, dtype=float)
        y = np.asarray(y, dtype=float)
        win = window or (TRANSIENT_T, float(t.max()))
        mask = (t >= win[0]) & (t <= win[1]) & (y > 0)
        if np.count_nonzero(mask) < 10:
            raise ValueError(f"curve at {key} has too few usable points in the window")
        x = np.log(t[mask])
        z = np.log(y[mask])
        quad = np.polyfit(x, z, 2)
        lin = np.polyfit(x, z, 1)
        table.append((float(key), abs(float(quad[0])), -float(lin[0])))
    decaying = [row for row in table if row[2] >= PLATEAU_SLOPE]
    best = min(decaying or table, key=lambda row: row[1])
    return best[0], best[2], table


def fit_log_chord(chords, entropies) -> tuple[float, float, float]:
    """Least-squares line of entropy against the chord coordinate.

    Returns (alpha, intercept, r_squared); alpha is the slope of the stated
    logarithmic entanglement scaling.
    """
    x = np.asarray(chords, dtype=float)
    y = np.asarray(entropies, dtype=float)
    if x.size < 5:
        raise ValueError("need at least 5 cuts for the chord fit")
    if np.ptp(x) < 1e-12:
        raise ValueError("chord coordinates are degenerate")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(resid**2))
    r2 = 1.0 if ss_tot < 1e-300 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r2
