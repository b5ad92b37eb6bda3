"""fermisteer: adaptive free-fermion circuits, their classical stochastic twin,
and the finite-size-scaling toolkit for the steering transition."""

__version__ = "0.1.0"

from .circuit import CircuitParams, ProbeSpec, TrajectoryState, init_trajectory, run_trajectory, step
from .classical import BarwParams, ClassicalState, bond_particles, run_barw, run_classical
from .config import ExperimentConfig, load_config
from .fock import FockState
from .gaussian import GaussianState, QuadraticKernel, build_gate_kernel, init_product_state
from .observables import TimeSeries, active_density, charge_imbalance, ensemble_average, entropy_profile
from .runner import run_ensemble, run_experiment, run_sweep
from .scaling import (
    PC_REFERENCE,
    ScalingExponents,
    collapse_score,
    collapse_transform,
    fit_log_chord,
    powerlaw_exponent,
    scan_critical_point,
)

__all__ = [
    "BarwParams",
    "CircuitParams",
    "ClassicalState",
    "ExperimentConfig",
    "FockState",
    "GaussianState",
    "PC_REFERENCE",
    "ProbeSpec",
    "QuadraticKernel",
    "ScalingExponents",
    "TimeSeries",
    "TrajectoryState",
    "active_density",
    "bond_particles",
    "build_gate_kernel",
    "charge_imbalance",
    "collapse_score",
    "collapse_transform",
    "ensemble_average",
    "entropy_profile",
    "fit_log_chord",
    "init_product_state",
    "init_trajectory",
    "load_config",
    "powerlaw_exponent",
    "run_barw",
    "run_classical",
    "run_ensemble",
    "run_experiment",
    "run_sweep",
    "run_trajectory",
    "scan_critical_point",
    "step",
]
