"""Monte Carlo harness: residual infidelity vs. error strength, component
proliferation, and amplitude-sensitivity measurements.

Every trial pushes one freshly encoded state through the full pipeline
(inject error, count support, measure syndrome, recover) and reports the
infidelity 1 - F against the ideal encoding.  Trials derive their random
streams from (seed, grid index, trial index, side), so results are
bit-identical no matter how trials are scheduled, serial or concurrent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .codes import LogicalQubit, extract_syndrome, get_code, logical_fidelity, recover
from .errors import (
    ALL_QUBITS,
    ERROR_KINDS,
    DecayModel,
    ErrorModel,
    GeneralErrorParams,
    Placement,
    RotationErrorParams,
    ROTATION_AXES,
    apply_error_model,
    rotation_unitary,
)
from .statevec import StateVector, apply_1q, support_size

SUPPORT_THRESHOLD = 1e-12
# Infidelities this small are rounding residue, not physics; they are
# floored to zero in trials and excluded from power-law fits.
NUMERICAL_FLOOR = 1e-13

_CODED, _UNCODED = 0, 1


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep: a code, an error channel, a theta grid, and a trial budget."""

    code: str
    error_kind: str
    placement: Placement = ALL_QUBITS
    theta_grid: tuple[float, ...] = (0.0,)
    trials: int = 10000
    seed: int = 0
    logical: LogicalQubit = LogicalQubit(1.0, 0.0)
    axis: str = "y"
    general: GeneralErrorParams | None = None
    decay_rate: float = 0.5

    def __post_init__(self) -> None:
        get_code(self.code)  # rejects unknown names
        if self.error_kind not in ERROR_KINDS:
            raise ValueError(f"unknown error kind {self.error_kind!r}")
        if self.axis not in ROTATION_AXES:
            raise ValueError(f"unknown rotation axis {self.axis!r}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        grid = tuple(float(t) for t in self.theta_grid)
        if not grid:
            raise ValueError("theta grid must not be empty")
        if any(not math.isfinite(t) or t < 0.0 for t in grid):
            raise ValueError("theta grid values must be finite and >= 0")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("theta grid must be strictly increasing")
        if self.error_kind == "general_unitary" and self.general is None:
            raise ValueError("general_unitary sweeps need e1/e2 parameters")
        object.__setattr__(self, "theta_grid", grid)


@dataclass(frozen=True)
class SweepRow:
    theta: float
    mean_infid_coded: float
    std_coded: float
    mean_infid_uncoded: float
    std_uncoded: float
    mean_support: float

    def __post_init__(self) -> None:
        for value in (self.mean_infid_coded, self.mean_infid_uncoded):
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"infidelity {value!r} outside [0, 1]")
        if self.std_coded < 0.0 or self.std_uncoded < 0.0:
            raise ValueError("standard deviations must be >= 0")


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    slope_coded: float
    slope_uncoded: float


def model_for(config: ExperimentConfig, theta: float) -> ErrorModel:
    """The error model one trial applies at grid value ``theta``.

    Rotation sweeps read theta as the angle; decay sweeps read it as the
    elapsed time.  Flip and general-unitary channels ignore it.
    """
    kind = config.error_kind
    if kind == "rotation":
        return ErrorModel(kind, RotationErrorParams(config.axis, theta), config.placement)
    if kind == "decay":
        return ErrorModel(kind, DecayModel(config.decay_rate, theta), config.placement)
    if kind == "general_unitary":
        return ErrorModel(kind, config.general, config.placement)
    return ErrorModel(kind, None, config.placement)


def _trial_rng(seed: int, grid_index: int, trial: int, side: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(grid_index, trial, side))
    )


def run_trial(
    config: ExperimentConfig, theta: float, rng: np.random.Generator
) -> tuple[float, int]:
    """Encode, inject, measure syndrome, recover; return (infidelity, support).

    Support is counted right after error injection at the 1e-12 threshold,
    before any measurement collapses the proliferated components.
    """
    code = get_code(config.code)
    state = code.encoder(config.logical)
    state = apply_error_model(state, model_for(config, theta), rng)
    support = support_size(state, SUPPORT_THRESHOLD)
    corrected = recover(extract_syndrome(state, code, rng), code)
    infid = 1.0 - logical_fidelity(corrected, code, config.logical)
    if infid < NUMERICAL_FLOOR:
        infid = 0.0
    return infid, support


def sweep_theta(config: ExperimentConfig) -> SweepResult:
    """Monte Carlo sweep over the theta grid, coded against uncoded baseline.

    The uncoded side runs the identical channel on a bare qubit, so under
    ``all_qubits`` placement the comparison is per-physical-qubit fair:
    the baseline sees the error exactly once.
    """
    uncoded_config = replace(config, code="uncoded")
    rows = []
    for grid_index, theta in enumerate(config.theta_grid):
        coded = np.empty(config.trials)
        supports = np.empty(config.trials)
        uncoded = np.empty(config.trials)
        for trial in range(config.trials):
            coded[trial], supports[trial] = run_trial(
                config, theta, _trial_rng(config.seed, grid_index, trial, _CODED)
            )
            uncoded[trial], _ = run_trial(
                uncoded_config, theta, _trial_rng(config.seed, grid_index, trial, _UNCODED)
            )
        rows.append(
            SweepRow(
                theta=theta,
                mean_infid_coded=float(coded.mean()),
                std_coded=float(coded.std()),
                mean_infid_uncoded=float(uncoded.mean()),
                std_uncoded=float(uncoded.std()),
                mean_support=float(supports.mean()),
            )
        )
    return SweepResult(
        rows=tuple(rows),
        slope_coded=_slope([(r.theta, r.mean_infid_coded) for r in rows]),
        slope_uncoded=_slope([(r.theta, r.mean_infid_uncoded) for r in rows]),
    )


def _slope(points: list[tuple[float, float]]) -> float:
    usable = [(t, y) for t, y in points if t > 0.0 and y >= NUMERICAL_FLOOR]
    if len(usable) < 2:
        return math.nan
    return fit_power_law(usable)


def proliferation_experiment(
    code_name: str, theta: float, threshold: float = SUPPORT_THRESHOLD
) -> tuple[int, int]:
    """Support of the encoded |0> before and after rotating every qubit."""
    code = get_code(code_name)
    state = code.encoder(LogicalQubit(1.0, 0.0))
    before = support_size(state, threshold)
    rotation = rotation_unitary(RotationErrorParams("y", theta))
    for q in range(code.n_physical):
        state = apply_1q(state, rotation, q)
    return before, support_size(state, threshold)


def sensitivity_experiment(
    n_qubits: int, target_prob: float, theta: float, target_index: int = 0
) -> float:
    """Relative damage (p - p')/p to a target amplitude under global rotation.

    Prepares sqrt(p)|t> plus a uniform tail over the other basis states,
    rotates every qubit by theta, and reports how much of the target's
    probability was lost.  Swept over p this exhibits how concentrated
    amplitudes become disproportionately fragile.  Damage inside the
    numerical floor is reported as exactly zero.
    """
    if not 2 <= n_qubits <= 10:
        raise ValueError(f"n_qubits must be in [2, 10], got {n_qubits}")
    if not 0.0 < target_prob < 1.0:
        raise ValueError(f"target probability must be in (0, 1), got {target_prob!r}")
    dim = 1 << n_qubits
    if not 0 <= target_index < dim:
        raise ValueError(f"target index {target_index} out of range for {dim} states")
    tail = math.sqrt((1.0 - target_prob) / (dim - 1))
    amps = np.full(dim, tail, dtype=np.complex128)
    amps[target_index] = math.sqrt(target_prob)
    state = StateVector(n_qubits, amps)
    rotation = rotation_unitary(RotationErrorParams("y", theta))
    for q in range(n_qubits):
        state = apply_1q(state, rotation, q)
    damaged = float(np.abs(state.amps[target_index]) ** 2)
    damage = (target_prob - damaged) / target_prob
    if abs(damage) < NUMERICAL_FLOOR:
        damage = 0.0
    return damage


def fit_power_law(points) -> float:
    """Least-squares exponent of infidelity vs. theta on log-log axes.

    Exact on noiseless power-law input.  Values below the 1e-13 numerical
    floor are excluded from the fit; nonpositive values are rejected
    outright because their logarithm is undefined.
    """
    pts = [(float(t), float(y)) for t, y in points]
    if len(pts) < 2:
        raise ValueError(f"need at least 2 points to fit, got {len(pts)}")
    if any(t <= 0.0 or y <= 0.0 for t, y in pts):
        raise ValueError("power-law fit needs strictly positive values")
    kept = [(t, y) for t, y in pts if y >= NUMERICAL_FLOOR]
    if len(kept) < 2:
        raise ValueError(
            f"fewer than 2 points above the {NUMERICAL_FLOOR:g} numerical floor"
        )
    log_t = np.log([t for t, _ in kept])
    log_y = np.log([y for _, y in kept])
    return float(np.polyfit(log_t, log_y, 1)[0])
