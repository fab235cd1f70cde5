"""Error channels: flips, general single-qubit unitaries, axis rotations,
amplitude decay over time, and correlated placement statistics.

The placement rules treat errors as indistinguishable particles dropped
into register cells: ``bose_einstein`` draws a uniform multiset (several
errors may pile onto one qubit), ``fermi`` a uniform subset (at most one
per qubit).  Pattern probabilities are kept as exact rationals; floats
appear only where a caller compares against sampled frequencies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .statevec import StateVector, apply_1q

FLIP_KINDS = ("bit_flip", "phase_flip", "bit_and_phase_flip")
ERROR_KINDS = FLIP_KINDS + ("general_unitary", "rotation", "decay")
PLACEMENT_RULES = ("fixed", "all_qubits", "bose_einstein", "fermi")
ROTATION_AXES = ("x", "y", "z")

_STATE_NORM_FLOOR = 1e-14


# ---------------------------------------------------------------------------
# Parameter types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeneralErrorParams:
    """Complex pair (e1, e2) selecting one member of the unitary error family."""

    e1: complex
    e2: complex

    def __post_init__(self) -> None:
        weight = abs(self.e1) ** 2 + abs(self.e2) ** 2
        if not (math.isfinite(weight) and weight > 0.0):
            raise ValueError("e1 and e2 must be finite and not both zero")


@dataclass(frozen=True)
class RotationErrorParams:
    """Axis rotation by ``theta`` radians (half-angle convention)."""

    axis: str = "y"
    theta: float = 0.0

    def __post_init__(self) -> None:
        if self.axis not in ROTATION_AXES:
            raise ValueError(f"axis must be one of {ROTATION_AXES}, got {self.axis!r}")
        if not math.isfinite(self.theta):
            raise ValueError(f"theta must be finite, got {self.theta!r}")


@dataclass(frozen=True)
class DecayModel:
    """Amplitude-decay channel with rate ``lam`` in (0, 1] after time ``t``."""

    lam: float
    t: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lam) and 0.0 < self.lam <= 1.0):
            raise ValueError(f"decay rate must lie in (0, 1], got {self.lam!r}")
        if not (math.isfinite(self.t) and self.t >= 0.0):
            raise ValueError(f"elapsed time must be >= 0, got {self.t!r}")


@dataclass(frozen=True)
class Placement:
    """Where errors land: a fixed qubit list, every qubit, or a sampled pattern."""

    rule: str
    qubits: tuple[int, ...] = ()
    n_errors: int = 0

    def __post_init__(self) -> None:
        if self.rule not in PLACEMENT_RULES:
            raise ValueError(f"unknown placement rule {self.rule!r}")
        if self.n_errors < 0:
            raise ValueError(f"error count must be >= 0, got {self.n_errors}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))

    @classmethod
    def fixed(cls, qubits) -> "Placement":
        return cls("fixed", qubits=tuple(qubits))

    @classmethod
    def all_qubits(cls) -> "Placement":
        return cls("all_qubits")

    @classmethod
    def bose_einstein(cls, n_errors: int) -> "Placement":
        return cls("bose_einstein", n_errors=n_errors)

    @classmethod
    def fermi(cls, n_errors: int) -> "Placement":
        return cls("fermi", n_errors=n_errors)


ALL_QUBITS = Placement.all_qubits()

_PARAM_TYPES = {
    "general_unitary": GeneralErrorParams,
    "rotation": RotationErrorParams,
    "decay": DecayModel,
}


@dataclass(frozen=True)
class ErrorModel:
    """A channel kind plus the placement rule that scatters it over a register."""

    kind: str
    params: GeneralErrorParams | RotationErrorParams | DecayModel | None = None
    placement: Placement = ALL_QUBITS

    def __post_init__(self) -> None:
        if self.kind not in ERROR_KINDS:
            raise ValueError(f"unknown error kind {self.kind!r}")
        expected = _PARAM_TYPES.get(self.kind)
        if expected is None:
            if self.params is not None:
                raise ValueError(f"error kind {self.kind!r} takes no parameters")
        elif not isinstance(self.params, expected):
            raise ValueError(
                f"error kind {self.kind!r} needs {expected.__name__} parameters"
            )


# ---------------------------------------------------------------------------
# Single-qubit operators
# ---------------------------------------------------------------------------

def build_general_unitary(p: GeneralErrorParams) -> np.ndarray:
    """Normalized [[e1*, e2*], [e2, -e1]] — the full continuum of unitary errors.

    Special cases: (1, 0) is a phase flip, (0, 1) a bit flip, (1, 1) a
    Hadamard, so the discrete flip set sits inside this family.
    """
    scale = 1.0 / math.sqrt(abs(p.e1) ** 2 + abs(p.e2) ** 2)
    e1, e2 = complex(p.e1), complex(p.e2)
    return scale * np.array(
        [[e1.conjugate(), e2.conjugate()], [e2, -e1]], dtype=np.complex128
    )


def rotation_unitary(p: RotationErrorParams) -> np.ndarray:
    """Axis rotation by theta, half-angle convention (R(0) = I)."""
    c, s = math.cos(p.theta / 2.0), math.sin(p.theta / 2.0)
    if p.axis == "x":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if p.axis == "y":
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    return np.array(
        [[complex(c, -s), 0.0], [0.0, complex(c, s)]], dtype=np.complex128
    )


_FLIP_MATRICES = {
    # bit flip sends amplitudes (a, b) to (b, a)
    "bit_flip": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    # phase flip sends (a, b) to (a, -b)
    "phase_flip": np.array([[1, 0], [0, -1]], dtype=np.complex128),
    # combined flip sends (a, b) to (-b, a)
    "bit_and_phase_flip": np.array([[0, -1], [1, 0]], dtype=np.complex128),
}
for _m in _FLIP_MATRICES.values():
    _m.flags.writeable = False


def pauli_unitary(kind: str) -> np.ndarray:
    """The discrete flip operators: X, Z, and the combined (a,b) -> (-b,a) flip."""
    try:
        return _FLIP_MATRICES[kind]
    except KeyError:
        raise ValueError(f"unknown flip kind {kind!r}") from None


def decoherence_prob(m: DecayModel) -> float:
    """Decay probability 1 - lam * exp(-lam * t).

    Monotone nondecreasing in t with limit 1; note the model gives a
    nonzero value 1 - lam already at t = 0 whenever lam < 1.
    """
    return 1.0 - m.lam * math.exp(-m.lam * m.t)


# ---------------------------------------------------------------------------
# Occupancy statistics
# ---------------------------------------------------------------------------

def bose_einstein_pattern_prob(n_cells: int, n_errors: int) -> Fraction:
    """Probability of each multiset pattern: 1 / C(N + n - 1, n), exact."""
    if n_cells < 1:
        raise ValueError(f"need at least one cell, got {n_cells}")
    if n_errors < 0:
        raise ValueError(f"error count must be >= 0, got {n_errors}")
    return Fraction(1, math.comb(n_cells + n_errors - 1, n_errors))


def fermi_pattern_prob(n_cells: int, n_errors: int) -> Fraction:
    """Probability of each subset pattern: 1 / C(N, n), exact."""
    if n_cells < 1:
        raise ValueError(f"need at least one cell, got {n_cells}")
    if not 0 <= n_errors <= n_cells:
        raise ValueError(
            f"fermi placement needs 0 <= n <= N, got n={n_errors}, N={n_cells}"
        )
    return Fraction(1, math.comb(n_cells, n_errors))


def _uniform_subset(pool: int, k: int, rng: np.random.Generator) -> list[int]:
    # Floyd's algorithm: uniform k-subset of range(pool) in O(k) draws.
    chosen: set[int] = set()
    for j in range(pool - k, pool):
        t = int(rng.integers(0, j + 1))
        chosen.add(j if t in chosen else t)
    return sorted(chosen)


def sample_placement(
    n_cells: int, n_errors: int, statistics: str, rng: np.random.Generator
) -> np.ndarray:
    """Draw one occupancy vector of length N under the given statistics.

    ``bose_einstein`` is uniform over all multisets of size n (cells may
    hold more than one error); ``fermi`` is uniform over all n-subsets.
    The occupancies always sum to n.
    """
    if n_cells < 1:
        raise ValueError(f"need at least one cell, got {n_cells}")
    if n_errors < 0:
        raise ValueError(f"error count must be >= 0, got {n_errors}")
    occupancy = np.zeros(n_cells, dtype=np.int64)
    if statistics == "bose_einstein":
        # Stars and bars: a uniform n-subset of N+n-1 slot indices marks the
        # star positions; star j in slot p sits in cell p - j.
        for j, pos in enumerate(_uniform_subset(n_cells + n_errors - 1, n_errors, rng)):
            occupancy[pos - j] += 1
    elif statistics == "fermi":
        if n_errors > n_cells:
            raise ValueError(
                f"fermi placement needs n <= N, got n={n_errors}, N={n_cells}"
            )
        for cell in _uniform_subset(n_cells, n_errors, rng):
            occupancy[cell] = 1
    else:
        raise ValueError(f"unknown statistics {statistics!r}")
    return occupancy


def sample_rotation_angle(theta_max: float, rng: np.random.Generator) -> float:
    """Uniform angle on the half-open interval (0, theta_max].

    Continuous error angles have no atoms: a draw of exactly zero has
    measure zero, so every sampled rotation is a genuine error.  The
    construction below makes that structural rather than statistical.
    """
    if not (math.isfinite(theta_max) and theta_max > 0.0):
        raise ValueError(f"theta_max must be positive, got {theta_max!r}")
    return theta_max * (1.0 - rng.random())


# ---------------------------------------------------------------------------
# Channel application
# ---------------------------------------------------------------------------

def _resolve_occupancy(
    placement: Placement, n_qubits: int, rng: np.random.Generator
) -> np.ndarray:
    if placement.rule == "all_qubits":
        return np.ones(n_qubits, dtype=np.int64)
    if placement.rule == "fixed":
        occupancy = np.zeros(n_qubits, dtype=np.int64)
        for q in placement.qubits:
            if not 0 <= q < n_qubits:
                raise ValueError(
                    f"fixed placement qubit {q} out of range for {n_qubits} qubits"
                )
            occupancy[q] += 1
        return occupancy
    return sample_placement(n_qubits, placement.n_errors, placement.rule, rng)


def _operator_for(model: ErrorModel) -> np.ndarray:
    if model.kind in FLIP_KINDS:
        return pauli_unitary(model.kind)
    if model.kind == "general_unitary":
        return build_general_unitary(model.params)
    return rotation_unitary(model.params)


def apply_error_model(
    state: StateVector, model: ErrorModel, rng: np.random.Generator
) -> StateVector:
    """Sample a placement and apply the channel to each occupied qubit.

    Unitary kinds are applied once per unit of occupancy, so two bosonic
    bit flips landing on the same qubit cancel.  The decay kind instead
    scales the |1> amplitude of each occupied qubit by sqrt(1 - p_t) and
    renormalizes — a post-selected surrogate that keeps decay inside
    pure-state simulation (the unconditioned channel would need density
    matrices); occupancy above 1 is rejected for it.
    """
    occupancy = _resolve_occupancy(model.placement, state.n_qubits, rng)
    if model.kind == "decay":
        if occupancy.max(initial=0) > 1:
            raise ValueError("decay placement must not stack errors on one qubit")
        scale = math.sqrt(1.0 - decoherence_prob(model.params))
        amps = state.amps.copy()
        index = np.arange(amps.size, dtype=np.uint64)
        for q in np.flatnonzero(occupancy):
            bit = np.uint64(1 << (state.n_qubits - 1 - int(q)))
            amps[(index & bit) != 0] *= scale
        norm = float(np.linalg.norm(amps))
        if norm < _STATE_NORM_FLOOR:
            raise ValueError("decay annihilated the state (norm underflow)")
        return StateVector(state.n_qubits, amps / norm)
    op = _operator_for(model)
    out = state
    for q in np.flatnonzero(occupancy):
        for _ in range(int(occupancy[q])):
            out = apply_1q(out, op, int(q))
    return out
