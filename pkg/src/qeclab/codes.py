"""Encoders, stabilizer syndromes, and recovery for the Shor 9-qubit and
Steane 7-qubit codes, plus an uncoded single-qubit baseline.

Encoders write the codeword amplitudes directly (8 kets per logical basis
state for either code) rather than synthesizing gate circuits, so the
constants below are bit-exact and circuit bugs are out of the blast
radius.  Syndrome extraction is direct projective measurement of each
stabilizer; the post-measurement state is identical to what ancilla
circuits would produce without ever growing the register.

Recovery tables are built at construction time by sweeping error patterns
in order of increasing weight, separately for the X sector (flagged by
Z-type stabilizers) and the Z sector (flagged by X-type stabilizers).
That makes every table total over the full syndrome space and minimum
weight within each sector, and it agrees with a plain single-Pauli sweep
wherever one applies.  Degenerate syndromes resolve to the first (lowest
weight) representative; correctness is judged by logical fidelity, not by
matching a particular Pauli.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from types import MappingProxyType
from typing import Callable, Mapping

import numpy as np

from .statevec import (
    StateVector,
    apply_pauli_string,
    fidelity,
    measure_pauli_string,
)

CODE_NAMES = ("shor9", "steane7", "uncoded")

_NORM_INPUT_TOL = 1e-8
_NORM_EXACT_TOL = 1e-12


@dataclass(frozen=True)
class LogicalQubit:
    """Logical amplitudes (alpha, beta) with |alpha|^2 + |beta|^2 = 1."""

    alpha: complex
    beta: complex

    def __post_init__(self) -> None:
        alpha, beta = complex(self.alpha), complex(self.beta)
        norm_sq = abs(alpha) ** 2 + abs(beta) ** 2
        if not math.isfinite(norm_sq) or abs(norm_sq - 1.0) > _NORM_INPUT_TOL:
            raise ValueError(
                f"logical amplitudes must be normalized, |a|^2+|b|^2 = {norm_sq!r}"
            )
        # Renormalize only genuinely off inputs; bit-exact ones pass through
        # untouched so configs round-trip byte for byte.
        if abs(norm_sq - 1.0) > _NORM_EXACT_TOL:
            scale = 1.0 / math.sqrt(norm_sq)
            alpha, beta = alpha * scale, beta * scale
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)


@dataclass(frozen=True)
class SyndromeResult:
    """Measured stabilizer bits (0 for +1, 1 for -1) and the projected state."""

    bits: tuple[int, ...]
    post_state: StateVector


@dataclass(frozen=True)
class CodeSpec:
    """A code: physical size, stabilizer list, total recovery table, encoder."""

    name: str
    n_physical: int
    stabilizers: tuple[str, ...]
    recovery_table: Mapping[str, str]
    encoder: Callable[[LogicalQubit], StateVector]

    def encode(self, logical: LogicalQubit) -> StateVector:
        return self.encoder(logical)


# ---------------------------------------------------------------------------
# Pauli-string bookkeeping
# ---------------------------------------------------------------------------

def pauli_strings_commute(a: str, b: str) -> bool:
    """Symplectic test: strings commute iff they clash on an even count."""
    clashes = sum(
        1 for x, y in zip(a, b) if x != "I" and y != "I" and x != y
    )
    return clashes % 2 == 0


def _support(pauli: str) -> frozenset[int]:
    return frozenset(i for i, op in enumerate(pauli) if op != "I")


def _single_letter_string(n: int, support, letter: str) -> str:
    cells = set(support)
    return "".join(letter if i in cells else "I" for i in range(n))


def _min_weight_patterns(
    n: int, detector_supports: list[frozenset[int]]
) -> dict[tuple[int, ...], tuple[int, ...]]:
    """Lowest-weight error pattern for every syndrome of one CSS sector."""
    want = 1 << len(detector_supports)
    found: dict[tuple[int, ...], tuple[int, ...]] = {}
    for weight in range(n + 1):
        for subset in combinations(range(n), weight):
            cells = set(subset)
            syndrome = tuple(len(cells & sup) & 1 for sup in detector_supports)
            found.setdefault(syndrome, subset)
        if len(found) == want:
            return found
    raise RuntimeError("stabilizers do not span their syndrome space")


def _build_recovery_table(n: int, stabilizers: tuple[str, ...]) -> Mapping[str, str]:
    z_type = [s for s in stabilizers if set(s) <= {"I", "Z"}]
    x_type = [s for s in stabilizers if set(s) <= {"I", "X"}]
    if list(stabilizers) != z_type + x_type:
        raise ValueError("stabilizers must be ordered Z-type first, then X-type")
    for a, b in combinations(stabilizers, 2):
        if not pauli_strings_commute(a, b):
            raise ValueError(f"stabilizers {a} and {b} do not commute")
    # Z-type stabilizers flag X errors and vice versa.
    x_patterns = _min_weight_patterns(n, [_support(s) for s in z_type])
    z_patterns = _min_weight_patterns(n, [_support(s) for s in x_type])
    table: dict[str, str] = {}
    for syn_z, x_cells in x_patterns.items():
        for syn_x, z_cells in z_patterns.items():
            key = "".join(map(str, syn_z + syn_x))
            xs, zs = set(x_cells), set(z_cells)
            letters = []
            for q in range(n):
                if q in xs and q in zs:
                    letters.append("Y")
                elif q in xs:
                    letters.append("X")
                elif q in zs:
                    letters.append("Z")
                else:
                    letters.append("I")
            table[key] = "".join(letters)
    return MappingProxyType(table)


def _frozen(amps: np.ndarray) -> np.ndarray:
    amps.flags.writeable = False
    return amps


def _linear_encoder(v0: np.ndarray, v1: np.ndarray, n: int):
    def encode(logical: LogicalQubit) -> StateVector:
        return StateVector(n, logical.alpha * v0 + logical.beta * v1)

    return encode


# ---------------------------------------------------------------------------
# The codes
# ---------------------------------------------------------------------------

_SHOR_STABILIZERS = (
    "ZZIIIIIII",
    "IZZIIIIII",
    "IIIZZIIII",
    "IIIIZZIII",
    "IIIIIIZZI",
    "IIIIIIIZZ",
    "XXXXXXIII",
    "IIIXXXXXX",
)


def _shor_codeword(sign: int) -> np.ndarray:
    # (|000> + sign|111>)^3 / (2 sqrt 2); the ket index packs the three
    # blocks with qubit 0 as the most significant bit.
    amps = np.zeros(512, dtype=np.complex128)
    scale = 1.0 / (2.0 * math.sqrt(2.0))
    for b0 in (0, 1):
        for b1 in (0, 1):
            for b2 in (0, 1):
                index = (0o700 * b0 | 0o070 * b1 | 0o007 * b2)
                amps[index] = (sign ** (b0 + b1 + b2)) * scale
    return _frozen(amps)


def shor_code() -> CodeSpec:
    """The [[9,1,3]] block-repetition code."""
    v0, v1 = _shor_codeword(+1), _shor_codeword(-1)
    return CodeSpec(
        name="shor9",
        n_physical=9,
        stabilizers=_SHOR_STABILIZERS,
        recovery_table=_build_recovery_table(9, _SHOR_STABILIZERS),
        encoder=_linear_encoder(v0, v1, 9),
    )


# Parity checks of the [7,4,3] Hamming code; column j (0-indexed) read
# top-to-bottom is the binary expansion of j + 1.
_HAMMING_ROWS = ("0001111", "0110011", "1010101")


def _row_support(row: str) -> frozenset[int]:
    return frozenset(i for i, ch in enumerate(row) if ch == "1")


_STEANE_STABILIZERS = tuple(
    _single_letter_string(7, _row_support(row), "Z") for row in _HAMMING_ROWS
) + tuple(
    _single_letter_string(7, _row_support(row), "X") for row in _HAMMING_ROWS
)

_STEANE_ZERO_KETS = (
    "0000000",
    "0001111",
    "0110011",
    "0111100",
    "1010101",
    "1011010",
    "1100110",
    "1101001",
)
_STEANE_ONE_KETS = (
    "1111111",
    "1110000",
    "1001100",
    "1000011",
    "0101010",
    "0100101",
    "0011001",
    "0010110",
)


def _steane_codeword(kets: tuple[str, ...]) -> np.ndarray:
    amps = np.zeros(128, dtype=np.complex128)
    scale = 1.0 / math.sqrt(8.0)
    for ket in kets:
        amps[int(ket, 2)] = scale
    return _frozen(amps)


def steane_code() -> CodeSpec:
    """The [[7,1,3]] CSS code over the Hamming parity checks."""
    v0 = _steane_codeword(_STEANE_ZERO_KETS)
    v1 = _steane_codeword(_STEANE_ONE_KETS)
    return CodeSpec(
        name="steane7",
        n_physical=7,
        stabilizers=_STEANE_STABILIZERS,
        recovery_table=_build_recovery_table(7, _STEANE_STABILIZERS),
        encoder=_linear_encoder(v0, v1, 7),
    )


def uncoded() -> CodeSpec:
    """Bare single qubit: identity encoder, empty syndrome, identity recovery."""
    ket0 = _frozen(np.array([1.0, 0.0], dtype=np.complex128))
    ket1 = _frozen(np.array([0.0, 1.0], dtype=np.complex128))
    return CodeSpec(
        name="uncoded",
        n_physical=1,
        stabilizers=(),
        recovery_table=MappingProxyType({"": "I"}),
        encoder=_linear_encoder(ket0, ket1, 1),
    )


_CODE_BUILDERS = {"shor9": shor_code, "steane7": steane_code, "uncoded": uncoded}


@lru_cache(maxsize=None)
def get_code(name: str) -> CodeSpec:
    """Shared immutable CodeSpec for one of the stable names."""
    try:
        return _CODE_BUILDERS[name]()
    except KeyError:
        raise ValueError(
            f"unknown code {name!r}; expected one of {', '.join(CODE_NAMES)}"
        ) from None


# ---------------------------------------------------------------------------
# Syndrome extraction and recovery
# ---------------------------------------------------------------------------

def extract_syndrome(
    state: StateVector, code: CodeSpec, rng: np.random.Generator
) -> SyndromeResult:
    """Measure every stabilizer in order and return bits plus the projection.

    On an undisturbed codeword all bits come out 0 and the state is
    unchanged; on a disturbed one the measurement collapses whatever
    continuous error was present into a definite Pauli coset.
    """
    if state.n_qubits != code.n_physical:
        raise ValueError(
            f"state has {state.n_qubits} qubits but {code.name} needs "
            f"{code.n_physical}"
        )
    bits = []
    post = state
    for stabilizer in code.stabilizers:
        sign, post = measure_pauli_string(post, stabilizer, rng)
        bits.append(0 if sign == 1 else 1)
    return SyndromeResult(tuple(bits), post)


def recover(result: SyndromeResult, code: CodeSpec) -> StateVector:
    """Apply the table's Pauli correction for the measured syndrome."""
    if len(result.bits) != len(code.stabilizers):
        raise ValueError(
            f"syndrome has {len(result.bits)} bits but {code.name} has "
            f"{len(code.stabilizers)} stabilizers"
        )
    key = "".join(map(str, result.bits))
    try:
        correction = code.recovery_table[key]
    except KeyError:
        raise LookupError(
            f"recovery table for {code.name} is missing syndrome {key!r}; "
            "the table construction is broken"
        ) from None
    return apply_pauli_string(result.post_state, correction)


def logical_fidelity(
    state: StateVector, code: CodeSpec, reference: LogicalQubit
) -> float:
    """Fidelity against the ideal encoding of ``reference``; 1 iff corrected."""
    return fidelity(state, code.encoder(reference))
