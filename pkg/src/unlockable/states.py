"""Bell states, rotation set, Heisenberg-Weyl operators and the unlockable states.

Rotation indices follow the listing order used throughout this package::

    index  matrix              conventional name
    0      [[1, 0], [0, 1]]    I
    1      [[1, 0], [0, -1]]   Z
    2      [[0, -1], [1, 0]]   XZ  (= -iY)
    3      [[0, 1], [1, 0]]    X

Rotation ``i`` maps Bell state ``BELL_FOR_SIGMA[i]`` onto the singlet
``|Psi->`` up to phase, whichever qubit of the pair it acts on.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ArgumentError, CapacityError
from .tensor import DensityOperator, StateVector, SubsystemLayout

SMOLIN_LABELS = ("A", "B", "C", "D")
MAX_QUDIT_DIM = 5

_S = 1 / np.sqrt(2)


class BellKind(enum.Enum):
    PHI_PLUS = "PhiPlus"
    PHI_MINUS = "PhiMinus"
    PSI_PLUS = "PsiPlus"
    PSI_MINUS = "PsiMinus"

    @classmethod
    def parse(cls, text: str) -> "BellKind":
        for k in cls:
            if text in (k.value, k.name):
                return k
        raise ArgumentError(f"unknown Bell state {text!r}")


# |up> -> 0, |down> -> 1
_BELL_AMPLITUDES = {
    BellKind.PHI_PLUS: (_S, 0, 0, _S),
    BellKind.PHI_MINUS: (_S, 0, 0, -_S),
    BellKind.PSI_PLUS: (0, _S, _S, 0),
    BellKind.PSI_MINUS: (0, _S, -_S, 0),
}

BELL_FOR_SIGMA = {
    0: BellKind.PSI_MINUS,
    1: BellKind.PSI_PLUS,
    2: BellKind.PHI_PLUS,
    3: BellKind.PHI_MINUS,
}
SIGMA_FOR_BELL = {v: k for k, v in BELL_FOR_SIGMA.items()}

SIGMA_NAMES = {0: "I", 1: "Z", 2: "XZ", 3: "X"}

# sigma_i = X^x Z^z (exactly, no phase)
SIGMA_BITS = {0: (0, 0), 1: (0, 1), 2: (1, 1), 3: (1, 0)}
_SIGMA_FROM_BITS = {v: k for k, v in SIGMA_BITS.items()}

# Bell <-> Weyl label correspondence for d = 2
WEYL_FOR_BELL = {
    BellKind.PHI_PLUS: (0, 0),
    BellKind.PHI_MINUS: (0, 1),
    BellKind.PSI_PLUS: (1, 0),
    BellKind.PSI_MINUS: (1, 1),
}


def _check_sigma(i: int) -> int:
    if i not in SIGMA_BITS:
        raise ArgumentError(f"rotation index must be in 0..3, got {i!r}")
    return int(i)


def bell_state(kind: BellKind, labels=("A", "B")) -> StateVector:
    return StateVector(SubsystemLayout.uniform(labels, 2), np.array(_BELL_AMPLITUDES[kind], dtype=complex))


def singlet(labels=("A", "B")) -> StateVector:
    return bell_state(BellKind.PSI_MINUS, labels)


def pauli_sigma(i: int) -> np.ndarray:
    i = _check_sigma(i)
    return {
        0: np.array([[1, 0], [0, 1]], dtype=complex),
        1: np.array([[1, 0], [0, -1]], dtype=complex),
        2: np.array([[0, -1], [1, 0]], dtype=complex),
        3: np.array([[0, 1], [1, 0]], dtype=complex),
    }[i]


def sigma_compose(a: int, b: int) -> int:
    """Label ``c`` with ``sigma_a @ sigma_b`` proportional to ``sigma_c``."""
    xa, za = SIGMA_BITS[_check_sigma(a)]
    xb, zb = SIGMA_BITS[_check_sigma(b)]
    return _SIGMA_FROM_BITS[(xa ^ xb, za ^ zb)]


SIGMA_COMPOSITION = tuple(tuple(sigma_compose(a, b) for b in range(4)) for a in range(4))


@dataclass(frozen=True)
class WeylLabel:
    """Label ``(a, b)`` of the operator ``X^a Z^b`` in dimension ``d``."""

    d: int
    a: int
    b: int

    def __post_init__(self):
        if self.d < 2:
            raise ArgumentError(f"dimension must be >= 2, got {self.d}")
        if not (0 <= self.a < self.d and 0 <= self.b < self.d):
            raise ArgumentError(f"Weyl label ({self.a}, {self.b}) out of range for d={self.d}")

    @classmethod
    def all(cls, d: int) -> list["WeylLabel"]:
        return [cls(d, a, b) for a in range(d) for b in range(d)]

    @classmethod
    def wrap(cls, d: int, a: int, b: int) -> "WeylLabel":
        return cls(d, a % d, b % d)

    def __str__(self):
        return f"({self.a},{self.b})"


@lru_cache(maxsize=None)
def _shift_clock(d: int):
    shift = np.roll(np.eye(d, dtype=complex), 1, axis=0)  # |k> -> |k+1 mod d>
    clock = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return shift, clock


def heisenberg_weyl(label: WeylLabel) -> np.ndarray:
    shift, clock = _shift_clock(label.d)
    w = np.linalg.matrix_power(shift, label.a) @ np.linalg.matrix_power(clock, label.b)
    w.setflags(write=False)
    return w


def max_entangled(d: int, labels=("A", "B")) -> StateVector:
    """Canonical ``sum_k |kk> / sqrt(d)``."""
    return StateVector(SubsystemLayout.uniform(labels, d), np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d))


def generalized_bell_state(label: WeylLabel, labels=("A", "B")) -> StateVector:
    d = label.d
    phi = np.eye(d, dtype=complex) / np.sqrt(d)  # phi[i, k] = <ik|Phi>
    amps = phi @ heisenberg_weyl(label).T  # (I (x) W)|Phi>
    return StateVector(SubsystemLayout.uniform(labels, d), amps.reshape(-1))


def smolin_state(labels=SMOLIN_LABELS) -> DensityOperator:
    """Uniform mixture of ``|Bell_i>^{AB} (x) |Bell_i>^{CD}`` over the four Bell states."""
    vecs = [np.kron(v, v) for v in (np.array(_BELL_AMPLITUDES[k], dtype=complex) for k in BellKind)]
    return DensityOperator.mixture(SubsystemLayout.uniform(labels, 2), [0.25] * 4, vecs)


def smolin_qudit_state(d: int, labels=SMOLIN_LABELS) -> DensityOperator:
    """Four-qudit analogue: uniform mixture of ``|B_ab>^{AB} (x) conj(|B_ab>)^{CD}``.

    The second pair carries the complex-conjugate Bell vector. For d = 2
    every Bell vector is real and this is exactly :func:`smolin_state`; for
    d >= 3 the conjugate is what keeps the state invariant under B <-> C.
    """
    if not 2 <= d <= MAX_QUDIT_DIM:
        raise CapacityError(f"qudit dimension must be in 2..{MAX_QUDIT_DIM}, got {d}")
    vecs = []
    for lab in WeylLabel.all(d):
        v = generalized_bell_state(lab).amplitudes
        vecs.append(np.kron(v, v.conj()))
    return DensityOperator.mixture(SubsystemLayout.uniform(labels, d), [1 / d**2] * d**2, vecs)
