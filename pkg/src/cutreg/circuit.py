"""Gate-level circuit representation.

Qubit 0 is the least-significant bit of the basis-state index.  Rzz follows
the exp(-i*angle/2 * Z@Z) convention, i.e. diag entries
(e^{-ia/2}, e^{ia/2}, e^{ia/2}, e^{-ia/2}) on basis states (00, 01, 10, 11).
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class GateKind(Enum):
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    RZZ = "rzz"
    H = "h"
    S = "s"
    SDG = "sdg"
    Z = "z"
    CZ = "cz"


PARAMETERIZED = frozenset({GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.RZZ})
TWO_QUBIT = frozenset({GateKind.RZZ, GateKind.CZ})


@dataclass(frozen=True)
class Constant:
    value: float


@dataclass(frozen=True)
class Trainable:
    index: int


@dataclass(frozen=True)
class Feature:
    index: int


@dataclass(frozen=True)
class CutAngle:
    index: int


@dataclass(frozen=True)
class GateOp:
    kind: GateKind
    qubits: tuple
    binding: object = None

    def __post_init__(self):
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError("duplicate qubit indices")
        n_expected = 2 if self.kind in TWO_QUBIT else 1
        if len(self.qubits) != n_expected:
            raise ValueError(f"{self.kind.value} acts on {n_expected} qubit(s)")
        if self.kind in PARAMETERIZED:
            if self.binding is None:
                raise ValueError(f"{self.kind.value} requires a parameter binding")
        elif self.binding is not None:
            raise ValueError(f"{self.kind.value} takes no parameter")


def resolve_angle(op, theta, alpha, features):
    """Resolve a gate's bound angle from the parameter/feature vectors."""
    b = op.binding
    if b is None:
        return None
    if isinstance(b, Constant):
        return b.value
    if isinstance(b, Trainable):
        return float(theta[b.index])
    if isinstance(b, Feature):
        return float(features[b.index])
    if isinstance(b, CutAngle):
        return float(alpha[b.index])
    raise TypeError(f"unresolvable binding {b!r}")


_SQRT2_INV = 1.0 / np.sqrt(2.0)
_H = np.array([[_SQRT2_INV, _SQRT2_INV], [_SQRT2_INV, -_SQRT2_INV]], dtype=complex)
_S = np.diag([1.0, 1.0j])
_SDG = np.diag([1.0, -1.0j])
_Z = np.diag([1.0, -1.0]).astype(complex)
_CZ_DIAG = np.array([1.0, 1.0, 1.0, -1.0], dtype=complex)


def gate_matrix_1q(kind, angle=None):
    """2x2 unitary for a single-qubit gate kind."""
    if kind is GateKind.RX:
        c, s = np.cos(angle / 2), np.sin(angle / 2)
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind is GateKind.RY:
        c, s = np.cos(angle / 2), np.sin(angle / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind is GateKind.RZ:
        return np.diag([np.exp(-1j * angle / 2), np.exp(1j * angle / 2)])
    if kind is GateKind.H:
        return _H.copy()
    if kind is GateKind.S:
        return _S.copy()
    if kind is GateKind.SDG:
        return _SDG.copy()
    if kind is GateKind.Z:
        return _Z.copy()
    raise ValueError(f"{kind} is not a single-qubit gate")


def gate_diag_2q(kind, angle=None):
    """Length-4 diagonal (basis order 00,01,10,11) for a two-qubit gate kind."""
    if kind is GateKind.RZZ:
        e_m, e_p = np.exp(-1j * angle / 2), np.exp(1j * angle / 2)
        return np.array([e_m, e_p, e_p, e_m], dtype=complex)
    if kind is GateKind.CZ:
        return _CZ_DIAG.copy()
    raise ValueError(f"{kind} is not a two-qubit gate")


def gate_unitary(kind, angle=None):
    """Dense unitary matrix (2x2 or 4x4); used by oracles and identity checks."""
    if kind in TWO_QUBIT:
        return np.diag(gate_diag_2q(kind, angle))
    return gate_matrix_1q(kind, angle)


@dataclass
class Circuit:
    num_qubits: int
    ops: list = field(default_factory=list)
    partition_of: list = None
    cut_gates: list = field(default_factory=list)

    def __post_init__(self):
        if self.partition_of is None:
            self.partition_of = [0] * self.num_qubits

    @property
    def num_partitions(self):
        return max(self.partition_of) + 1

    def validate(self):
        parts = sorted(set(self.partition_of))
        if parts != list(range(len(parts))):
            raise ValueError("partition ids must form a contiguous range 0..P-1")
        cut_set = set(self.cut_gates)
        for pos, op in enumerate(self.ops):
            for q in op.qubits:
                if not 0 <= q < self.num_qubits:
                    raise ValueError(f"qubit {q} out of range at op {pos}")
            if len(op.qubits) == 2:
                pa, pb = (self.partition_of[q] for q in op.qubits)
                if pos in cut_set:
                    if op.kind is not GateKind.RZZ:
                        raise ValueError(f"cut gate at {pos} must be Rzz")
                    if pa == pb:
                        raise ValueError(f"cut gate at {pos} does not cross partitions")
                elif pa != pb:
                    raise ValueError(f"non-cut gate at {pos} straddles partitions")
        for pos in self.cut_gates:
            if not 0 <= pos < len(self.ops):
                raise ValueError(f"cut position {pos} out of range")
        return self

    def draw(self):
        """Plain-text diagram, one line per qubit, gates left to right."""
        lines = [[f"q{q}({self.partition_of[q]}):"] for q in range(self.num_qubits)]
        cut_set = set(self.cut_gates)
        for pos, op in enumerate(self.ops):
            label = op.kind.value
            if op.binding is not None:
                b = op.binding
                if isinstance(b, Constant):
                    label += f"({b.value:.3g})"
                elif isinstance(b, Trainable):
                    label += f"(t{b.index})"
                elif isinstance(b, Feature):
                    label += f"(x{b.index})"
                elif isinstance(b, CutAngle):
                    label += f"(a{b.index})"
            if pos in cut_set:
                label = "*" + label
            width = len(label)
            col = max(len(lines[q][-1]) for q in range(self.num_qubits))
            if len(op.qubits) == 2:
                lo, hi = min(op.qubits), max(op.qubits)
                span = range(lo, hi + 1)
            else:
                span = op.qubits
            for q in range(self.num_qubits):
                pad = col - len(lines[q][-1])
                if q in op.qubits:
                    lines[q].append(" " * pad + " " + label)
                elif q in span:
                    lines[q].append(" " * pad + " " + "|".center(width))
        return "\n".join("".join(parts) for parts in lines)


@dataclass(frozen=True)
class Observable:
    """Sum of weight * Z_q terms; each term acts on a single qubit."""

    terms: tuple

    @classmethod
    def mean_z(cls, num_qubits):
        w = 1.0 / num_qubits
        return cls(tuple((w, q) for q in range(num_qubits)))

    @property
    def weight_norm(self):
        return sum(abs(w) for w, _ in self.terms)
