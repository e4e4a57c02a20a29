"""Dense pure-state simulation on top of the kernel backend.

Unnormalized states are first-class: projections do not renormalize, and
expectation values are trace-weighted sums over amplitudes.
"""

import numpy as np

from cutreg import kernels
from cutreg.circuit import GateKind, TWO_QUBIT, gate_diag_2q, gate_matrix_1q, resolve_angle


class StateVector:
    def __init__(self, num_qubits, amplitudes=None):
        if num_qubits < 1:
            raise ValueError("need at least one qubit")
        self.num_qubits = num_qubits
        dim = 1 << num_qubits
        if amplitudes is None:
            self.amplitudes = np.zeros(dim, dtype=complex)
            self.amplitudes[0] = 1.0
        else:
            self.amplitudes = np.ascontiguousarray(amplitudes, dtype=complex)
            if self.amplitudes.shape != (dim,):
                raise ValueError(f"expected {dim} amplitudes")

    def copy(self):
        return StateVector(self.num_qubits, self.amplitudes.copy())

    @property
    def _rows(self):
        return self.amplitudes.reshape(1, -1)

    def _check_qubit(self, q):
        if not 0 <= q < self.num_qubits:
            raise ValueError(f"qubit {q} out of range for {self.num_qubits} qubits")

    def apply(self, kind, qubits, angle=None):
        """Apply a gate in place and return self."""
        for q in qubits:
            self._check_qubit(q)
        if kind in TWO_QUBIT:
            kernels.apply_diag2(self._rows, qubits[0], qubits[1], gate_diag_2q(kind, angle))
        else:
            kernels.apply_1q(self._rows, qubits[0], gate_matrix_1q(kind, angle))
        return self

    def project_z(self, qubit, outcome):
        """Project qubit onto |outcome> in place, WITHOUT renormalizing."""
        self._check_qubit(qubit)
        if outcome not in (0, 1):
            raise ValueError("outcome must be 0 or 1")
        kernels.project_z(self._rows, qubit, outcome)
        return self

    def trace_weight(self):
        """Squared 2-norm (1 for normalized states, <1 after projection)."""
        return float(kernels.norm_sq(self._rows)[0])

    def expect_z(self, qubit):
        """Unnormalized <Z_qubit>."""
        self._check_qubit(qubit)
        return float(kernels.expect_z(self._rows, qubit)[0])

    def expectation(self, obs):
        """Sum of weight * <Z_q>, trace-weighted (no normalization)."""
        return sum(w * self.expect_z(q) for w, q in obs.terms)

    def qubit_purity(self, qubit):
        """Tr(rho_q^2) of the single-qubit reduced state; requires unit norm."""
        self._check_qubit(qubit)
        if abs(self.trace_weight() - 1.0) > 1e-9:
            raise ValueError("qubit_purity requires a normalized state")
        lo = 1 << qubit
        hi = (1 << self.num_qubits) >> (qubit + 1)
        a = self.amplitudes.reshape(hi, 2, lo)
        rho = np.einsum("hbl,hcl->bc", a, a.conj())
        return float(np.einsum("bc,cb->", rho, rho).real)


def apply_gate(state, op, resolved_angle=None):
    """Apply a GateOp with an already-resolved angle; mutates and returns state."""
    return state.apply(op.kind, op.qubits, resolved_angle)


def simulate(circuit, theta=None, alpha=None, features=None, initial=None):
    """Run the full (uncut) circuit from |0...0> (or `initial`)."""
    state = initial.copy() if initial is not None else StateVector(circuit.num_qubits)
    for op in circuit.ops:
        angle = resolve_angle(op, theta, alpha, features)
        state.apply(op.kind, op.qubits, angle)
    return state
