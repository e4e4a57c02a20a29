"""Hardware-efficient ansatz with incremental data-uploading and cut bonds.

Per layer: Rx feature encoding on every qubit (later layers consume later
features), trainable Ry/Rz rotations, then nearest-neighbour entanglers —
CZ inside a partition block, trainable Rzz flagged as a cut across blocks.
"""

from dataclasses import dataclass

import numpy as np

from cutreg import kernels
from cutreg.circuit import (
    Circuit,
    CutAngle,
    Feature,
    GateKind,
    GateOp,
    Observable,
    Trainable,
    gate_unitary,
)
from cutreg.cutting import CutSpec, evaluate_exact, evaluate_sampled
from cutreg.statevector import simulate


@dataclass
class AnsatzConfig:
    num_qubits: int
    num_partitions: int = 3
    num_layers: int = None
    num_features: int = None

    def __post_init__(self):
        if self.num_qubits < 4 or self.num_qubits % 2:
            raise ValueError("num_qubits must be even and >= 4")
        if self.num_qubits % self.num_partitions:
            raise ValueError("partitions must be equal-size contiguous blocks")
        if self.num_features is None:
            self.num_features = (
                self.num_layers * self.num_qubits
                if self.num_layers is not None
                else 2 * self.num_qubits
            )
        if self.num_layers is None:
            if self.num_features % self.num_qubits:
                raise ValueError("num_features must be a multiple of num_qubits")
            self.num_layers = self.num_features // self.num_qubits
        if self.num_features != self.num_layers * self.num_qubits:
            raise ValueError("num_features must equal num_layers * num_qubits")

    @property
    def num_theta(self):
        return 2 * self.num_qubits * self.num_layers

    @property
    def num_alpha(self):
        return (self.num_partitions - 1) * self.num_layers


def build_ansatz(config):
    """Build the layered circuit and its cut specification."""
    nq = config.num_qubits
    block = nq // config.num_partitions
    partition_of = [q // block for q in range(nq)]
    ops = []
    cut_positions = []
    t = 0
    a = 0
    for layer in range(config.num_layers):
        for q in range(nq):
            ops.append(GateOp(GateKind.RX, (q,), Feature(layer * nq + q)))
        for q in range(nq):
            ops.append(GateOp(GateKind.RY, (q,), Trainable(t)))
            ops.append(GateOp(GateKind.RZ, (q,), Trainable(t + 1)))
            t += 2
        for q in range(nq - 1):
            if partition_of[q] == partition_of[q + 1]:
                ops.append(GateOp(GateKind.CZ, (q, q + 1)))
            else:
                cut_positions.append(len(ops))
                ops.append(GateOp(GateKind.RZZ, (q, q + 1), CutAngle(a)))
                a += 1
    circuit = Circuit(nq, ops, partition_of, cut_positions).validate()
    return circuit, CutSpec.from_circuit(circuit)


def cz_to_rzz_identity_check(tol=1e-12):
    """Check CZ = e^{i pi/4} (Sdg x Sdg) Rzz(pi/2) and CX = (I x H) CZ (I x H)."""
    sdg = gate_unitary(GateKind.SDG)
    rzz = gate_unitary(GateKind.RZZ, np.pi / 2)
    cz = gate_unitary(GateKind.CZ)
    lhs = np.exp(1j * np.pi / 4) * np.kron(sdg, sdg) @ rzz
    if np.abs(lhs - cz).max() > tol:
        return False
    h = gate_unitary(GateKind.H)
    eye = np.eye(2)
    cx = np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    )
    lhs = np.kron(eye, h) @ cz @ np.kron(eye, h)
    return bool(np.abs(lhs - cx).max() <= tol)


class QmlModel:
    """Forward evaluation of the ansatz expectation, uncut or cut."""

    def __init__(self, config, observable=None):
        self.config = config
        self.circuit, self.cuts = build_ansatz(config)
        self.observable = observable or Observable.mean_z(config.num_qubits)

    @property
    def num_theta(self):
        return self.config.num_theta

    @property
    def num_alpha(self):
        return self.config.num_alpha

    def forward(self, theta, alpha, x, mode="full", num_samples=10_000, seed=0, max_runs=1_000_000):
        if len(x) != self.config.num_features:
            raise ValueError(f"expected {self.config.num_features} features")
        if mode == "full":
            return simulate(self.circuit, theta, alpha, x).expectation(self.observable)
        if mode == "cut_exact":
            return evaluate_exact(
                self.circuit, self.cuts, theta, alpha, x, self.observable, max_runs
            )
        if mode == "cut_sampled":
            mean, _ = evaluate_sampled(
                self.circuit, self.cuts, theta, alpha, x, self.observable, num_samples, seed
            )
            return mean
        raise ValueError(f"unknown mode {mode!r}")

    def forward_batch(self, theta, alpha, X):
        """Batched uncut forward pass; X has shape (batch, num_features)."""
        X = np.asarray(X, dtype=float)
        batch = X.shape[0]
        dim = 1 << self.config.num_qubits
        psi = np.zeros((batch, dim), dtype=complex)
        psi[:, 0] = 1.0
        from cutreg.circuit import gate_diag_2q, gate_matrix_1q, resolve_angle

        for op in self.circuit.ops:
            if isinstance(op.binding, Feature):
                ang = X[:, op.binding.index]
                c, s = np.cos(ang / 2), np.sin(ang / 2)
                m = np.zeros((batch, 2, 2), dtype=complex)
                m[:, 0, 0] = c
                m[:, 1, 1] = c
                m[:, 0, 1] = -1j * s
                m[:, 1, 0] = -1j * s
                kernels.apply_1q_batch(psi, op.qubits[0], m)
            elif op.kind in (GateKind.RZZ, GateKind.CZ):
                angle = resolve_angle(op, theta, alpha, None)
                kernels.apply_diag2(psi, op.qubits[0], op.qubits[1], gate_diag_2q(op.kind, angle))
            else:
                angle = resolve_angle(op, theta, alpha, None)
                kernels.apply_1q(psi, op.qubits[0], gate_matrix_1q(op.kind, angle))
        preds = np.zeros(batch)
        for w, q in self.observable.terms:
            preds += w * kernels.expect_z(psi, q)
        return preds

    def prepared_state(self, theta, alpha, x):
        """Full uncut statevector for the given parameters and input."""
        return simulate(self.circuit, theta, alpha, x)
