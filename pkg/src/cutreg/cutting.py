"""Quasi-probability decomposition of cut Rzz gates and recombination.

A cut Rzz(a) is replaced by six weighted pairs of local operations; summing
the coefficient-weighted subcircuit values over all channel assignments
reproduces the uncut expectation exactly, and sampling assignments from the
quasi-probability distribution gives an unbiased estimator whose variance
inflation is the squared 1-norm of the coefficients.
"""

import itertools
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from cutreg import kernels
from cutreg.circuit import (
    GateKind,
    TWO_QUBIT,
    gate_diag_2q,
    gate_matrix_1q,
    resolve_angle,
)
from cutreg.statevector import simulate


class ResourceCapError(RuntimeError):
    """Exact recombination would exceed the configured run budget."""


class LocalOp(Enum):
    IDENTITY = "i"
    Z_GATE = "z"
    RZ_PLUS_HALF_PI = "rz+"
    RZ_MINUS_HALF_PI = "rz-"
    MEASURE_Z_SIGNED = "mz"


@dataclass(frozen=True)
class RzzQpdChannel:
    coefficient: float
    op_a: LocalOp
    op_b: LocalOp


# Negative-control hook: scaling any coefficient breaks channel completeness,
# which verification runs must detect.  Leave at 1.0 in normal operation.
_SABOTAGE_SCALE = 1.0


def rzz_channels(alpha):
    """The six-channel decomposition of a cut Rzz(alpha), half-angle form."""
    theta = alpha / 2.0
    c, s = np.cos(theta), np.sin(theta)
    cs = c * s * _SABOTAGE_SCALE
    return [
        RzzQpdChannel(c * c, LocalOp.IDENTITY, LocalOp.IDENTITY),
        RzzQpdChannel(s * s, LocalOp.Z_GATE, LocalOp.Z_GATE),
        RzzQpdChannel(+cs, LocalOp.RZ_PLUS_HALF_PI, LocalOp.MEASURE_Z_SIGNED),
        RzzQpdChannel(-cs, LocalOp.RZ_MINUS_HALF_PI, LocalOp.MEASURE_Z_SIGNED),
        RzzQpdChannel(+cs, LocalOp.MEASURE_Z_SIGNED, LocalOp.RZ_PLUS_HALF_PI),
        RzzQpdChannel(-cs, LocalOp.MEASURE_Z_SIGNED, LocalOp.RZ_MINUS_HALF_PI),
    ]


def kappa(alpha):
    """1-norm of the channel coefficients for one cut: 1 + 2|sin(alpha)|."""
    return 1.0 + 2.0 * abs(np.sin(alpha))


def sampling_overhead(alphas):
    """Product over cuts of the squared per-cut 1-norm; 1 for no cuts."""
    total = 1.0
    for a in alphas:
        total *= kappa(a) ** 2
    return total


@dataclass(frozen=True)
class CutSpec:
    positions: tuple
    angle_indices: tuple

    def __post_init__(self):
        if list(self.positions) != sorted(set(self.positions)):
            raise ValueError("cut positions must be strictly increasing")
        if len(self.positions) != len(self.angle_indices):
            raise ValueError("one angle index per cut position")

    @property
    def num_cuts(self):
        return len(self.positions)

    @classmethod
    def from_circuit(cls, circuit):
        positions = tuple(sorted(circuit.cut_gates))
        indices = tuple(circuit.ops[p].binding.index for p in positions)
        return cls(positions, indices)


@dataclass(frozen=True)
class ChannelAssignment:
    indices: tuple
    coefficient: float
    sign: int
    probability: float


def enumerate_assignments(channels_per_cut):
    """All 6^L channel assignments with aggregate coefficient/sign/probability."""
    kappas = [sum(abs(ch.coefficient) for ch in chans) for chans in channels_per_cut]
    for ks in itertools.product(range(6), repeat=len(channels_per_cut)):
        coeff = 1.0
        prob = 1.0
        for chans, kap, k in zip(channels_per_cut, kappas, ks):
            c = chans[k].coefficient
            coeff *= c
            prob *= abs(c) / kap
        yield ChannelAssignment(ks, coeff, 1 if coeff >= 0 else -1, prob)


@dataclass
class Subcircuit:
    partition: int
    qubits: tuple
    local_index: dict
    ops: list = field(default_factory=list)
    obs_terms: list = field(default_factory=list)

    @property
    def num_measures(self):
        return sum(1 for op in self.ops if op[0] == "measure")


_RZ_PLUS = gate_matrix_1q(GateKind.RZ, np.pi / 2)
_RZ_MINUS = gate_matrix_1q(GateKind.RZ, -np.pi / 2)
_ZMAT = gate_matrix_1q(GateKind.Z)


def _local_op_entry(local_op, local_q):
    if local_op is LocalOp.IDENTITY:
        return None
    if local_op is LocalOp.Z_GATE:
        return ("u1", local_q, _ZMAT)
    if local_op is LocalOp.RZ_PLUS_HALF_PI:
        return ("u1", local_q, _RZ_PLUS)
    if local_op is LocalOp.RZ_MINUS_HALF_PI:
        return ("u1", local_q, _RZ_MINUS)
    return ("measure", local_q)


def _build_subcircuit(circuit, cuts, side_ops, part, angles, obs=None):
    qubits = tuple(q for q in range(circuit.num_qubits) if circuit.partition_of[q] == part)
    local = {q: i for i, q in enumerate(qubits)}
    sub = Subcircuit(part, qubits, local)
    cut_at = {pos: l for l, pos in enumerate(cuts.positions)}
    for pos, op in enumerate(circuit.ops):
        if pos in cut_at:
            op_a, op_b = side_ops[cut_at[pos]]
            qa, qb = op.qubits
            for q, lop in ((qa, op_a), (qb, op_b)):
                if circuit.partition_of[q] == part:
                    entry = _local_op_entry(lop, local[q])
                    if entry is not None:
                        sub.ops.append(entry)
            continue
        if circuit.partition_of[op.qubits[0]] != part:
            continue
        angle = angles[pos]
        if op.kind in TWO_QUBIT:
            if circuit.partition_of[op.qubits[1]] != part:
                raise ValueError(f"non-cut gate at {pos} straddles partitions")
            sub.ops.append(("diag2", local[op.qubits[0]], local[op.qubits[1]], gate_diag_2q(op.kind, angle)))
        else:
            sub.ops.append(("u1", local[op.qubits[0]], gate_matrix_1q(op.kind, angle)))
    if obs is not None:
        sub.obs_terms = [(w, local[q]) for w, q in obs.terms if q in local]
    return sub


def partition_circuit(circuit, cuts, channel_indices, theta=None, alpha=None, features=None, obs=None):
    """Split the circuit into per-partition subcircuits for one assignment."""
    angles = [resolve_angle(op, theta, alpha, features) for op in circuit.ops]
    side_ops = _assignment_side_ops(cuts, channel_indices)
    return [
        _build_subcircuit(circuit, cuts, side_ops, p, angles, obs)
        for p in range(circuit.num_partitions)
    ]


def _assignment_side_ops(cuts, channel_indices):
    template = rzz_channels(0.0)
    return [
        (template[k].op_a, template[k].op_b) for k in channel_indices
    ]


def _run_branches(sub):
    """Expand signed-measurement branches; returns (states, signs) batches."""
    dim = 1 << len(sub.qubits)
    psi = np.zeros((1, dim), dtype=complex)
    psi[0, 0] = 1.0
    signs = np.array([1.0])
    for op in sub.ops:
        if op[0] == "u1":
            kernels.apply_1q(psi, op[1], op[2])
        elif op[0] == "diag2":
            kernels.apply_diag2(psi, op[1], op[2], op[3])
        else:
            zero = psi.copy()
            kernels.project_z(zero, op[1], 0)
            kernels.project_z(psi, op[1], 1)
            psi = np.ascontiguousarray(np.vstack([zero, psi]))
            signs = np.concatenate([signs, -signs])
    return psi, signs


def _exact_subcircuit_values(sub, want_z):
    """Signed trace weight and signed unnormalized <Z_q> for requested qubits."""
    psi, signs = _run_branches(sub)
    id_val = float(signs @ kernels.norm_sq(psi))
    z_vals = {q: float(signs @ kernels.expect_z(psi, q)) for q in want_z}
    return id_val, z_vals


def _incident_cuts(circuit, cuts):
    """Per partition: list of (cut index, side) pairs, side 0 = first qubit."""
    incident = [[] for _ in range(circuit.num_partitions)]
    for l, pos in enumerate(cuts.positions):
        qa, qb = circuit.ops[pos].qubits
        incident[circuit.partition_of[qa]].append((l, 0))
        incident[circuit.partition_of[qb]].append((l, 1))
    return incident


def _check_resource_cap(num_cuts, incident, max_runs):
    max_meas = max((len(cs) for cs in incident), default=0)
    runs = 6 ** num_cuts * 2 ** max_meas
    if runs > max_runs:
        raise ResourceCapError(
            f"exact recombination needs up to {runs} subcircuit runs (cap {max_runs})"
        )


def evaluate_exact(circuit, cuts, theta, alpha, features, obs, max_runs=1_000_000):
    """Sum coefficient-weighted subcircuit values over all channel assignments.

    Equals the uncut full-circuit expectation of `obs`.
    """
    L = cuts.num_cuts
    if L == 0 and circuit.num_partitions == 1:
        return simulate(circuit, theta, alpha, features).expectation(obs)
    angles = [resolve_angle(op, theta, alpha, features) for op in circuit.ops]
    chans = [rzz_channels(angles[pos]) for pos in cuts.positions]
    incident = _incident_cuts(circuit, cuts)
    _check_resource_cap(L, incident, max_runs)

    P = circuit.num_partitions
    part_of = circuit.partition_of
    term_qubits = [set() for _ in range(P)]
    for _, q in obs.terms:
        term_qubits[part_of[q]].add(q)

    memo = {}

    def partition_values(part, side_ops):
        key = tuple(side_ops[l][side] for l, side in incident[part])
        hit = memo.get((part, key))
        if hit is not None:
            return hit
        sub = _build_subcircuit(circuit, cuts, side_ops, part, angles)
        local = sub.local_index
        want = [local[q] for q in term_qubits[part]]
        id_val, z_local = _exact_subcircuit_values(sub, want)
        z_vals = {q: z_local[local[q]] for q in term_qubits[part]}
        result = (id_val, z_vals)
        memo[(part, key)] = result
        return result

    total = 0.0
    for ks in itertools.product(range(6), repeat=L):
        coeff = 1.0
        for chans_l, k in zip(chans, ks):
            coeff *= chans_l[k].coefficient
        if coeff == 0.0:
            continue
        side_ops = [(chans_l[k].op_a, chans_l[k].op_b) for chans_l, k in zip(chans, ks)]
        values = [partition_values(p, side_ops) for p in range(P)]
        contribution = 0.0
        for w, q in obs.terms:
            pt = part_of[q]
            term_val = values[pt][1][q]
            for p in range(P):
                if p != pt:
                    term_val *= values[p][0]
            contribution += w * term_val
        total += coeff * contribution
    return total


def _run_subcircuit_sampled(sub, rng):
    """Simulate one subcircuit with sampled signed measurements.

    Returns (sign, normalized statevector rows)."""
    dim = 1 << len(sub.qubits)
    psi = np.zeros((1, dim), dtype=complex)
    psi[0, 0] = 1.0
    sign = 1.0
    for op in sub.ops:
        if op[0] == "u1":
            kernels.apply_1q(psi, op[1], op[2])
        elif op[0] == "diag2":
            kernels.apply_diag2(psi, op[1], op[2], op[3])
        else:
            p0 = 0.5 * (1.0 + float(kernels.expect_z(psi, op[1])[0]))
            p0 = min(max(p0, 0.0), 1.0)
            outcome = 0 if rng.random() < p0 else 1
            kernels.project_z(psi, op[1], outcome)
            prob = p0 if outcome == 0 else 1.0 - p0
            psi /= np.sqrt(prob)
            if outcome == 1:
                sign = -sign
    return sign, psi


def evaluate_sampled(circuit, cuts, theta, alpha, features, obs, num_samples, seed):
    """Monte-Carlo recombination: unbiased estimate of the uncut expectation.

    Draws channel assignments from the quasi-probability distribution and
    weights each sample by the total 1-norm, the coefficient signs, and the
    signed measurement outcomes.  Returns (mean, standard error).
    """
    if num_samples < 1:
        raise ValueError("num_samples must be >= 1")
    L = cuts.num_cuts
    if L == 0:
        value = evaluate_exact(circuit, cuts, theta, alpha, features, obs)
        return value, 0.0
    angles = [resolve_angle(op, theta, alpha, features) for op in circuit.ops]
    chans = [rzz_channels(angles[pos]) for pos in cuts.positions]
    coeffs = [np.array([ch.coefficient for ch in cl]) for cl in chans]
    kappas = [float(np.sum(np.abs(c))) for c in coeffs]
    cumprobs = [np.cumsum(np.abs(c) / k) for c, k in zip(coeffs, kappas)]
    csigns = [np.where(c >= 0, 1.0, -1.0) for c in coeffs]
    kappa_total = float(np.prod(kappas))

    part_of = circuit.partition_of
    P = circuit.num_partitions
    term_by_part = [[] for _ in range(P)]
    for w, q in obs.terms:
        term_by_part[part_of[q]].append((w, q))

    sub_cache = {}

    def subcircuits_for(ks):
        subs = sub_cache.get(ks)
        if subs is None:
            side_ops = [(chans[l][k].op_a, chans[l][k].op_b) for l, k in enumerate(ks)]
            subs = [
                _build_subcircuit(circuit, cuts, side_ops, p, angles)
                for p in range(P)
            ]
            sub_cache[ks] = subs
        return subs

    seeds = np.random.SeedSequence(seed).spawn(num_samples)
    values = np.empty(num_samples)
    for i in range(num_samples):
        rng = np.random.default_rng(seeds[i])
        ks = tuple(
            int(np.searchsorted(cumprobs[l], rng.random(), side="right"))
            for l in range(L)
        )
        sgn = 1.0
        for l, k in enumerate(ks):
            sgn *= csigns[l][k]
        subs = subcircuits_for(ks)
        value = 0.0
        meas_sign = 1.0
        for p, sub in enumerate(subs):
            s, psi = _run_subcircuit_sampled(sub, rng)
            meas_sign *= s
            for w, q in term_by_part[p]:
                value += w * float(kernels.expect_z(psi, sub.local_index[q])[0])
        values[i] = kappa_total * sgn * meas_sign * value
    mean = float(np.mean(values))
    stderr = float(np.std(values, ddof=1) / np.sqrt(num_samples)) if num_samples > 1 else 0.0
    return mean, stderr
