import numpy as np
import pytest

from cutreg.ansatz import AnsatzConfig, QmlModel, build_ansatz, cz_to_rzz_identity_check
from cutreg.circuit import CutAngle, Feature, GateKind, Trainable


def test_config_validation():
    with pytest.raises(ValueError):
        AnsatzConfig(3)
    with pytest.raises(ValueError):
        AnsatzConfig(2)
    with pytest.raises(ValueError):
        AnsatzConfig(6, 4)
    with pytest.raises(ValueError):
        AnsatzConfig(4, 2, num_features=6)


def test_default_layer_count_from_features():
    cfg = AnsatzConfig(6, 3)
    assert cfg.num_features == 12
    assert cfg.num_layers == 2
    cfg = AnsatzConfig(4, 2, num_layers=3)
    assert cfg.num_features == 12


def test_reference_circuit_shape():
    cfg = AnsatzConfig(6, 3, 2)
    assert cfg.num_theta == 24
    assert cfg.num_alpha == 4
    circuit, cuts = build_ansatz(cfg)
    assert circuit.num_qubits == 6
    assert cuts.num_cuts == 4
    assert circuit.partition_of == [0, 0, 1, 1, 2, 2]
    # each layer: 6 feature Rx, 12 trainable rotations, 3 CZ, 2 cut Rzz
    assert len(circuit.ops) == 2 * (6 + 12 + 5)
    cut_kinds = {circuit.ops[p].kind for p in cuts.positions}
    assert cut_kinds == {GateKind.RZZ}
    assert cuts.angle_indices == (0, 1, 2, 3)


def test_cut_gates_straddle_partition_boundaries_only():
    circuit, cuts = build_ansatz(AnsatzConfig(6, 3, 2))
    for pos, op in enumerate(circuit.ops):
        if op.kind == GateKind.CZ:
            qa, qb = op.qubits
            assert circuit.partition_of[qa] == circuit.partition_of[qb]
        if op.kind == GateKind.RZZ:
            qa, qb = op.qubits
            assert circuit.partition_of[qa] != circuit.partition_of[qb]
            assert pos in cuts.positions
            assert isinstance(op.binding, CutAngle)


def test_incremental_data_uploading_indices():
    circuit, _ = build_ansatz(AnsatzConfig(4, 2, 2))
    feature_indices = [
        op.binding.index for op in circuit.ops if isinstance(op.binding, Feature)
    ]
    assert feature_indices == list(range(8))
    trainable_indices = [
        op.binding.index for op in circuit.ops if isinstance(op.binding, Trainable)
    ]
    assert sorted(trainable_indices) == list(range(16))


def test_entangler_identities_hold():
    assert cz_to_rzz_identity_check()
    assert cz_to_rzz_identity_check(tol=1e-14)


def test_forward_modes_agree():
    model = QmlModel(AnsatzConfig(4, 2, 1))
    rng = np.random.default_rng(3)
    theta = rng.uniform(-np.pi, np.pi, model.num_theta)
    alpha = rng.uniform(0, 2 * np.pi, model.num_alpha)
    x = rng.uniform(-np.pi, np.pi, model.config.num_features)
    full = model.forward(theta, alpha, x, "full")
    assert abs(model.forward(theta, alpha, x, "cut_exact") - full) < 1e-10
    mean = model.forward(theta, alpha, x, "cut_sampled", num_samples=2000, seed=0)
    assert abs(mean - full) < 0.2
    with pytest.raises(ValueError):
        model.forward(theta, alpha, x, "nope")


def test_forward_batch_matches_single_forward():
    model = QmlModel(AnsatzConfig(6, 3, 2))
    rng = np.random.default_rng(5)
    theta = rng.uniform(-np.pi, np.pi, model.num_theta)
    alpha = rng.uniform(0, 2 * np.pi, model.num_alpha)
    X = rng.uniform(-np.pi, np.pi, (4, model.config.num_features))
    batched = model.forward_batch(theta, alpha, X)
    singles = [model.forward(theta, alpha, x, "full") for x in X]
    assert np.abs(batched - singles).max() < 1e-12


def test_forward_rejects_wrong_feature_count():
    model = QmlModel(AnsatzConfig(4, 2, 1))
    with pytest.raises(ValueError):
        model.forward(np.zeros(model.num_theta), np.zeros(model.num_alpha), [0.0])


def test_prediction_is_bounded_by_mean_z():
    model = QmlModel(AnsatzConfig(4, 2, 2))
    rng = np.random.default_rng(9)
    for _ in range(10):
        theta = rng.uniform(-np.pi, np.pi, model.num_theta)
        alpha = rng.uniform(0, 2 * np.pi, model.num_alpha)
        x = rng.uniform(-np.pi, np.pi, model.config.num_features)
        assert abs(model.forward(theta, alpha, x)) <= 1.0 + 1e-12
