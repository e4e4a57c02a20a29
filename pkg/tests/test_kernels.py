import numpy as np
import pytest

from cutreg import _kernels_py
from cutreg import kernels


def _backends():
    found = [_kernels_py]
    try:
        from cutreg import _kernels_cy

        found.append(_kernels_cy)
    except ImportError:
        pass
    return found


BACKENDS = _backends()


def random_state(n, batch=1, seed=0):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=(batch, 1 << n)) + 1j * rng.normal(size=(batch, 1 << n))
    psi /= np.linalg.norm(psi, axis=1, keepdims=True)
    return np.ascontiguousarray(psi)


def kron_1q(n, q, m):
    """Dense operator applying m to qubit q (qubit 0 = LSB)."""
    op = np.eye(1)
    for k in reversed(range(n)):
        op = np.kron(op, m if k == q else np.eye(2))
    return op


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda b: b.BACKEND)
@pytest.mark.parametrize("n,q", [(1, 0), (3, 0), (3, 1), (3, 2), (4, 2)])
def test_apply_1q_matches_dense_oracle(impl, n, q):
    rng = np.random.default_rng(q)
    m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    psi = random_state(n, batch=3, seed=n)
    expected = psi @ kron_1q(n, q, m).T
    got = psi.copy()
    impl.apply_1q(got, q, np.ascontiguousarray(m))
    assert np.abs(got - expected).max() < 1e-12


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda b: b.BACKEND)
def test_apply_1q_batch_per_row_matrices(impl):
    rng = np.random.default_rng(5)
    batch = 4
    ms = rng.normal(size=(batch, 2, 2)) + 1j * rng.normal(size=(batch, 2, 2))
    psi = random_state(3, batch=batch, seed=1)
    expected = np.stack([psi[b] @ kron_1q(3, 1, ms[b]).T for b in range(batch)])
    got = psi.copy()
    impl.apply_1q_batch(got, 1, np.ascontiguousarray(ms))
    assert np.abs(got - expected).max() < 1e-12


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda b: b.BACKEND)
@pytest.mark.parametrize("qa,qb", [(0, 1), (1, 0), (0, 2), (2, 1)])
def test_apply_diag2_matches_dense_oracle(impl, qa, qb):
    rng = np.random.default_rng(3)
    d = np.exp(1j * rng.uniform(0, 2 * np.pi, 4))
    n = 3
    psi = random_state(n, batch=2, seed=2)
    dim = 1 << n
    full = np.array(
        [d[((i >> qb) & 1) * 2 + ((i >> qa) & 1)] for i in range(dim)]
    )
    expected = psi * full
    got = psi.copy()
    impl.apply_diag2(got, qa, qb, np.ascontiguousarray(d))
    assert np.abs(got - expected).max() < 1e-12


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda b: b.BACKEND)
def test_project_z_branches_reassemble_input(impl):
    psi = random_state(3, batch=2, seed=4)
    b0, b1 = psi.copy(), psi.copy()
    impl.project_z(b0, 1, 0)
    impl.project_z(b1, 1, 1)
    assert np.array_equal(b0 + b1, psi)


@pytest.mark.parametrize("impl", BACKENDS, ids=lambda b: b.BACKEND)
def test_expect_z_and_norm(impl):
    psi = random_state(3, batch=2, seed=6)
    z = impl.expect_z(psi, 2)
    probs = np.abs(psi) ** 2
    signs = np.array([1 if not (i >> 2) & 1 else -1 for i in range(8)])
    assert np.abs(z - probs @ signs).max() < 1e-12
    assert np.abs(impl.norm_sq(psi) - 1.0).max() < 1e-12


def test_apply_is_linear_in_the_state():
    impl = kernels
    psi = random_state(2, seed=7)
    m = np.ascontiguousarray(np.array([[0.2, 0.5j], [1.0, -0.3]], dtype=complex))
    scaled = np.ascontiguousarray(3.5j * psi)
    impl.apply_1q(psi, 0, m)
    impl.apply_1q(scaled, 0, m)
    assert np.abs(scaled - 3.5j * psi).max() < 1e-12


def test_backends_agree():
    if len(BACKENDS) < 2:
        pytest.skip("compiled backend not built")
    a, b = BACKENDS
    psi1 = random_state(4, batch=3, seed=8)
    psi2 = psi1.copy()
    m = np.ascontiguousarray((np.eye(2) + 0.3j * np.ones((2, 2))) / 1.2)
    d = np.ascontiguousarray(np.exp(1j * np.array([0.1, 0.7, -0.4, 2.0])))
    a.apply_1q(psi1, 2, m)
    b.apply_1q(psi2, 2, m)
    a.apply_diag2(psi1, 0, 3, d)
    b.apply_diag2(psi2, 0, 3, d)
    assert np.abs(psi1 - psi2).max() < 1e-14
    assert np.abs(a.expect_z(psi1, 1) - b.expect_z(psi2, 1)).max() < 1e-14
