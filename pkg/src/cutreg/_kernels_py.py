"""Pure-numpy statevector kernels.

All kernels operate in place on C-contiguous complex128 arrays of shape
(batch, 2**n).  Qubit 0 is the least-significant bit of the basis index.
"""

import numpy as np

BACKEND = "python"


def _views(psi, q):
    batch, dim = psi.shape
    lo = 1 << q
    hi = dim >> (q + 1)
    v = psi.reshape(batch, hi, 2, lo)
    return v[:, :, 0, :], v[:, :, 1, :]


def apply_1q(psi, q, m):
    """Apply a 2x2 unitary `m` to qubit q of every batch row."""
    a0, a1 = _views(psi, q)
    t0 = m[0, 0] * a0 + m[0, 1] * a1
    a1[...] = m[1, 0] * a0 + m[1, 1] * a1
    a0[...] = t0


def apply_1q_batch(psi, q, m):
    """Apply a per-row 2x2 unitary; `m` has shape (batch, 2, 2)."""
    a0, a1 = _views(psi, q)
    m00 = m[:, 0, 0][:, None, None]
    m01 = m[:, 0, 1][:, None, None]
    m10 = m[:, 1, 0][:, None, None]
    m11 = m[:, 1, 1][:, None, None]
    t0 = m00 * a0 + m01 * a1
    a1[...] = m10 * a0 + m11 * a1
    a0[...] = t0


def apply_diag2(psi, qa, qb, d):
    """Apply a two-qubit diagonal gate; d[bit(qb)*2 + bit(qa)], length 4."""
    if qa > qb:
        qa, qb = qb, qa
        d = d[[0, 2, 1, 3]]
    batch, dim = psi.shape
    lo = 1 << qa
    mid = 1 << (qb - qa - 1)
    hi = dim >> (qb + 1)
    v = psi.reshape(batch, hi, 2, mid, 2, lo)
    v[:, :, 0, :, 0, :] *= d[0]
    v[:, :, 0, :, 1, :] *= d[1]
    v[:, :, 1, :, 0, :] *= d[2]
    v[:, :, 1, :, 1, :] *= d[3]


def project_z(psi, q, outcome):
    """Zero amplitudes whose qubit-q bit differs from `outcome` (no renorm)."""
    a0, a1 = _views(psi, q)
    if outcome == 0:
        a1[...] = 0.0
    else:
        a0[...] = 0.0


def expect_z(psi, q):
    """Unnormalized <Z_q> per batch row: sum of +/-|amp|^2."""
    a0, a1 = _views(psi, q)
    p0 = np.einsum("bij,bij->b", a0, a0.conj()).real
    p1 = np.einsum("bij,bij->b", a1, a1.conj()).real
    return p0 - p1


def norm_sq(psi):
    """Squared 2-norm per batch row."""
    return np.einsum("bi,bi->b", psi, psi.conj()).real
