# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled statevector kernels.

Same contract as _kernels_py: in-place operations on C-contiguous
complex128 arrays of shape (batch, 2**n), qubit 0 = least-significant bit.
"""

import numpy as np

cimport cython

BACKEND = "compiled"


def apply_1q(double complex[:, ::1] psi, int q, double complex[:, ::1] m):
    cdef Py_ssize_t batch = psi.shape[0], dim = psi.shape[1]
    cdef Py_ssize_t lo = 1 << q, step = lo << 1
    cdef Py_ssize_t b, base, j, i0, i1
    cdef double complex m00 = m[0, 0], m01 = m[0, 1], m10 = m[1, 0], m11 = m[1, 1]
    cdef double complex a0, a1
    for b in range(batch):
        for base in range(0, dim, step):
            for j in range(lo):
                i0 = base + j
                i1 = i0 + lo
                a0 = psi[b, i0]
                a1 = psi[b, i1]
                psi[b, i0] = m00 * a0 + m01 * a1
                psi[b, i1] = m10 * a0 + m11 * a1


def apply_1q_batch(double complex[:, ::1] psi, int q, double complex[:, :, ::1] m):
    cdef Py_ssize_t batch = psi.shape[0], dim = psi.shape[1]
    cdef Py_ssize_t lo = 1 << q, step = lo << 1
    cdef Py_ssize_t b, base, j, i0, i1
    cdef double complex m00, m01, m10, m11, a0, a1
    for b in range(batch):
        m00 = m[b, 0, 0]
        m01 = m[b, 0, 1]
        m10 = m[b, 1, 0]
        m11 = m[b, 1, 1]
        for base in range(0, dim, step):
            for j in range(lo):
                i0 = base + j
                i1 = i0 + lo
                a0 = psi[b, i0]
                a1 = psi[b, i1]
                psi[b, i0] = m00 * a0 + m01 * a1
                psi[b, i1] = m10 * a0 + m11 * a1


def apply_diag2(double complex[:, ::1] psi, int qa, int qb, double complex[::1] d):
    cdef Py_ssize_t batch = psi.shape[0], dim = psi.shape[1]
    cdef Py_ssize_t ma = 1 << qa, mb = 1 << qb
    cdef Py_ssize_t b, i, k
    cdef double complex d0 = d[0], d1 = d[1], d2 = d[2], d3 = d[3]
    cdef double complex f
    if qa > qb:
        ma, mb = mb, ma
        f = d1
        d1 = d2
        d2 = f
    for b in range(batch):
        for i in range(dim):
            k = 0
            if i & ma:
                k += 1
            if i & mb:
                k += 2
            if k == 0:
                psi[b, i] = psi[b, i] * d0
            elif k == 1:
                psi[b, i] = psi[b, i] * d1
            elif k == 2:
                psi[b, i] = psi[b, i] * d2
            else:
                psi[b, i] = psi[b, i] * d3


def project_z(double complex[:, ::1] psi, int q, int outcome):
    cdef Py_ssize_t batch = psi.shape[0], dim = psi.shape[1]
    cdef Py_ssize_t mask = 1 << q
    cdef Py_ssize_t b, i
    cdef Py_ssize_t keep = mask if outcome else 0
    for b in range(batch):
        for i in range(dim):
            if (i & mask) != keep:
                psi[b, i] = 0.0


def expect_z(double complex[:, ::1] psi, int q):
    cdef Py_ssize_t batch = psi.shape[0], dim = psi.shape[1]
    cdef Py_ssize_t mask = 1 << q
    cdef Py_ssize_t b, i
    cdef double acc, p
    out = np.empty(batch, dtype=np.float64)
    cdef double[::1] ov = out
    for b in range(batch):
        acc = 0.0
        for i in range(dim):
            p = psi[b, i].real * psi[b, i].real + psi[b, i].imag * psi[b, i].imag
            if i & mask:
                acc -= p
            else:
                acc += p
        ov[b] = acc
    return out


def norm_sq(double complex[:, ::1] psi):
    cdef Py_ssize_t batch = psi.shape[0], dim = psi.shape[1]
    cdef Py_ssize_t b, i
    cdef double acc
    out = np.empty(batch, dtype=np.float64)
    cdef double[::1] ov = out
    for b in range(batch):
        acc = 0.0
        for i in range(dim):
            acc += psi[b, i].real * psi[b, i].real + psi[b, i].imag * psi[b, i].imag
        ov[b] = acc
    return out
