"""Compiled kernels for truncated hbar-series arithmetic.

Every array carries the truncation order on axis 0.  Callers (see
``qtwist.kernels``) guarantee float64, C-contiguous inputs of equal order.
"""
import numpy as np
from libc.math cimport sqrt


def series_mul(const double[:, ::1] a, const double[:, ::1] b):
    cdef Py_ssize_t n = a.shape[0], m = a.shape[1]
    cdef Py_ssize_t k, i, e
    cdef double ai
    out = np.zeros((n, m))
    cdef double[:, ::1] c = out
    with nogil:
        for i in range(n):
            for k in range(i, n):
                for e in range(m):
                    ai = a[i, e]
                    if ai != 0.0:
                        c[k, e] += ai * b[k - i, e]
    return out


def series_matmul(const double[:, :, ::1] a, const double[:, :, ::1] b):
    cdef Py_ssize_t n = a.shape[0], rows = a.shape[1], inner = a.shape[2]
    cdef Py_ssize_t cols = b.shape[2]
    cdef Py_ssize_t k, i, r, s, t
    cdef double ars
    out = np.zeros((n, rows, cols))
    cdef double[:, :, ::1] c = out
    with nogil:
        for i in range(n):
            for r in range(rows):
                for s in range(inner):
                    ars = a[i, r, s]
                    if ars == 0.0:
                        continue
                    for k in range(i, n):
                        for t in range(cols):
                            c[k, r, t] += ars * b[k - i, s, t]
    return out


def series_inv(const double[::1] a):
    cdef Py_ssize_t n = a.shape[0], k, i
    cdef double acc, inv0 = 1.0 / a[0]
    out = np.empty(n)
    cdef double[::1] c = out
    c[0] = inv0
    for k in range(1, n):
        acc = 0.0
        for i in range(1, k + 1):
            acc += a[i] * c[k - i]
        c[k] = -acc * inv0
    return out


def series_sqrt(const double[::1] a):
    cdef Py_ssize_t n = a.shape[0], k, i
    cdef double acc, s0 = sqrt(a[0])
    out = np.empty(n)
    cdef double[::1] c = out
    c[0] = s0
    for k in range(1, n):
        acc = a[k]
        for i in range(1, k):
            acc -= c[i] * c[k - i]
        c[k] = acc / (2.0 * s0)
    return out
