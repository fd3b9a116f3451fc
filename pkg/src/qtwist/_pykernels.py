"""Pure-numpy implementations of the series kernels.

Same contracts as the compiled ``_ckernels`` module; used when the
extension is not built or ``QTWIST_PURE_PYTHON`` is set.
"""
import math

import numpy as np


def series_mul(a, b):
    n = a.shape[0]
    out = np.zeros_like(a)
    for i in range(n):
        out[i:] += a[i] * b[: n - i]
    return out


def series_matmul(a, b):
    n = a.shape[0]
    out = np.zeros((n, a.shape[1], b.shape[2]))
    for i in range(n):
        # a[i] @ b[k - i] for every k >= i in one batched call
        out[i:] += np.matmul(a[i], b[: n - i])
    return out


def series_inv(a):
    n = a.shape[0]
    out = np.empty(n)
    inv0 = 1.0 / a[0]
    out[0] = inv0
    for k in range(1, n):
        out[k] = -np.dot(a[1:k + 1], out[k - 1::-1]) * inv0
    return out


def series_sqrt(a):
    n = a.shape[0]
    out = np.empty(n)
    s0 = math.sqrt(a[0])
    out[0] = s0
    for k in range(1, n):
        acc = a[k] - np.dot(out[1:k], out[k - 1:0:-1])
        out[k] = acc / (2.0 * s0)
    return out
