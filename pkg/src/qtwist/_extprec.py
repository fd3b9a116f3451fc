"""Extended-precision (``np.longdouble``) series helpers.

Clebsch-Gordan tables for spins near 3 have hbar^7 coefficients in the tens
of thousands that arise from heavy cancellation, so building them in plain
double precision leaves residuals close to 1e-9.  The table construction
runs here instead and is rounded to float64 once at the end.  On platforms
where ``longdouble`` is just ``double`` this degrades to ordinary precision.
"""
import numpy as np

LD = np.longdouble


def mul(a, b):
    a = np.asarray(a, LD)
    b = np.asarray(b, LD)
    n = min(a.shape[0], b.shape[0])
    shape = np.broadcast_shapes(a.shape[1:], b.shape[1:])
    a = np.broadcast_to(a[:n], (n,) + shape)
    b = np.broadcast_to(b[:n], (n,) + shape)
    out = np.zeros((n,) + shape, LD)
    for i in range(n):
        out[i:] += a[i] * b[:n - i]
    return out


def matmul(a, b):
    n = min(a.shape[0], b.shape[0])
    a = np.asarray(a[:n], LD)
    b = np.asarray(b[:n], LD)
    out = np.zeros((n, a.shape[1], b.shape[2]), LD)
    for i in range(n):
        out[i:] += np.matmul(a[i], b[:n - i])
    return out


def inv(a):
    a = np.asarray(a, LD)
    out = np.empty(a.shape[0], LD)
    out[0] = 1 / a[0]
    for k in range(1, a.shape[0]):
        out[k] = -np.dot(a[1:k + 1], out[k - 1::-1]) / a[0]
    return out


def sqrt(a):
    a = np.asarray(a, LD)
    out = np.empty(a.shape[0], LD)
    out[0] = np.sqrt(a[0])
    for k in range(1, a.shape[0]):
        out[k] = (a[k] - np.dot(out[1:k], out[k - 1:0:-1])) / (2 * out[0])
    return out


def exp(x, order):
    out = np.empty(order, LD)
    out[0] = 1
    for p in range(1, order):
        out[p] = out[p - 1] * LD(x) / p
    return out


def qnum(n, order):
    out = np.zeros(order, LD)
    for k in range(n):
        out += exp(n - 1 - 2 * k, order)
    return out


def mat_inv(a):
    """Series matrix inverse; the constant term is refined by Newton steps."""
    a = np.asarray(a, LD)
    eye = np.eye(a.shape[1], dtype=LD)
    x = np.linalg.inv(a[0].astype(np.float64)).astype(LD)
    for _ in range(2):
        x = x @ (2 * eye - a[0] @ x)
    out = np.zeros_like(a)
    out[0] = x
    for k in range(1, a.shape[0]):
        acc = np.zeros_like(x)
        for i in range(1, k + 1):
            acc += a[i] @ out[k - i]
        out[k] = -x @ acc
    return out


def kron(a, b):
    n = min(a.shape[0], b.shape[0])
    prod = mul(a[:n, :, None, :, None], b[:n, None, :, None, :])
    return prod.reshape(n, a.shape[1] * b.shape[1], a.shape[2] * b.shape[2])


def generator(two_j, g, order):
    """Deformed E, F or Kinv on V^j, mirroring :func:`qtwist.reps.generator_coeffs`."""
    d = two_j + 1
    out = np.zeros((order, d, d), LD)
    for i, two_m in enumerate(range(-two_j, two_j + 1, 2)):
        if g == "E" and two_m < two_j:
            amp = mul(qnum((two_j + two_m) // 2 + 1, order), qnum((two_j - two_m) // 2, order))
            out[:, i + 1, i] = mul(exp(LD(two_m) / 2 + 1, order), sqrt(amp))
        elif g == "F" and two_m > -two_j:
            amp = mul(qnum((two_j + two_m) // 2, order), qnum((two_j - two_m) // 2 + 1, order))
            out[:, i - 1, i] = mul(exp(-LD(two_m) / 2, order), sqrt(amp))
        elif g == "K":
            out[:, i, i] = exp(two_m, order)
        elif g == "Kinv":
            out[:, i, i] = exp(-two_m, order)
    return out


def identity(d, order):
    out = np.zeros((order, d, d), LD)
    out[0] = np.eye(d, dtype=LD)
    return out
