"""Backend selection for the series kernels.

The compiled extension ``qtwist._ckernels`` is used when it is importable;
otherwise (or when the environment variable ``QTWIST_PURE_PYTHON`` is set to
a non-empty value) the numpy implementation in ``qtwist._pykernels`` is
used.  ``BACKEND`` names the active one.

All functions take arrays with the truncation order on axis 0 and return
fresh arrays of the smaller of the two input orders.
"""
import os

import numpy as np

from . import _pykernels

_impl = _pykernels
BACKEND = "python"
if not os.environ.get("QTWIST_PURE_PYTHON"):
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        pass

# Above this many multiply-adds per coefficient pair the BLAS-backed numpy
# path beats the compiled triple loop (crossover measured near 12 x 12).
MATMUL_BLAS_THRESHOLD = 1500

__all__ = ["BACKEND", "series_mul", "series_matmul", "series_inv",
           "series_sqrt", "use_backend"]


def use_backend(name):
    """Switch backend at runtime (``"cython"`` or ``"python"``); for benchmarks."""
    global _impl, BACKEND
    if name == "python":
        _impl = _pykernels
    elif name == "cython":
        from . import _ckernels
        _impl = _ckernels
    else:
        raise ValueError(f"unknown backend {name!r}")
    BACKEND = name


def series_mul(a, b):
    """Elementwise truncated Cauchy product of two series arrays.

    ``a`` and ``b`` have shape ``(N, ...)`` with identical trailing shapes.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n = min(a.shape[0], b.shape[0])
    shape = np.broadcast_shapes(a.shape[1:], b.shape[1:])
    a2 = np.ascontiguousarray(np.broadcast_to(a[:n], (n,) + shape).reshape(n, -1))
    b2 = np.ascontiguousarray(np.broadcast_to(b[:n], (n,) + shape).reshape(n, -1))
    return _impl.series_mul(a2, b2).reshape((n,) + shape)


def series_matmul(a, b):
    """Truncated Cauchy product of series-valued matrices.

    ``a``: ``(N, R, S)``, ``b``: ``(N, S, T)`` -> ``(N, R, T)``.
    """
    n = min(a.shape[0], b.shape[0])
    a = np.ascontiguousarray(a[:n], dtype=np.float64)
    b = np.ascontiguousarray(b[:n], dtype=np.float64)
    if a.shape[2] != b.shape[1]:
        raise ValueError(f"inner dimensions differ: {a.shape} @ {b.shape}")
    if a.shape[1] * a.shape[2] * b.shape[2] > MATMUL_BLAS_THRESHOLD:
        return _pykernels.series_matmul(a, b)
    return _impl.series_matmul(a, b)


def series_inv(a):
    """Multiplicative inverse of a scalar series (``a[0] != 0`` required)."""
    return _impl.series_inv(np.ascontiguousarray(a, dtype=np.float64))


def series_sqrt(a):
    """Square root with positive constant term (``a[0] > 0`` required)."""
    return _impl.series_sqrt(np.ascontiguousarray(a, dtype=np.float64))
