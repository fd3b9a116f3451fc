"""Clebsch-Gordan tables for V^j1 x V^j2, classical and deformed.

Tables are built from the representation matrices themselves: the highest
weight vector of each spin-j block spans the kernel of the tensor raising
operator at weight j, and the rest of the block is obtained by lowering.
Nothing is taken from a closed-form q-CG formula.

The table is stored as an orthogonal series matrix ``C`` of shape
``(order, D, D)``.  Rows follow the tensor basis, columns the block basis
ordered by ascending j and then ascending m, so that

    C^T (rho^j1 x rho^j2)(g) C = direct sum of rho^j(g).
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _extprec as ext
from . import kernels
from .errors import DegenerateKernel, DimensionMismatch
from .hseries import HSeries, get_order
from .reps import SpinLabel, as_spin, tensor_labels


def block_labels(two_j1: int, two_j2: int) -> list[tuple[int, int]]:
    """``(two_j, two_m)`` for the columns of a CG matrix."""
    out = []
    for two_j in range(abs(two_j1 - two_j2), two_j1 + two_j2 + 1, 2):
        out.extend((two_j, two_m) for two_m in range(-two_j, two_j + 1, 2))
    return out


def block_offsets(two_j1: int, two_j2: int) -> dict[int, int]:
    """Column offset of each spin block inside the CG matrix."""
    offsets, pos = {}, 0
    for two_j in range(abs(two_j1 - two_j2), two_j1 + two_j2 + 1, 2):
        offsets[two_j] = pos
        pos += two_j + 1
    return offsets


def _series_null_vector(a: np.ndarray) -> np.ndarray:
    """Series vector v with v[p] = 1 and a @ v = 0, where a is (N, c-1, c)."""
    n, rows, cols = a.shape
    v = np.zeros((n, cols), ext.LD)
    if rows == 0:
        if cols != 1:
            raise DegenerateKernel(f"kernel dimension {cols} != 1")
        v[0, 0] = 1
        return v
    _, sv, vt = np.linalg.svd(a[0].astype(np.float64))
    rank = int(np.sum(sv > 1e-10 * max(1.0, sv[0])))
    if cols - rank != 1:
        raise DegenerateKernel(f"kernel dimension {cols - rank} != 1")
    pivot = int(np.argmax(np.abs(vt[-1])))
    others = [k for k in range(cols) if k != pivot]
    sol = ext.matmul(ext.mat_inv(a[:, :, others]), -a[:, :, pivot:pivot + 1])
    v[0, pivot] = 1
    v[:, others] = sol[:, :, 0]
    return v


def _normalise(v: np.ndarray) -> np.ndarray:
    norm2 = ext.mul(v, v).sum(axis=1)
    return ext.mul(v, ext.inv(ext.sqrt(norm2))[:, None])


def _ladder_inverse(two_j: int, two_m: int, order: int) -> np.ndarray:
    """1 / (q^-m sqrt([j+m][j-m+1])), the F ladder factor from |m> to |m-1>."""
    amp = ext.mul(ext.qnum((two_j + two_m) // 2, order),
                  ext.qnum((two_j - two_m) // 2 + 1, order))
    return ext.inv(ext.mul(ext.exp(-ext.LD(two_m) / 2, order), ext.sqrt(amp)))


def _ext_coproducts(two_j1, two_j2, deformed, order):
    def gen(two_j, g):
        x = ext.generator(two_j, g, order)
        if not deformed:
            x[1:] = 0
        return x
    i1, i2 = ext.identity(two_j1 + 1, order), ext.identity(two_j2 + 1, order)
    e = ext.kron(gen(two_j1, "E"), gen(two_j2, "K")) + ext.kron(i1, gen(two_j2, "E"))
    f = ext.kron(gen(two_j1, "F"), i2) + ext.kron(gen(two_j1, "Kinv"), gen(two_j2, "F"))
    return e, f


@lru_cache(maxsize=None)
def cg_matrix_ext(two_j1: int, two_j2: int, deformed: bool, order: int) -> np.ndarray:
    """Extended-precision CG matrix (read-only).

    The classical table runs the same steps with hbar-free generators, so
    its coefficients coincide with the hbar^0 part of the deformed one.
    """
    labels = tensor_labels((two_j1, two_j2))
    dim = len(labels)
    total = np.array([m1 + m2 for m1, m2 in labels])
    e, f = _ext_coproducts(two_j1, two_j2, deformed, order)
    offsets = block_offsets(two_j1, two_j2)
    out = np.zeros((order, dim, dim), ext.LD)
    for two_j in range(two_j1 + two_j2, abs(two_j1 - two_j2) - 1, -2):
        cols = np.flatnonzero(total == two_j)
        rows = np.flatnonzero(total == two_j + 2)
        v = np.zeros((order, dim), ext.LD)
        v[:, cols] = _series_null_vector(e[:, rows][:, :, cols])
        v = _normalise(v)
        anchor = labels.index((two_j1, two_j - two_j1))
        if v[0, anchor] < 0:
            v = -v
        elif v[0, anchor] == 0:
            raise DegenerateKernel("phase anchor vanishes at hbar = 0")
        col = offsets[two_j] + two_j
        out[:, :, col] = v
        for two_m in range(two_j, -two_j, -2):
            v = ext.matmul(f, v[:, :, None])[:, :, 0]
            ladder = _ladder_inverse(two_j, two_m, order)
            if not deformed:
                ladder[1:] = 0
            v = ext.mul(v, ladder[:, None])
            col -= 1
            out[:, :, col] = v
    if not deformed:
        out[1:] = 0
    out.flags.writeable = False
    return out


@lru_cache(maxsize=None)
def cg_matrix(two_j1: int, two_j2: int, deformed: bool, order: int) -> np.ndarray:
    """Orthogonal CG matrix (float64, read-only), see the module docstring."""
    out = cg_matrix_ext(two_j1, two_j2, deformed, order).astype(np.float64)
    # residue of extended-precision cancellation where the entry is exactly zero
    out[np.abs(out) < 1e-17] = 0.0
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class CGTable:
    """Clebsch-Gordan coefficients <j1 m1; j2 m2 | j m> as hbar-series."""

    j1: SpinLabel
    j2: SpinLabel
    deformed: bool
    matrix: np.ndarray

    @property
    def order(self) -> int:
        return self.matrix.shape[0]

    @property
    def tensor_labels(self):
        return tensor_labels((self.j1.two_j, self.j2.two_j))

    @property
    def block_labels(self):
        return block_labels(self.j1.two_j, self.j2.two_j)

    def coeff(self, two_j: int, two_m: int, two_m1: int, two_m2: int) -> HSeries:
        """CG(j1 j2 j; m1 m2 m); zero for any label outside the table."""
        try:
            row = self.tensor_labels.index((two_m1, two_m2))
            col = self.block_labels.index((two_j, two_m))
        except ValueError:
            return HSeries.const(0.0, self.order)
        return HSeries(self.matrix[:, row, col])

    def block(self, two_j: int) -> np.ndarray:
        """Columns of the spin-j block, shape (order, D, 2j+1)."""
        off = block_offsets(self.j1.two_j, self.j2.two_j)
        if two_j not in off:
            raise KeyError(f"spin {two_j}/2 does not occur in {self.j1} x {self.j2}")
        return self.matrix[:, :, off[two_j]:off[two_j] + two_j + 1]

    @property
    def entries(self) -> dict[tuple[int, int, int, int], HSeries]:
        """Nonzero coefficients keyed by (two_j, two_m, two_m1, two_m2)."""
        out = {}
        tl, bl = self.tensor_labels, self.block_labels
        for c, (two_j, two_m) in enumerate(bl):
            for r, (m1, m2) in enumerate(tl):
                if np.any(self.matrix[:, r, c]):
                    out[(two_j, two_m, m1, m2)] = HSeries(self.matrix[:, r, c])
        return out

    def to_json(self) -> dict:
        return {
            "two_j1": self.j1.two_j,
            "two_j2": self.j2.two_j,
            "deformed": self.deformed,
            "order": self.order,
            "entries": [
                {"two_j": k[0], "two_m": k[1], "two_m1": k[2], "two_m2": k[3], **v.to_json()}
                for k, v in sorted(self.entries.items())
            ],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["two_j", "two_m", "two_m1", "two_m2"]
                        + [f"c{p}" for p in range(self.order)])
        for k, v in sorted(self.entries.items()):
            writer.writerow(list(k) + [repr(float(c)) for c in v.coeffs])
        return buf.getvalue()


def cg_table(j1, j2, deformed: bool = True) -> CGTable:
    s1, s2 = as_spin(j1), as_spin(j2)
    mat = cg_matrix(s1.two_j, s2.two_j, bool(deformed), get_order())
    return CGTable(s1, s2, bool(deformed), mat)


def cg_apply(table: CGTable, direction: str, vector) -> np.ndarray:
    """Change basis of a series vector of shape ``(order, D)`` or ``(D,)``.

    ``reduce`` maps tensor-basis coordinates to (j, m) coordinates, ``embed``
    goes back.
    """
    vec = np.asarray(vector, dtype=np.float64)
    if vec.ndim == 1:
        padded = np.zeros((table.order, vec.shape[0]))
        padded[0] = vec
        vec = padded
    dim = table.matrix.shape[1]
    if vec.ndim != 2 or vec.shape[1] != dim:
        raise DimensionMismatch(f"expected a vector of length {dim}, got shape {np.shape(vector)}")
    if direction == "reduce":
        mat = table.matrix.transpose(0, 2, 1)
    elif direction == "embed":
        mat = table.matrix
    else:
        raise ValueError(f"direction must be 'reduce' or 'embed', got {direction!r}")
    return kernels.series_matmul(mat, vec[:, :, None])[:, :, 0]
