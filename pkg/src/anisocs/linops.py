"""Finite frames, analysis operators, canonical duals and frame bounds.

An analysis operator is stored as a dense complex matrix whose row ``l`` is
the complex conjugate of the frame vector ``psi_l``, so that ``op @ g`` returns
the coefficients ``(<g, psi_l>)_l``.  With this convention the adjoint
(synthesis) operator is ``op.matrix.conj().T`` and ``psi_l = op.adjoint(e_l)``.
"""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, RankDeficient

__all__ = [
    "RANK_TOL",
    "DenseOperator",
    "FrameBundle",
    "frame_bounds",
    "dual_frame",
    "pseudo_inverse_apply",
    "make_bundle",
    "write_csv",
    "read_csv",
    "write_binary",
    "read_binary",
]

#: An operator is declared rank deficient when sigma_min / sigma_max < RANK_TOL.
RANK_TOL = 1e-10

_MAGIC = b"ANISOCS1"


class DenseOperator:
    """Immutable complex matrix acting as an analysis operator."""

    __slots__ = ("_a",)

    def __init__(self, entries):
        a = np.array(entries, dtype=np.complex128, copy=True)
        if a.ndim == 1:
            a = a.reshape(1, -1)
        if a.ndim != 2 or a.size == 0:
            raise DimensionMismatch(f"expected a non-empty 2-D array, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("operator entries must be finite")
        a.flags.writeable = False
        self._a = a

    @property
    def matrix(self) -> np.ndarray:
        """Read-only view of the entries."""
        return self._a

    @property
    def n_rows(self) -> int:
        return self._a.shape[0]

    @property
    def n_cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self):
        return self._a.shape

    def __matmul__(self, g):
        return self.apply(g)

    def apply(self, g):
        g = np.asarray(g)
        if g.shape[0] != self.n_cols:
            raise DimensionMismatch(f"signal has length {g.shape[0]}, operator expects {self.n_cols}")
        return self._a @ g

    def adjoint(self, y):
        y = np.asarray(y)
        if y.shape[0] != self.n_rows:
            raise DimensionMismatch(f"coefficients have length {y.shape[0]}, operator has {self.n_rows} rows")
        return self._a.conj().T @ y

    def frame_vector(self, l: int) -> np.ndarray:
        return self._a[l].conj()

    def rows(self, index) -> "DenseOperator":
        """Sub-operator made of the selected rows (repetitions allowed)."""
        return DenseOperator(self._a[np.asarray(index)])

    def scaled(self, c) -> "DenseOperator":
        return DenseOperator(c * self._a)

    def __repr__(self):
        return f"DenseOperator(n_rows={self.n_rows}, n_cols={self.n_cols})"


@dataclass(frozen=True)
class FrameBundle:
    """Analysis operator together with its canonical dual and frame bounds.

    ``kappa = max(B, 1/A)`` bounds the squared norms of the operator and of its
    pseudo-inverse.
    """

    op: DenseOperator
    dual_op: DenseOperator
    lower_bound: float
    upper_bound: float
    kappa: float

    @property
    def n_rows(self):
        return self.op.n_rows

    @property
    def n_cols(self):
        return self.op.n_cols

    @property
    def U(self) -> np.ndarray:
        return self.op.matrix

    @property
    def dual(self) -> np.ndarray:
        """Matrix of the dual analysis operator, i.e. ``U^{-*}``."""
        return self.dual_op.matrix

    def pinv_apply(self, y):
        """Moore-Penrose left inverse ``U^{-1} y = (U^*U)^{-1} U^* y``."""
        return self.dual_op.adjoint(y)

    @property
    def is_parseval(self) -> bool:
        return abs(self.lower_bound - 1) < 1e-12 and abs(self.upper_bound - 1) < 1e-12

    @property
    def is_unitary(self) -> bool:
        return self.is_parseval and self.n_rows == self.n_cols


def _svd(op: DenseOperator):
    w, s, vh = np.linalg.svd(op.matrix, full_matrices=False)
    if op.n_rows < op.n_cols or s[-1] <= RANK_TOL * s[0]:
        smin = s[-1] if op.n_rows >= op.n_cols else 0.0
        raise RankDeficient(
            f"operator of shape {op.shape} is rank deficient (sigma_min={smin:.3e}, sigma_max={s[0]:.3e})"
        )
    return w, s, vh


def frame_bounds(op: DenseOperator):
    """Optimal frame bounds ``(A, B)``: extreme eigenvalues of ``U^*U``."""
    _, s, _ = _svd(op)
    return float(s[-1] ** 2), float(s[0] ** 2)


def dual_frame(op: DenseOperator) -> DenseOperator:
    """Analysis operator of the canonical dual frame ``{(U^*U)^{-1} psi_l}``.

    Its matrix is ``U (U^*U)^{-1}``, computed from the thin SVD
    ``U = W S V^*`` as ``W S^{-1} V^*``.
    """
    w, s, vh = _svd(op)
    return DenseOperator((w / s) @ vh)


def pseudo_inverse_apply(op: DenseOperator, y):
    """Return ``(U^*U)^{-1} U^* y``, the least-squares preimage of ``y``."""
    y = np.asarray(y)
    if y.shape[0] != op.n_rows:
        raise DimensionMismatch(f"y has length {y.shape[0]}, operator has {op.n_rows} rows")
    w, s, vh = _svd(op)
    return vh.conj().T @ ((w.conj().T @ y) / s if y.ndim == 1 else (w.conj().T @ y) / s[:, None])


def make_bundle(op) -> FrameBundle:
    if not isinstance(op, DenseOperator):
        op = DenseOperator(op)
    w, s, vh = _svd(op)
    a, b = float(s[-1] ** 2), float(s[0] ** 2)
    return FrameBundle(
        op=op,
        dual_op=DenseOperator((w / s) @ vh),
        lower_bound=a,
        upper_bound=b,
        kappa=max(b, 1.0 / a),
    )


# -- file formats -----------------------------------------------------------
#
# CSV: the first line holds the column count n_cols; every following line is
# one operator row written as 2*n_cols floats re_0, im_0, re_1, im_1, ...
#
# Binary: magic "ANISOCS1", then n_rows and n_cols as little-endian uint64,
# then the entries row-major as little-endian float64 pairs (re, im).


def write_csv(op: DenseOperator, path):
    a = op.matrix
    inter = np.empty((a.shape[0], 2 * a.shape[1]))
    inter[:, 0::2] = a.real
    inter[:, 1::2] = a.imag
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([a.shape[1]])
        for row in inter:
            writer.writerow([repr(float(x)) for x in row])


def read_csv(path) -> DenseOperator:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        n_cols = int(header[0])
        rows = [[float(x) for x in r] for r in reader if r]
    inter = np.array(rows, dtype=float).reshape(len(rows), -1)
    if inter.shape[1] != 2 * n_cols:
        raise DimensionMismatch(f"expected {2 * n_cols} values per row, found {inter.shape[1]}")
    return DenseOperator(inter[:, 0::2] + 1j * inter[:, 1::2])


def write_binary(op: DenseOperator, path):
    a = np.ascontiguousarray(op.matrix, dtype="<c16")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<QQ", a.shape[0], a.shape[1]))
        fh.write(a.view("<f8").tobytes())


def read_binary(path) -> DenseOperator:
    data = Path(path).read_bytes()
    if data[:8] != _MAGIC:
        raise ValueError("not an ANISOCS1 operator file")
    n_rows, n_cols = struct.unpack("<QQ", data[8:24])
    flat = np.frombuffer(data[24:], dtype="<f8")
    if flat.size != 2 * n_rows * n_cols:
        raise DimensionMismatch("payload size does not match header")
    return DenseOperator(flat.view("<c16").reshape(n_rows, n_cols))
