"""Exact matrices over GF(p).

The Matrix type is a thin immutable wrapper around an int64 numpy array with
entries reduced into [0, p). Heavy lifting (rank, echelon forms) lives in
_kernels; this module adds the algebra: products, Kronecker products,
independence filtering, and seeded generic subspace sampling.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .field import FieldSpec, SeededStream


def mat_mul_mod(a, b, p):
    """Exact (a @ b) mod p for int64 arrays.

    A direct int64 matmul would overflow once the inner dimension exceeds 2,
    so the left factor is split into 16-bit halves; each partial product then
    accumulates safely for inner dimensions up to 2^15.
    """
    a = np.asarray(a, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64) % p
    if a.shape[-1] > 32768:
        raise ValueError("inner dimension too large for exact accumulation")
    hi, lo = np.divmod(a, 1 << 16)
    part_hi = (hi @ b) % p
    part_lo = (lo @ b) % p
    return (part_hi * (1 << 16) + part_lo) % p


class Matrix:
    """Immutable matrix over a fixed prime field."""

    __slots__ = ("field", "data")

    def __init__(self, field, data):
        arr = np.array(data, dtype=np.int64) % field.modulus
        if arr.ndim != 2:
            raise ValueError("matrix data must be 2-dimensional")
        arr.flags.writeable = False
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "data", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    @classmethod
    def from_entries(cls, field, rows, cols, entries):
        """Build from a flat row-major entry list."""
        entries = list(entries)
        if len(entries) != rows * cols:
            raise ValueError(f"expected {rows * cols} entries, got {len(entries)}")
        return cls(field, np.array(entries, dtype=np.int64).reshape(rows, cols))

    @classmethod
    def identity(cls, field, n):
        return cls(field, np.eye(n, dtype=np.int64))

    @classmethod
    def zeros(cls, field, rows, cols):
        return cls(field, np.zeros((rows, cols), dtype=np.int64))

    @property
    def rows(self):
        return self.data.shape[0]

    @property
    def cols(self):
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    def entries(self):
        """Flat row-major entry list (plain ints)."""
        return [int(x) for x in self.data.ravel()]

    def transpose(self):
        return Matrix(self.field, self.data.T)

    def __matmul__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.field != other.field:
            raise ValueError("field mismatch")
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        return Matrix(self.field, mat_mul_mod(self.data, other.data, self.field.modulus))

    def __add__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.field != other.field or self.shape != other.shape:
            raise ValueError("incompatible matrices")
        return Matrix(self.field, (self.data + other.data) % self.field.modulus)

    def __sub__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.field != other.field or self.shape != other.shape:
            raise ValueError("incompatible matrices")
        return Matrix(self.field, (self.data - other.data) % self.field.modulus)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (
            self.field == other.field
            and self.shape == other.shape
            and bool(np.array_equal(self.data, other.data))
        )

    def __hash__(self):
        return hash((self.field, self.data.tobytes(), self.shape))

    def __repr__(self):
        return f"Matrix({self.field}, {self.rows}x{self.cols})"


def rank(m):
    """Rank of a Matrix over its field."""
    return _kernels.rank_destructive(m.data.copy(), m.field.modulus)


def kron(a, b):
    """Kronecker product; (a kron b)[i*rb + k, j*cb + l] = a[i,j] * b[k,l]."""
    if a.field != b.field:
        raise ValueError("field mismatch")
    # Entries are < p on both sides, so the products fit in int64.
    return Matrix(a.field, np.kron(a.data, b.data) % a.field.modulus)


def independent_basis(field, vectors):
    """Maximal linearly independent subset of vectors, first-seen greedy.

    Vectors are 1-d arrays (or lists) over the field; the returned list
    contains the original vectors that extended the span, in input order.
    """
    vecs = [np.asarray(v, dtype=np.int64) % field.modulus for v in vectors]
    if not vecs:
        return []
    width = vecs[0].shape[0]
    acc = _kernels.EchelonAccumulator(field.modulus, width)
    kept = []
    for v in vecs:
        if v.shape != (width,):
            raise ValueError("vectors must share a common length")
        if acc.try_add(v):
            kept.append(v)
    return kept


def random_subspace(field, ambient_dim, dim, seed):
    """Sample a uniformly random dim-dimensional subspace of GF(p)^ambient.

    Returns a list of dim independent basis vectors. Rows are drawn from a
    single SplitMix64 stream; a row that falls inside the span of the
    earlier rows (probability about 1/p) is discarded and the stream simply
    continues, so the result is a deterministic function of
    (ambient_dim, dim, seed, modulus).
    """
    if not 0 <= dim <= ambient_dim:
        raise ValueError(f"cannot sample a {dim}-dim subspace of GF(p)^{ambient_dim}")
    stream = SeededStream(seed)
    acc = _kernels.EchelonAccumulator(field.modulus, ambient_dim)
    basis = []
    attempts = 0
    while len(basis) < dim:
        attempts += 1
        if attempts > dim + 64:
            raise RuntimeError("subspace sampling failed to reach full rank")
        v = np.array(stream.residues(field, ambient_dim), dtype=np.int64)
        if acc.try_add(v):
            basis.append(v)
    return basis
