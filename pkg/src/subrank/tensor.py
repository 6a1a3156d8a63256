"""Dense exact tensors over GF(p) and the restriction action.

Tensors store their entries as int64 numpy arrays in C (row-major) order,
reduced into [0, p). Orders down to 0 are allowed: order-0 tensors are field
scalars and show up as the ambient space attached to single-leg
decomposition specs.

The restriction preorder is the central notion: S <= T when S = (M_1, ...,
M_k) . T for matrices M_i acting one per leg. ``restrict`` implements that
action; everything downstream (certificates, brute-force search, the
non-additivity demo) is phrased through it.
"""

from __future__ import annotations

import numpy as np

from .field import FieldSpec
from .matrix import Matrix, mat_mul_mod


class Tensor:
    """Immutable dense tensor over a fixed prime field."""

    __slots__ = ("field", "data")

    def __init__(self, field, data):
        arr = np.array(data, dtype=np.int64) % field.modulus
        arr.flags.writeable = False
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "data", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Tensor is immutable")

    @classmethod
    def from_entries(cls, field, shape, entries):
        """Build from a flat row-major entry list."""
        shape = tuple(int(n) for n in shape)
        size = 1
        for n in shape:
            size *= n
        entries = list(entries)
        if len(entries) != size:
            raise ValueError(f"expected {size} entries for shape {shape}, got {len(entries)}")
        return cls(field, np.array(entries, dtype=np.int64).reshape(shape))

    @classmethod
    def zeros(cls, field, shape):
        return cls(field, np.zeros(tuple(shape), dtype=np.int64))

    @property
    def shape(self):
        return self.data.shape

    @property
    def order(self):
        return self.data.ndim

    def vec(self):
        """Flat row-major copy of the entries."""
        return self.data.reshape(-1).copy()

    def entries(self):
        return [int(x) for x in self.data.ravel()]

    def slice(self, axis, index):
        """Order (k-1) slice obtained by fixing one index on one leg."""
        if not 0 <= axis < self.order:
            raise ValueError(f"axis {axis} out of range for order {self.order}")
        return Tensor(self.field, np.take(self.data, index, axis=axis))

    def subtensor(self, ranges):
        """Restrict every leg to an index window; ranges are (start, stop) pairs."""
        if len(ranges) != self.order:
            raise ValueError("need one (start, stop) range per leg")
        slices = tuple(slice(a, b) for a, b in ranges)
        return Tensor(self.field, self.data[slices])

    def __getitem__(self, idx):
        value = self.data[idx]
        if np.ndim(value) == 0:
            return int(value)
        return Tensor(self.field, value)

    def __add__(self, other):
        if not isinstance(other, Tensor):
            return NotImplemented
        if self.field != other.field or self.shape != other.shape:
            raise ValueError("incompatible tensors")
        return Tensor(self.field, (self.data + other.data) % self.field.modulus)

    def __sub__(self, other):
        if not isinstance(other, Tensor):
            return NotImplemented
        if self.field != other.field or self.shape != other.shape:
            raise ValueError("incompatible tensors")
        return Tensor(self.field, (self.data - other.data) % self.field.modulus)

    def __eq__(self, other):
        if not isinstance(other, Tensor):
            return NotImplemented
        return (
            self.field == other.field
            and self.shape == other.shape
            and bool(np.array_equal(self.data, other.data))
        )

    def __hash__(self):
        return hash((self.field, self.shape, self.data.tobytes()))

    def __repr__(self):
        return f"Tensor({self.field}, shape={self.shape})"

    def to_json_dict(self):
        return {
            "shape": list(self.shape),
            "modulus": self.field.modulus,
            "entries": self.entries(),
        }


def tensor_from_json_dict(d):
    field = FieldSpec(int(d["modulus"]))
    return Tensor.from_entries(field, [int(n) for n in d["shape"]], d["entries"])


def unit_tensor(field, shape, index):
    """Tensor with a single 1 at the given index."""
    data = np.zeros(tuple(shape), dtype=np.int64)
    data[tuple(index)] = 1
    return Tensor(field, data)


def diagonal_tensor(field, r, order):
    """The unit tensor of size r: ones exactly on the (i, i, ..., i) diagonal."""
    if order < 1:
        raise ValueError("diagonal tensor needs order >= 1")
    if r < 0:
        raise ValueError("size must be nonnegative")
    data = np.zeros((r,) * order, dtype=np.int64)
    for i in range(r):
        data[(i,) * order] = 1
    return Tensor(field, data)


def restrict(t, maps):
    """Apply one matrix per leg: out = (maps[0], ..., maps[k-1]) . t.

    maps[i] has shape (m_i, n_i) with n_i matching leg i of t; the result has
    shape (m_0, ..., m_{k-1}). Computed as a chain of exact mode products.
    """
    if len(maps) != t.order:
        raise ValueError(f"expected {t.order} maps, got {len(maps)}")
    p = t.field.modulus
    data = t.data
    for axis, m in enumerate(maps):
        if not isinstance(m, Matrix):
            raise TypeError("maps must be Matrix instances")
        if m.field != t.field:
            raise ValueError("field mismatch between tensor and map")
        if m.cols != data.shape[axis]:
            raise ValueError(
                f"map on leg {axis} has {m.cols} columns, leg has size {data.shape[axis]}"
            )
        moved = np.moveaxis(data, axis, 0)
        flat = moved.reshape(data.shape[axis], -1)
        out = mat_mul_mod(m.data, flat, p)
        moved_shape = (m.rows,) + moved.shape[1:]
        data = np.moveaxis(out.reshape(moved_shape), 0, axis)
    return Tensor(t.field, data)


def direct_sum(t, s):
    """Block-diagonal sum: legs concatenate, blocks sit in opposite corners."""
    if t.field != s.field:
        raise ValueError("field mismatch")
    if t.order != s.order:
        raise ValueError("order mismatch")
    shape = tuple(a + b for a, b in zip(t.shape, s.shape))
    data = np.zeros(shape, dtype=np.int64)
    data[tuple(slice(0, n) for n in t.shape)] = t.data
    data[tuple(slice(n, None) for n in t.shape)] = s.data
    return Tensor(t.field, data)


def tensor_kron(t, s):
    """Leg-wise Kronecker product; leg i of the result has size n_i * m_i.

    Index arithmetic matches the matrix kron: position i*m + j on a combined
    leg pairs index i of t with index j of s.
    """
    if t.field != s.field:
        raise ValueError("field mismatch")
    if t.order != s.order:
        raise ValueError("order mismatch")
    k = t.order
    # outer product -> interleave axes (t_0, s_0, t_1, s_1, ...) -> merge pairs
    outer = np.multiply.outer(t.data, s.data) % t.field.modulus
    perm = [axis for i in range(k) for axis in (i, k + i)]
    interleaved = outer.transpose(perm)
    shape = tuple(a * b for a, b in zip(t.shape, s.shape))
    return Tensor(t.field, interleaved.reshape(shape))
