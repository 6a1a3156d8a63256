"""Subspaces of tensor spaces: lifts, coordinate subspaces, structured samples.

A TensorSubspace is a finite independent basis inside one dense tensor
space. The three named constructions here are the ingredients of the
spanning certificates:

- lift_subspace embeds a subspace of the order-(k-1) space on the legs
  other than i into the full space, tensoring with every unit vector on
  leg i (the [i]-lift),
- basis_W_r is the coordinate subspace of [r]^k spanned by units whose
  index tuple repeats a value (order 3 by default; higher orders are an
  experimental analogue behind a flag),
- basis_Y_r is the coordinate complement, inside the full space, of the
  off-diagonal part of the leading [r]^k block,
- sample_X_r draws a random tensor whose leading [r]^k block is diagonal
  with nonzero diagonal entries and whose remaining entries are uniform.
"""

from __future__ import annotations

import itertools

import numpy as np

from . import _kernels
from .field import SeededStream
from .tensor import Tensor, unit_tensor


class TensorSubspace:
    """An independent list of basis tensors inside a common ambient space."""

    __slots__ = ("field", "ambient_shape", "basis")

    def __init__(self, field, ambient_shape, basis, validate=True):
        ambient_shape = tuple(int(n) for n in ambient_shape)
        basis = list(basis)
        for t in basis:
            if not isinstance(t, Tensor):
                raise TypeError("basis elements must be Tensors")
            if t.field != field:
                raise ValueError("basis tensor field mismatch")
            if t.shape != ambient_shape:
                raise ValueError(
                    f"basis tensor shape {t.shape} does not match ambient {ambient_shape}"
                )
        if validate and basis:
            if _kernels.rank_destructive(self._stack(basis), field.modulus) != len(basis):
                raise ValueError("basis is linearly dependent")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "ambient_shape", ambient_shape)
        object.__setattr__(self, "basis", tuple(basis))

    def __setattr__(self, name, value):
        raise AttributeError("TensorSubspace is immutable")

    @staticmethod
    def _stack(basis):
        return np.stack([t.data.reshape(-1) for t in basis]).astype(np.int64)

    @property
    def dim(self):
        return len(self.basis)

    @property
    def ambient_dim(self):
        size = 1
        for n in self.ambient_shape:
            size *= n
        return size

    def flat_matrix(self):
        """Basis vectors as rows of a (dim x ambient_dim) array."""
        if not self.basis:
            return np.zeros((0, self.ambient_dim), dtype=np.int64)
        return self._stack(self.basis)

    def contains(self, t):
        if t.field != self.field or t.shape != self.ambient_shape:
            raise ValueError("tensor does not live in the ambient space")
        acc = _kernels.EchelonAccumulator(self.field.modulus, self.ambient_dim)
        for b in self.basis:
            acc.try_add(b.data.reshape(-1))
        return acc.contains(t.data.reshape(-1))

    def __eq__(self, other):
        if not isinstance(other, TensorSubspace):
            return NotImplemented
        return (
            self.field == other.field
            and self.ambient_shape == other.ambient_shape
            and self.basis == other.basis
        )

    def __repr__(self):
        return f"TensorSubspace({self.field}, ambient={self.ambient_shape}, dim={self.dim})"


def lifted_flat_rows(rows, axis, dims):
    """Row-matrix form of lifting flat order-(k-1) vectors onto one leg.

    rows has shape (m, prod(dims without axis)); the result has shape
    (dims[axis]*m, prod(dims)): each input row b contributes the rows
    e_t (x) b for t along the lifted leg, t-major. This is lift_subspace on
    flattened data, shared by the certification fast paths.
    """
    dims = tuple(dims)
    n = dims[axis]
    rest = dims[:axis] + dims[axis + 1 :]
    m = rows.shape[0]
    total = 1
    for d in dims:
        total *= d
    out = np.zeros((n * m, total), dtype=np.int64)
    if m == 0 or total == 0:
        return out
    view = out.reshape((n * m,) + dims)
    shaped = rows.reshape((m,) + rest)
    for t in range(n):
        idx = (slice(t * m, (t + 1) * m),) + (slice(None),) * axis + (t,)
        view[idx] = shaped
    return out


def lift_subspace(x, axis, n):
    """Lift a subspace on the legs other than ``axis`` into the full space.

    Given x inside the order-(k-1) space, returns the span of e_t (x) b for
    t in [n] and b in the basis of x, living in the order-k space whose leg
    ``axis`` has size n. Basis order: t outer, b inner. The lift of an
    independent family stays independent (distinct t give disjoint
    supports), so no re-validation happens.
    """
    if not 0 <= axis <= len(x.ambient_shape):
        raise ValueError("axis out of range")
    shape = x.ambient_shape[:axis] + (n,) + x.ambient_shape[axis:]
    lifted = []
    for t in range(n):
        idx = (slice(None),) * axis + (t,)
        for b in x.basis:
            data = np.zeros(shape, dtype=np.int64)
            data[idx] = b.data
            lifted.append(Tensor(x.field, data))
    return TensorSubspace(x.field, shape, lifted, validate=False)


def repeated_index_tuples(r, order):
    """Index tuples of [r]^order with at least one repeated value, lex order."""
    out = []
    for idx in itertools.product(range(r), repeat=order):
        if len(set(idx)) < order:
            out.append(idx)
    return out


def distinct_index_tuples(r, order):
    """Index tuples of [r]^order with all values distinct, lex order."""
    out = []
    for idx in itertools.product(range(r), repeat=order):
        if len(set(idx)) == order:
            out.append(idx)
    return out


def basis_W_r(field, r, order=3, experimental_higher_order=False):
    """Coordinate subspace of [r]^order spanned by repeated-index units.

    For order 3 this has dimension 3r^2 - 2r. Orders above 3 use the same
    repeated-index recipe; that generalization is untested territory, so it
    must be enabled explicitly.
    """
    if order < 2:
        raise ValueError("order must be at least 2")
    if order != 3 and not experimental_higher_order:
        raise ValueError(
            "repeated-index subspace is only established for order 3; "
            "pass experimental_higher_order=True to use the analogue"
        )
    shape = (r,) * order
    basis = [unit_tensor(field, shape, idx) for idx in repeated_index_tuples(r, order)]
    return TensorSubspace(field, shape, basis, validate=False)


def block_offdiagonal_tuples(shape, r):
    """Tuples inside the leading [r]^k block that are off the diagonal."""
    order = len(shape)
    out = []
    for idx in itertools.product(range(r), repeat=order):
        if any(j != idx[0] for j in idx):
            out.append(idx)
    return out


def basis_Y_r(field, shape, r):
    """Units at every position except the off-diagonal part of the [r]^k block.

    Dimension: prod(shape) - r^k + r. Materialized as dense unit tensors, so
    only sensible for small ambient spaces; the certification fast paths
    never build it explicitly.
    """
    shape = tuple(shape)
    if r < 0 or r > min(shape):
        raise ValueError("r must satisfy 0 <= r <= min(shape)")
    excluded = set(block_offdiagonal_tuples(shape, r))
    basis = [
        unit_tensor(field, shape, idx)
        for idx in itertools.product(*(range(n) for n in shape))
        if idx not in excluded
    ]
    return TensorSubspace(field, shape, basis, validate=False)


def sample_X_r(field, shape, r, seed):
    """Random tensor whose leading [r]^k block is diagonal and invertible.

    Diagonal entries are drawn nonzero; every entry outside the block is
    uniform. Draw order is fixed (diagonal first, then the remaining
    positions in row-major order), so the result is seed-reproducible.
    """
    shape = tuple(shape)
    if r < 0 or r > min(shape):
        raise ValueError("r must satisfy 0 <= r <= min(shape)")
    stream = SeededStream(seed)
    data = np.zeros(shape, dtype=np.int64)
    order = len(shape)
    for i in range(r):
        data[(i,) * order] = stream.nonzero_residue(field)
    grid = np.indices(shape)
    outside = (grid >= r).any(axis=0)
    count = int(outside.sum())
    draws = np.array(stream.residues(field, count), dtype=np.int64)
    data[outside] = draws
    return Tensor(field, data)
