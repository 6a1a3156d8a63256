import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from subrank import _kernels
from subrank.field import DEFAULT_MODULUS, FieldSpec
from subrank.subspaces import (
    TensorSubspace,
    basis_W_r,
    basis_Y_r,
    block_offdiagonal_tuples,
    distinct_index_tuples,
    lift_subspace,
    lifted_flat_rows,
    repeated_index_tuples,
    sample_X_r,
)
from subrank.tensor import Tensor, unit_tensor

F = FieldSpec(DEFAULT_MODULUS)


def make_subspace(shape, vectors):
    return TensorSubspace(
        F, shape, [Tensor(F, np.array(v, dtype=np.int64).reshape(shape)) for v in vectors]
    )


def test_subspace_validates_independence():
    with pytest.raises(ValueError):
        make_subspace((2, 2), [[1, 0, 0, 0], [2, 0, 0, 0]])
    x = make_subspace((2, 2), [[1, 0, 0, 0], [0, 1, 0, 0]])
    assert x.dim == 2
    assert x.ambient_shape == (2, 2)


def test_subspace_contains():
    x = make_subspace((2, 2), [[1, 0, 0, 0], [0, 0, 0, 1]])
    inside = Tensor.from_entries(F, (2, 2), [3, 0, 0, 7])
    outside = Tensor.from_entries(F, (2, 2), [0, 1, 0, 0])
    assert x.contains(inside)
    assert not x.contains(outside)


def test_flat_matrix_row_major():
    x = make_subspace((2, 2), [[0, 1, 2, 3]])
    assert x.flat_matrix().tolist() == [[0, 1, 2, 3]]


@pytest.mark.parametrize("r,order", [(1, 3), (2, 3), (3, 3), (4, 3), (2, 4), (3, 4)])
def test_index_tuple_counts(r, order):
    rep = repeated_index_tuples(r, order)
    dis = distinct_index_tuples(r, order)
    assert len(rep) + len(dis) == r ** order
    falling = 1
    for i in range(order):
        falling *= max(r - i, 0)
    assert len(dis) == falling
    assert all(len(set(t)) < order for t in rep)
    assert all(len(set(t)) == order for t in dis)


@pytest.mark.parametrize("r", [1, 2, 3, 5])
def test_repeated_index_subspace_dimension(r):
    w = basis_W_r(F, r)
    assert w.ambient_shape == (r, r, r)
    assert w.dim == 3 * r * r - 2 * r
    # every basis element is a coordinate unit on a repeated-index tuple
    for t in w.basis:
        nz = np.argwhere(t.data)
        assert len(nz) == 1
        assert len(set(nz[0].tolist())) < 3


def test_repeated_index_higher_order_is_opt_in():
    with pytest.raises(ValueError):
        basis_W_r(F, 2, order=4)
    w = basis_W_r(F, 2, order=4, experimental_higher_order=True)
    assert w.dim == len(repeated_index_tuples(2, 4))


@pytest.mark.parametrize("shape,r", [((4, 4, 4), 3), ((3, 5, 4), 2), ((2, 2, 2), 2)])
def test_granted_coordinate_subspace_dimension(shape, r):
    y = basis_Y_r(F, shape, r)
    prod = shape[0] * shape[1] * shape[2]
    assert y.dim == prod - (r ** 3 - r)
    off = set(block_offdiagonal_tuples(shape, r))
    assert len(off) == r ** 3 - r
    for t in y.basis:
        nz = np.argwhere(t.data)
        assert len(nz) == 1
        assert tuple(nz[0].tolist()) not in off


def test_lift_multiplies_dimension_by_leg_size():
    x = make_subspace((2, 2), [[1, 0, 0, 0], [0, 1, 0, 0]])
    for axis, n in ((0, 3), (1, 4), (2, 2)):
        lifted = lift_subspace(x, axis, n)
        assert lifted.dim == 2 * n
        assert lifted.ambient_shape[axis] == n


def test_lift_places_slices_on_the_right_axis():
    x = make_subspace((2, 2), [[1, 2, 3, 4]])
    lifted = lift_subspace(x, 1, 3)
    # basis vector t paired with unit e_s on axis 1: slice s equals t there
    found = 0
    for b in lifted.basis:
        for s in range(3):
            sl = b.data[:, s, :]
            if np.array_equal(sl, np.array([[1, 2], [3, 4]])):
                others = [u for u in range(3) if u != s]
                assert not np.any(b.data[:, others, :])
                found += 1
    assert found == 3


def test_lifted_flat_rows_matches_lift_subspace():
    x = make_subspace((2, 2), [[1, 2, 3, 4], [5, 6, 7, 8]])
    rows = lifted_flat_rows(x.flat_matrix(), 0, (3, 2, 2))
    lifted = lift_subspace(x, 0, 3)
    assert rows.shape == (6, 12)
    got = {r.tobytes() for r in rows}
    expect = {b.data.reshape(-1).tobytes() for b in lifted.basis}
    assert got == expect


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_block_diagonal_sample_pattern(seed):
    t = sample_X_r(F, (4, 5, 3), 2, seed=seed)
    corner = t.data[:2, :2, :2].copy()
    for i in range(2):
        assert corner[(i, i, i)] != 0
        corner[(i, i, i)] = 0
    assert not np.any(corner)


def test_block_diagonal_sample_reproducible():
    a = sample_X_r(F, (4, 4, 4), 3, seed=9)
    b = sample_X_r(F, (4, 4, 4), 3, seed=9)
    c = sample_X_r(F, (4, 4, 4), 3, seed=10)
    assert a == b
    assert a != c


def test_sample_requires_room_for_the_block():
    with pytest.raises(ValueError):
        sample_X_r(F, (2, 2, 2), 3, seed=0)


def test_unit_tensors_span_check_via_subspace():
    units = [unit_tensor(F, (2, 2), (i, j)) for i in range(2) for j in range(2)]
    x = TensorSubspace(F, (2, 2), units)
    assert x.dim == 4
    assert _kernels.rank_of(x.flat_matrix(), DEFAULT_MODULUS) == 4
