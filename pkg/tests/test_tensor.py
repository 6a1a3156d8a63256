import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from subrank.field import DEFAULT_MODULUS, FieldSpec
from subrank.matrix import Matrix
from subrank.serialize import canonical_dumps
from subrank.tensor import (
    Tensor,
    diagonal_tensor,
    direct_sum,
    restrict,
    tensor_from_json_dict,
    tensor_kron,
    unit_tensor,
)

F = FieldSpec(DEFAULT_MODULUS)
F2 = FieldSpec(2)


def restrict_bruteforce(t, maps):
    """Independent evaluator: full summation with Python ints."""
    p = t.field.modulus
    out_shape = tuple(m.rows for m in maps)
    out = np.zeros(out_shape, dtype=np.int64)
    for out_idx in np.ndindex(*out_shape):
        acc = 0
        for in_idx in np.ndindex(*t.shape):
            term = int(t.data[in_idx])
            for leg in range(t.order):
                term *= int(maps[leg].data[out_idx[leg], in_idx[leg]])
                term %= p
            acc = (acc + term) % p
        out[out_idx] = acc
    return out


def test_tensor_construction_and_entries():
    t = Tensor.from_entries(F, (2, 3), [1, 2, 3, 4, 5, 6])
    assert t.shape == (2, 3)
    assert t.order == 2
    assert t.entries() == [1, 2, 3, 4, 5, 6]
    assert list(t.vec()) == t.entries()  # row-major, last index fastest
    assert t[1, 2] == 6
    with pytest.raises(ValueError):
        Tensor.from_entries(F, (2, 3), [1, 2, 3])


def test_tensor_is_immutable_and_hashable():
    t = Tensor.from_entries(F, (2, 2), [1, 2, 3, 4])
    with pytest.raises(AttributeError):
        t.data = None
    with pytest.raises(ValueError):
        t.data[0, 0] = 5
    assert t == Tensor.from_entries(F, (2, 2), [1, 2, 3, 4])
    assert hash(t) == hash(Tensor.from_entries(F, (2, 2), [1, 2, 3, 4]))
    assert t != Tensor.from_entries(F, (2, 2), [1, 2, 3, 5])


def test_add_sub_reduce_mod_p():
    a = Tensor.from_entries(F, (2,), [DEFAULT_MODULUS - 1, 1])
    b = Tensor.from_entries(F, (2,), [1, 1])
    assert (a + b).entries() == [0, 2]
    assert (a - b).entries() == [DEFAULT_MODULUS - 2, 0]


def test_slices_and_subtensor():
    t = Tensor.from_entries(F, (2, 2, 2), list(range(8)))
    s = t.slice(0, 1)
    assert s.shape == (2, 2)
    assert s.entries() == [4, 5, 6, 7]
    sub = t.subtensor([(1, 2), (0, 2), (0, 2)])
    assert sub.shape == (1, 2, 2)
    assert sub.entries() == [4, 5, 6, 7]


def test_unit_and_diagonal_tensors():
    u = unit_tensor(F, (2, 3), (1, 2))
    assert u.entries() == [0, 0, 0, 0, 0, 1]
    d = diagonal_tensor(F, 3, 3)
    assert d.shape == (3, 3, 3)
    assert sum(d.entries()) == 3
    for i in range(3):
        assert d[i, i, i] == 1
    d0 = diagonal_tensor(F, 0, 3)
    assert d0.shape == (0, 0, 0)


def test_restrict_identity_maps_is_identity():
    t = Tensor.from_entries(F, (2, 3, 2), list(range(12)))
    maps = [Matrix.identity(F, n) for n in t.shape]
    assert restrict(t, maps) == t


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_restrict_matches_bruteforce_summation(seed):
    rng = np.random.default_rng(seed)
    t = Tensor(F, rng.integers(0, DEFAULT_MODULUS, size=(2, 2, 2), dtype=np.int64))
    maps = [
        Matrix(F, rng.integers(0, DEFAULT_MODULUS, size=(2, 2), dtype=np.int64))
        for _ in range(3)
    ]
    assert np.array_equal(restrict(t, maps).data, restrict_bruteforce(t, maps))


def test_restrict_changes_leg_sizes():
    t = Tensor.from_entries(F, (2, 2), [1, 0, 0, 1])
    m0 = Matrix.from_entries(F, 3, 2, [1, 0, 0, 1, 1, 1])
    m1 = Matrix.identity(F, 2)
    out = restrict(t, [m0, m1])
    assert out.shape == (3, 2)
    assert np.array_equal(out.data, np.array([[1, 0], [0, 1], [1, 1]]))


def test_restrict_rejects_bad_shapes():
    t = Tensor.from_entries(F, (2, 2), [1, 0, 0, 1])
    with pytest.raises(ValueError):
        restrict(t, [Matrix.identity(F, 3), Matrix.identity(F, 2)])
    with pytest.raises(ValueError):
        restrict(t, [Matrix.identity(F, 2)])


def test_projection_maps_carry_block_diagonal_to_identity():
    # a tensor with an invertible-diagonal corner restricts onto the
    # diagonal via projections plus one inverse-diagonal correction
    from subrank.oracle import certificate_for_diagonal
    from subrank.subspaces import sample_X_r

    t = sample_X_r(F, (4, 5, 6), 3, seed=2)
    cert = certificate_for_diagonal(t, 3)
    assert restrict(t, list(cert.maps)) == diagonal_tensor(F, 3, 3)


def test_direct_sum_block_structure():
    a = Tensor.from_entries(F2, (1, 1, 1), [1])
    b = Tensor.from_entries(F2, (2, 2, 2), [0] * 7 + [1])
    s = direct_sum(a, b)
    assert s.shape == (3, 3, 3)
    assert s[0, 0, 0] == 1
    assert s[2, 2, 2] == 1
    assert sum(s.entries()) == 2
    # blocks never overlap: cross entries stay zero
    assert s[0, 1, 1] == 0 and s[1, 0, 2] == 0


def test_direct_sum_of_diagonals_is_a_diagonal():
    d2 = diagonal_tensor(F, 2, 3)
    d3 = diagonal_tensor(F, 3, 3)
    assert direct_sum(d2, d3) == diagonal_tensor(F, 5, 3)


def test_tensor_kron_interleaves_indices():
    a = Tensor.from_entries(F, (2, 2), [1, 2, 3, 4])
    b = Tensor.from_entries(F, (3, 2), list(range(6)))
    k = tensor_kron(a, b)
    assert k.shape == (6, 4)
    for i1, i2, j1, j2 in np.ndindex(2, 3, 2, 2):
        assert k[i1 * 3 + i2, j1 * 2 + j2] == F.mul(int(a[i1, j1]), int(b[i2, j2]))


def test_tensor_kron_of_diagonals_is_a_diagonal():
    # interleaving sends diagonal index pairs to diagonal positions
    k = tensor_kron(diagonal_tensor(F, 2, 3), diagonal_tensor(F, 3, 3))
    assert k == diagonal_tensor(F, 6, 3)


def test_json_round_trip_is_byte_identical():
    t = Tensor.from_entries(F, (2, 2, 2), [5, 0, 1, 2, 3, 4, 9, 8])
    blob = canonical_dumps(t.to_json_dict())
    t2 = tensor_from_json_dict(json.loads(blob))
    assert t2 == t
    assert canonical_dumps(t2.to_json_dict()) == blob


def test_json_dict_shape():
    t = Tensor.from_entries(F2, (2, 2), [1, 0, 0, 1])
    d = t.to_json_dict()
    assert d == {"shape": [2, 2], "modulus": 2, "entries": [1, 0, 0, 1]}
