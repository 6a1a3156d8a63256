import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from subrank import _kernels
from subrank.field import DEFAULT_MODULUS, FieldSpec, SeededStream
from subrank.matrix import (
    Matrix,
    independent_basis,
    kron,
    mat_mul_mod,
    random_subspace,
    rank,
)

F = FieldSpec(DEFAULT_MODULUS)


def exact_product_mod(a, b, p):
    """Independent oracle: arbitrary-precision Python int matmul."""
    rows, inner = a.shape
    cols = b.shape[1]
    out = np.zeros((rows, cols), dtype=np.int64)
    for i in range(rows):
        for j in range(cols):
            out[i, j] = sum(int(a[i, t]) * int(b[t, j]) for t in range(inner)) % p
    return out


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_mat_mul_mod_matches_bigint_oracle(data):
    rng = np.random.default_rng(data.draw(st.integers(0, 2 ** 32 - 1)))
    m, k, n = (data.draw(st.integers(1, 6)) for _ in range(3))
    a = rng.integers(0, DEFAULT_MODULUS, size=(m, k), dtype=np.int64)
    b = rng.integers(0, DEFAULT_MODULUS, size=(k, n), dtype=np.int64)
    assert np.array_equal(
        mat_mul_mod(a, b, DEFAULT_MODULUS),
        exact_product_mod(a, b, DEFAULT_MODULUS),
    )


def test_mat_mul_mod_worst_case_entries():
    # largest residues at the largest supported inner dimension bucket
    p = DEFAULT_MODULUS
    a = np.full((2, 64), p - 1, dtype=np.int64)
    b = np.full((64, 2), p - 1, dtype=np.int64)
    assert np.array_equal(mat_mul_mod(a, b, p), exact_product_mod(a, b, p))


def test_matrix_ops_and_immutability():
    a = Matrix.from_entries(F, 2, 2, [1, 2, 3, 4])
    b = Matrix.from_entries(F, 2, 2, [0, 1, 1, 0])
    assert (a @ b).entries() == [2, 1, 4, 3]
    assert (a + b).entries() == [1, 3, 4, 4]
    assert (a - a).entries() == [0, 0, 0, 0]
    assert a.transpose().entries() == [1, 3, 2, 4]
    assert a == Matrix.from_entries(F, 2, 2, [1, 2, 3, 4])
    assert hash(a) == hash(Matrix.from_entries(F, 2, 2, [1, 2, 3, 4]))
    with pytest.raises(AttributeError):
        a.field = F
    with pytest.raises(ValueError):
        a.data[0, 0] = 9


def test_rank_known_values():
    assert rank(Matrix.identity(F, 5)) == 5
    assert rank(Matrix.zeros(F, 3, 4)) == 0
    singular = Matrix.from_entries(F, 2, 2, [1, 2, 2, 4])
    assert rank(singular) == 1
    # rank over GF(2) differs from rational rank for this one
    f2 = FieldSpec(2)
    m = Matrix.from_entries(f2, 2, 2, [1, 1, 1, 1])
    assert rank(m) == 1


def naive_rank_bigint(a, p):
    """Fraction-free elimination over Python ints, reduced mod p."""
    a = [[int(x) % p for x in row] for row in a]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c] % p), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], p - 2, p)
        a[r] = [(x * inv) % p for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        r += 1
        if r == rows:
            break
    return r


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 7), st.integers(1, 7))
def test_rank_kernels_match_bigint_elimination(seed, m, n):
    rng = np.random.default_rng(seed)
    for p in (2, 97, DEFAULT_MODULUS):
        a = rng.integers(0, p, size=(m, n), dtype=np.int64)
        assert _kernels.rank_of(a, p) == naive_rank_bigint(a, p)


def test_rank_kernel_numpy_fallback_agrees():
    rng = np.random.default_rng(5)
    a = rng.integers(0, DEFAULT_MODULUS, size=(40, 55), dtype=np.int64)
    fast = _kernels.rank_of(a, DEFAULT_MODULUS)
    slow = _kernels._rank_numpy(a.copy(), DEFAULT_MODULUS)
    assert fast == slow == naive_rank_bigint(a, DEFAULT_MODULUS)


def test_kron_acts_as_the_two_leg_tensor_action():
    # kron(A, B) vec(X) equals vec(A X B^T), checked by direct summation
    rng = np.random.default_rng(11)
    p = DEFAULT_MODULUS
    a = Matrix(F, rng.integers(0, p, size=(3, 2), dtype=np.int64))
    b = Matrix(F, rng.integers(0, p, size=(4, 5), dtype=np.int64))
    x = rng.integers(0, p, size=(2, 5), dtype=np.int64)
    big = kron(a, b)
    assert big.shape == (12, 10)
    lhs = mat_mul_mod(big.data, x.reshape(-1, 1), p).reshape(3, 4)
    rhs = np.zeros((3, 4), dtype=np.int64)
    for i in range(3):
        for j in range(4):
            acc = 0
            for s in range(2):
                for t in range(5):
                    acc += int(a.data[i, s]) * int(b.data[j, t]) * int(x[s, t])
            rhs[i, j] = acc % p
    assert np.array_equal(lhs, rhs)


def test_row_reduce_produces_reduced_echelon():
    rng = np.random.default_rng(3)
    a = rng.integers(0, DEFAULT_MODULUS, size=(6, 8), dtype=np.int64)
    red, pivots = _kernels.row_reduce(a.copy(), DEFAULT_MODULUS)
    assert len(pivots) == naive_rank_bigint(a, DEFAULT_MODULUS)
    for row, col in enumerate(pivots):
        assert red[row, col] == 1
        others = [r for r in range(red.shape[0]) if r != row]
        assert not np.any(red[others, col])


def test_solve_all_columns_solves_or_reports_none():
    p = 97
    f = FieldSpec(p)
    rng = np.random.default_rng(17)
    a = rng.integers(0, p, size=(5, 4), dtype=np.int64)
    x_true = rng.integers(0, p, size=(4, 3), dtype=np.int64)
    b = exact_product_mod(a, x_true, p)
    x = _kernels.solve_all_columns(a, b, p)
    assert x is not None
    assert np.array_equal(exact_product_mod(a, np.asarray(x), p), b)
    # unsatisfiable system: b outside the column space
    a0 = np.zeros((3, 2), dtype=np.int64)
    b0 = np.array([[1], [0], [0]], dtype=np.int64)
    assert _kernels.solve_all_columns(a0, b0, p) is None
    del f


def test_echelon_accumulator_tracks_rank_and_membership():
    p = DEFAULT_MODULUS
    acc = _kernels.EchelonAccumulator(p, 4)
    v1 = np.array([1, 2, 3, 4], dtype=np.int64)
    v2 = np.array([2, 4, 6, 8], dtype=np.int64)  # dependent on v1
    v3 = np.array([0, 1, 0, 0], dtype=np.int64)
    assert acc.try_add(v1)
    assert not acc.try_add(v2)
    assert acc.try_add(v3)
    assert acc.rank() == 2
    assert acc.contains((v1 + v3) % p)
    assert not acc.contains(np.array([0, 0, 1, 0], dtype=np.int64))


def test_independent_basis_keeps_originals_in_order():
    vecs = [
        np.array([1, 0, 0], dtype=np.int64),
        np.array([2, 0, 0], dtype=np.int64),
        np.array([0, 5, 0], dtype=np.int64),
    ]
    kept = independent_basis(F, vecs)
    assert len(kept) == 2
    assert np.array_equal(kept[0], vecs[0])
    assert np.array_equal(kept[1], vecs[2])


def test_random_subspace_reproducible_and_full_rank():
    vs = random_subspace(F, 10, 4, seed=77)
    ws = random_subspace(F, 10, 4, seed=77)
    other = random_subspace(F, 10, 4, seed=78)
    assert all(np.array_equal(v, w) for v, w in zip(vs, ws))
    assert any(not np.array_equal(v, w) for v, w in zip(vs, other))
    assert _kernels.rank_of(np.stack(vs), DEFAULT_MODULUS) == 4
    assert random_subspace(F, 3, 0, seed=0) == []


def test_random_subspace_dim_bounds():
    with pytest.raises(ValueError):
        random_subspace(F, 3, 4, seed=0)


def test_random_subspace_survives_tiny_fields():
    # GF(2) makes dependent draws likely, exercising the redraw path
    f2 = FieldSpec(2)
    for seed in range(20):
        vs = random_subspace(f2, 4, 3, seed=seed)
        assert _kernels.rank_of(np.stack(vs), 2) == 3
