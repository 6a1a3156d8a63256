"""Exact GF(p) elimination kernels.

Matrices are numpy int64 arrays with entries already reduced into [0, p).
The rank kernel is the single hot spot of the whole package (spanning
certificates reduce to one big rank), so it gets a compiled fast path:

- numba + p = 2^31 - 1: Mersenne folding replaces the div in the inner loop
  (x mod (2^31 - 1) via shift/add, since 2^31 = 1 mod p),
- numba + other p: plain remainder arithmetic,
- no numba: vectorized numpy elimination, same results, just slower.

Everything is serial on purpose. Results must not depend on scheduling, and
the target environment is a single core anyway.

The reduced-row-echelon and solve helpers below are numpy-only; they only
ever see small systems (witness bookkeeping, brute-force search over tiny
fields).
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    _HAVE_NUMBA = False

_M31 = (1 << 31) - 1


def _as_matrix(a):
    arr = np.ascontiguousarray(a, dtype=np.int64)
    if arr.ndim != 2:
        raise ValueError("expected a 2-d array")
    return arr


if _HAVE_NUMBA:

    @njit(cache=True)
    def _powmod(a, e, p):
        result = 1
        base = a % p
        while e > 0:
            if e & 1:
                result = (result * base) % p
            base = (base * base) % p
            e >>= 1
        return result

    @njit(cache=True)
    def _rank_mersenne(A):
        # Specialized to p = 2^31 - 1: a + b*c stays below 2^62, and two
        # fold steps plus one conditional subtract reduce it mod p.
        p = _M31
        m, n = A.shape
        r = 0
        for c in range(n):
            if r == m:
                break
            piv = -1
            for i in range(r, m):
                if A[i, c] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != r:
                for j in range(c, n):
                    t = A[r, j]
                    A[r, j] = A[piv, j]
                    A[piv, j] = t
            inv = _powmod(A[r, c], p - 2, p)
            for i in range(r + 1, m):
                if A[i, c] == 0:
                    continue
                f = (A[i, c] * inv) % p
                nf = p - f
                for j in range(c, n):
                    x = A[i, j] + nf * A[r, j]
                    x = (x & p) + (x >> 31)
                    x = (x & p) + (x >> 31)
                    if x >= p:
                        x -= p
                    A[i, j] = x
            r += 1
        return r

    @njit(cache=True)
    def _rank_generic_numba(A, p):
        m, n = A.shape
        r = 0
        for c in range(n):
            if r == m:
                break
            piv = -1
            for i in range(r, m):
                if A[i, c] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != r:
                for j in range(c, n):
                    t = A[r, j]
                    A[r, j] = A[piv, j]
                    A[piv, j] = t
            inv = _powmod(A[r, c], p - 2, p)
            for i in range(r + 1, m):
                if A[i, c] == 0:
                    continue
                nf = p - (A[i, c] * inv) % p
                for j in range(c, n):
                    A[i, j] = (A[i, j] + nf * A[r, j]) % p
            r += 1
        return r


def _rank_numpy(A, p):
    """Row elimination with vectorized updates; mutates A."""
    m, n = A.shape
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv], c:] = A[[piv, r], c:]
        inv = pow(int(A[r, c]), p - 2, p)
        below = A[r + 1 :, c]
        rows = np.nonzero(below)[0]
        if rows.size:
            f = (below[rows] * inv) % p
            # f and the pivot row are both < p, so the product fits in int64.
            prod = (f[:, None] * A[r, c:][None, :]) % p
            block = A[r + 1 :, c:]
            block[rows] = (block[rows] - prod) % p
        r += 1
    return r


def rank_destructive(A, p):
    """Rank of A over GF(p). Overwrites A; callers pass throwaway arrays."""
    A = _as_matrix(A)
    if A.size == 0:
        return 0
    if _HAVE_NUMBA:
        if p == _M31:
            return int(_rank_mersenne(A))
        return int(_rank_generic_numba(A, p))
    return _rank_numpy(A, p)


def rank_of(a, p):
    """Rank over GF(p) without touching the input."""
    return rank_destructive(np.array(a, dtype=np.int64), p)


def row_reduce(a, p):
    """Reduced row echelon form over GF(p).

    Returns (R, pivots) where R is the RREF of the input and pivots lists
    the pivot column of each nonzero row. Pure numpy; meant for the small
    systems behind solving and witness bookkeeping, not the big rank calls.
    """
    A = _as_matrix(a).copy()
    m, n = A.shape
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        inv = pow(int(A[r, c]), p - 2, p)
        A[r] = (A[r] * inv) % p
        others = np.nonzero(A[:, c])[0]
        others = others[others != r]
        if others.size:
            prod = (A[others, c][:, None] * A[r][None, :]) % p
            A[others] = (A[others] - prod) % p
        pivots.append(c)
        r += 1
    return A, pivots


def solve_all_columns(a, b, p):
    """Solve A @ X = B over GF(p) for every column of B simultaneously.

    Returns X (n_cols(A) x n_cols(B)) if every column of B lies in the
    column space of A, else None.
    """
    A = _as_matrix(a)
    B = _as_matrix(b)
    m, n = A.shape
    if B.shape[0] != m:
        raise ValueError("row counts differ")
    t = B.shape[1]
    aug = np.concatenate([A, B], axis=1)
    R, pivots = row_reduce(aug, p)
    # A pivot landing in the B block means some target column escapes the
    # column space of A.
    if any(c >= n for c in pivots):
        return None
    X = np.zeros((n, t), dtype=np.int64)
    for row, c in enumerate(pivots):
        X[c] = R[row, n:]
    return X


class EchelonAccumulator:
    """Incremental echelon basis over GF(p) for independence filtering.

    Feed vectors one at a time; ``try_add`` reports whether the vector
    enlarged the span. Stored rows are pivot-normalized so reduction is a
    single fused multiply-subtract per stored row.
    """

    def __init__(self, p, width):
        self.p = p
        self.width = width
        self._rows = []  # (pivot_col, normalized row)

    @property
    def rank(self):
        return len(self._rows)

    def residual(self, vec):
        """Reduce vec against the stored basis; returns the remainder."""
        v = np.array(vec, dtype=np.int64) % self.p
        if v.shape != (self.width,):
            raise ValueError("vector width mismatch")
        for c, row in self._rows:
            coeff = int(v[c])
            if coeff:
                v = (v - coeff * row) % self.p
        return v

    def contains(self, vec):
        return not self.residual(vec).any()

    def try_add(self, vec):
        """Add vec to the span; True if it was independent of the basis."""
        v = self.residual(vec)
        nz = np.nonzero(v)[0]
        if nz.size == 0:
            return False
        c = int(nz[0])
        inv = pow(int(v[c]), self.p - 2, self.p)
        v = (v * inv) % self.p
        self._rows.append((c, v))
        self._rows.sort(key=lambda item: item[0])
        return True
