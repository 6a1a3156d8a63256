"""Ground-truth subrank for tiny tensors, plus the direct-sum gap demo.

A restriction certificate is a tuple of matrices, one per leg, carrying the
r-diagonal to the target tensor; verifying one is a single exact restrict
and compare, so a certificate at r proves subrank >= r over its field.
brute_subrank inverts that: it exhaustively searches for the largest r that
admits a certificate over GF(2) or GF(3), which makes it an independent
oracle for the randomized machinery (note the answer is field-dependent).

non_additivity_demo builds the classic additivity violation: a random T
and its complement S = I_n - T each obey the generic square-root upper
bound, yet T (+) S restricts onto I_n via explicit summing matrices, so the
certified subrank of the direct sum beats the sum of the generic bounds
once 2*floor(sqrt(3n-2)) drops below n.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import isqrt

import numpy as np

from . import _kernels
from .bounds import upper_bound_generic
from .field import FieldSpec, SeededStream
from .matrix import Matrix
from .tensor import Tensor, diagonal_tensor, direct_sum, restrict


@dataclass(frozen=True)
class RestrictionCertificate:
    """Maps (one r x n_i matrix per leg) asserting that I_r restricts to T."""

    r: int
    maps: tuple
    field: FieldSpec

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        if self.r < 0:
            raise ValueError("r must be >= 0")
        for m in self.maps:
            if not isinstance(m, Matrix):
                raise TypeError("certificate maps must be Matrix instances")
            if m.field != self.field:
                raise ValueError("certificate map field mismatch")
            if m.rows != self.r:
                raise ValueError(f"certificate maps must have {self.r} rows")

    def to_json_dict(self):
        return {
            "r": self.r,
            "modulus": self.field.modulus,
            "maps": [m.entries() for m in self.maps],
        }


def certificate_from_json_dict(d, dims=None):
    """Rebuild a certificate; ``dims`` supplies column counts when r = 0."""
    field = FieldSpec(int(d["modulus"]))
    r = int(d["r"])
    maps = []
    for i, entries in enumerate(d["maps"]):
        if r > 0:
            if len(entries) % r:
                raise ValueError("map entry count is not a multiple of r")
            cols = len(entries) // r
        elif dims is not None:
            cols = dims[i]
        else:
            raise ValueError("r = 0 certificates need explicit dims to rebuild")
        maps.append(Matrix.from_entries(field, r, cols, entries))
    return RestrictionCertificate(r, maps, field)


def verify_certificate(cert, t):
    """Exact check that restrict(T, maps) is the r-diagonal."""
    if cert.field != t.field:
        raise ValueError("certificate and tensor live over different fields")
    if len(cert.maps) != t.order:
        raise ValueError(f"certificate has {len(cert.maps)} maps for an order-{t.order} tensor")
    for leg, m in enumerate(cert.maps):
        if m.cols != t.shape[leg]:
            raise ValueError(
                f"map for leg {leg} has {m.cols} columns, tensor leg has size {t.shape[leg]}"
            )
    return restrict(t, list(cert.maps)) == diagonal_tensor(t.field, cert.r, t.order)


def certificate_for_diagonal(t, r):
    """Certificate for a tensor whose leading r-block is a nonzero diagonal.

    Entries outside the block are arbitrary; the maps project every leg onto
    its first r coordinates, with the last projection scaled by the inverse
    diagonal so the result is exactly I_r. Raises if the block pattern is
    absent (off-diagonal entry in the block, or a zero diagonal entry).
    """
    field = t.field
    k = t.order
    if r < 0 or any(n < r for n in t.shape):
        raise ValueError("r must fit inside every leg")
    corner = t.data[tuple(slice(0, r) for _ in range(k))]
    lam = np.array([corner[(i,) * k] for i in range(r)], dtype=np.int64)
    stripped = corner.copy()
    for i in range(r):
        stripped[(i,) * k] = 0
    if np.any(stripped) or np.any(lam == 0):
        raise ValueError("tensor does not have the diagonal block pattern")
    maps = []
    for leg in range(k):
        proj = np.zeros((r, t.shape[leg]), dtype=np.int64)
        for i in range(r):
            proj[i, i] = field.inv(int(lam[i])) if leg == k - 1 else 1
        maps.append(Matrix(field, proj))
    return RestrictionCertificate(r, maps, field)


@lru_cache(maxsize=None)
def _full_row_rank_maps(q, r, n):
    """All r x n matrices over GF(q) of rank r, as read-only arrays."""
    if r == 0:
        return (np.zeros((0, n), dtype=np.int64),)
    if r > n:
        return ()
    out = []
    digits = q ** np.arange(r * n, dtype=np.int64)
    for code in range(q ** (r * n)):
        a = (code // digits) % q
        a = a.reshape(r, n)
        if _kernels.rank_of(a, q) == r:
            a.flags.writeable = False
            out.append(a)
    return tuple(out)


def _apply_map(u, m, axis, q):
    moved = np.moveaxis(u, axis, 0)
    flat = moved.reshape(moved.shape[0], -1)
    out = (m @ flat) % q
    return np.moveaxis(out.reshape((m.shape[0],) + moved.shape[1:]), 0, axis)


def _diagonal_targets(r, k):
    targets = np.zeros((r ** (k - 1), r), dtype=np.int64)
    for c in range(r):
        targets[np.ravel_multi_index((c,) * (k - 1), (r,) * (k - 1)), c] = 1
    return targets


def _search_restriction(t, r):
    """Some certificate at level r over GF(q), or None after full search.

    Legs 0..k-2 range over all full-row-rank maps (a map of rank < r can
    never carry I_r, so the pruning loses nothing); the last leg is then a
    linear problem solved exactly.
    """
    q = t.field.modulus
    k = t.order
    dims = t.shape
    targets = _diagonal_targets(r, k)

    def scan(u, leg):
        if leg == k - 1:
            a = u.reshape(r ** (k - 1), dims[leg])
            x = _kernels.solve_all_columns(a, targets, q)
            if x is None:
                return None
            return [np.asarray(x).T % q]
        for m in _full_row_rank_maps(q, r, dims[leg]):
            tail = scan(_apply_map(u, m, leg, q), leg + 1)
            if tail is not None:
                return [m] + tail
        return None

    chosen = scan(t.data % q, 0)
    if chosen is None:
        return None
    return RestrictionCertificate(r, [Matrix(t.field, m) for m in chosen], t.field)


def brute_subrank(t, return_certificate=False):
    """Exact subrank over GF(2) or GF(3) by exhaustive certificate search.

    Searches r downward from the flattening-rank bound and returns the first
    r with a verifying certificate. Refuses when the nominal search space
    sum_r prod_i q^(r n_i) over r <= min(dims) exceeds 1e8 candidates.
    With return_certificate=True, returns (r, certificate); the r = 0
    certificate is the vacuous one with empty maps.
    """
    q = t.field.modulus
    if q not in (2, 3):
        raise ValueError("brute_subrank is an oracle for GF(2) and GF(3) only")
    k = t.order
    if k < 2:
        raise ValueError("brute_subrank needs an order >= 2 tensor")
    dims = t.shape
    budget = 0
    for r in range(1, min(dims) + 1):
        size = 1
        for n in dims:
            size *= q ** (r * n)
        budget += size
    if budget > 10 ** 8:
        raise ValueError(f"search space {budget} exceeds the 1e8 candidate cap")

    rmax = min(dims)
    for axis in range(k):
        flat = np.moveaxis(t.data, axis, 0).reshape(dims[axis], -1)
        rmax = min(rmax, _kernels.rank_of(flat % q, q))

    for r in range(rmax, 0, -1):
        cert = _search_restriction(t, r)
        if cert is not None:
            if not verify_certificate(cert, t):
                raise AssertionError("search produced a certificate that fails to verify")
            return (r, cert) if return_certificate else r
    empty = RestrictionCertificate(0, [Matrix.zeros(t.field, 0, n) for n in dims], t.field)
    return (0, empty) if return_certificate else 0


def gap_threshold(scan_limit=4096):
    """Smallest n from which 2*floor(sqrt(3n-2)) < n always holds.

    Found by integer scan; beyond the scan the strict inequality
    n^2 > 4(3n-2) holds for every n >= 12, so the scan is conclusive.
    """
    last_without_gap = 1
    for n in range(2, scan_limit):
        if 2 * isqrt(3 * n - 2) >= n:
            last_without_gap = n
    return last_without_gap + 1


def non_additivity_demo(field, n, seed=0, tensor_t=None):
    """Certify Q(T (+) S) >= n against two generic square-root upper bounds.

    Draws T (or uses ``tensor_t``), sets S = I_n - T, and verifies the
    explicit summing restriction [I | I] per leg carrying T (+) S onto
    T + S = I_n. The per-summand upper bound floor(sqrt(3n-2)) is a generic
    statement about tensors of this shape, reported as such; it is not a
    certified bound for the specific draw.
    """
    if n < 2:
        raise ValueError("the demo needs n >= 2")
    if tensor_t is None:
        stream = SeededStream(seed)
        data = np.array(stream.residues(field, n ** 3), dtype=np.int64).reshape(n, n, n)
        t = Tensor(field, data)
    else:
        t = tensor_t
        if t.field != field:
            raise ValueError("tensor_t field mismatch")
        if t.shape != (n, n, n):
            raise ValueError(f"tensor_t must have shape {(n, n, n)}")
    s = diagonal_tensor(field, n, 3) - t
    total = direct_sum(t, s)
    summing = Matrix(field, np.concatenate([np.eye(n, dtype=np.int64)] * 2, axis=1))
    cert = RestrictionCertificate(n, [summing] * 3, field)
    if not verify_certificate(cert, total):
        raise AssertionError("summing restriction failed to verify")

    per_summand = upper_bound_generic((n, n, n))
    threshold = gap_threshold()
    scan_top = max(n, threshold) + 4
    return {
        "n": n,
        "modulus": field.modulus,
        "seed": seed,
        "tensor_t": t.to_json_dict(),
        "tensor_s": s.to_json_dict(),
        "certificate": cert.to_json_dict(),
        "certificate_verified": True,
        "certified_lower_on_sum": n,
        "summand_upper_bound": {
            "value": per_summand,
            "kind": "generic",
            "note": "holds for generic tensors of this shape, not certified per instance",
        },
        "sum_of_summand_bounds": 2 * per_summand,
        "gap": n - 2 * per_summand,
        "threshold_scan": {
            "first_n_with_gap": threshold,
            "table": [[m, 2 * isqrt(3 * m - 2)] for m in range(2, scan_top + 1)],
        },
    }
