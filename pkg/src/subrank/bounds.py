"""Generic subrank bounds: closed-form upper bounds and randomized certification.

The upper bound is unconditional counting: the variety of tensors admitting a
size-r diagonal restriction has dimension at most
prod(n_i) - r*(r^(k-1) - sum(n_i) + (k-1)), so once that falls short of the
ambient dimension, a generic tensor has subrank < r. Rearranged, the generic
subrank is at most floor((sum(n_i) - (k-1))^(1/(k-1))), and trivially at most
min(n_i).

The lower bound is certified: sample one subspace X_i of (K^r)^{tensor (k-1)}
per leg with dim X_i = min(n_i - r, r^(k-1)), lift each onto its leg inside
K^{r,...,r}, and check that the lifts span the whole space (weak criterion),
or span it together with the repeated-index coordinate subspace W_r (strong
criterion, order 3). A spanning success over GF(p) proves the corresponding
determinant is not identically zero, which certifies the generic lower bound
over characteristic 0. Failure proves nothing; the certifier retries with
fresh seeds and then reports Inconclusive.

``differential_image_rank`` evaluates the same genericity question from the
other end: it samples a structured tensor, reads off the spans of the r x r
corners of its slices, and measures the tangent-space dimension directly.
Full rank there is equivalent to the strong criterion succeeding.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np

from . import _kernels
from .field import FieldSpec
from .matrix import random_subspace
from .subspaces import distinct_index_tuples, lifted_flat_rows


def integer_kth_root(value, k):
    """Largest x >= 0 with x^k <= value; exact integer binary search."""
    if value < 0:
        raise ValueError("value must be nonnegative")
    if k < 1:
        raise ValueError("root order must be positive")
    if value in (0, 1) or k == 1:
        return value if k == 1 else (0 if value == 0 else 1)
    lo, hi = 0, 1
    while hi**k <= value:
        hi *= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if mid**k <= value:
            lo = mid
        else:
            hi = mid
    return lo


def _validate_dims(dims):
    dims = [int(n) for n in dims]
    if len(dims) < 2:
        raise ValueError("need at least 2 legs")
    if any(n < 1 for n in dims):
        raise ValueError("every leg must have size >= 1")
    return dims


def upper_bound_generic(dims):
    """Upper bound on the generic subrank of K^{n_1,...,n_k}.

    floor((sum(n_i) - (k-1))^(1/(k-1))), computed with exact integer
    arithmetic, capped at min(dims) (no tensor beats its smallest leg).
    For cubes of side n and k = 3 this is floor(sqrt(3n - 2)).
    """
    dims = _validate_dims(dims)
    k = len(dims)
    bound = integer_kth_root(sum(dims) - (k - 1), k - 1)
    return min(bound, min(dims))


def dim_Cr_upper(dims, r):
    """Dimension bound for the set of tensors with subrank >= r.

    prod(n_i) - r*(r^(k-1) - sum(n_i) + (k-1)). The value can exceed the
    ambient dimension, in which case it carries no information at that r;
    it is returned unclamped so callers can inspect the polynomial itself.
    """
    dims = _validate_dims(dims)
    if not 0 <= r <= min(dims):
        raise ValueError("r must satisfy 0 <= r <= min(dims)")
    k = len(dims)
    prod = 1
    for n in dims:
        prod *= n
    return prod - r * (r ** (k - 1) - sum(dims) + (k - 1))


def lower_bound_formula(n):
    """Closed-form certified lower bound for cubes: 3d with 3d^2 + 3d <= n.

    Equals 3*floor(sqrt(n/3 + 1/4) - 1/2), evaluated without floating point
    as the largest d satisfying 3d^2 + 3d <= n.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    d = 0
    while 3 * (d + 1) * (d + 1) + 3 * (d + 1) <= n:
        d += 1
    return 3 * d


@dataclass(frozen=True)
class TrialRecord:
    """One certification probe: which r, which seed, how many samples, outcome."""

    r: int
    seed: int
    retries_used: int
    outcome: str  # "certified" or "inconclusive"

    def to_json_dict(self):
        return {
            "r": self.r,
            "seed": self.seed,
            "retries": self.retries_used,
            "outcome": self.outcome,
        }


@dataclass(frozen=True)
class CertifyResult:
    """Outcome of certify_lower. ``certified`` is one-sided evidence.

    ``immediate`` marks the dimension-slack shortcut (some n_i - r at least
    r^(k-1): a generic X_i is then the whole space and no sampling is
    needed). ``reason`` carries a short note for inconclusive outcomes.
    """

    certified: bool
    dims: tuple
    r: int
    mode: str
    seed: int
    retries_used: int
    field: FieldSpec
    immediate: bool = False
    reason: str = ""

    @property
    def outcome(self):
        return "certified" if self.certified else "inconclusive"

    def trial(self):
        return TrialRecord(self.r, self.seed, self.retries_used, self.outcome)


def _lifted_block_rows(rows_list, axis, r, k):
    """Lift flat order-(k-1) vectors onto one leg of the [r]^k block."""
    return lifted_flat_rows(rows_list, axis, (r,) * k)


def _distinct_flat_indices(r, k):
    """Flat (row-major) positions in [r]^k whose index tuple has no repeat."""
    idxs = []
    for tup in distinct_index_tuples(r, k):
        flat = 0
        for v in tup:
            flat = flat * r + v
        idxs.append(flat)
    return np.array(idxs, dtype=np.int64)


def _offdiagonal_flat_indices(r, k):
    """Flat positions in [r]^k off the main diagonal."""
    total = r**k
    diag = np.array(
        [sum(i * r**e for e in range(k)) for i in range(r)], dtype=np.int64
    )
    mask = np.ones(total, dtype=bool)
    mask[diag] = False
    return np.nonzero(mask)[0]


def certify_lower(field, dims, r, mode="strong", seed=0, retries=5):
    """Randomized one-sided certificate for Q(generic tensor of shape dims) >= r.

    Samples per-leg generic subspaces of dimension min(n_i - r, r^(k-1)) and
    tests the spanning criterion by one exact rank computation. ``strong``
    (order 3 only) additionally grants the repeated-index coordinate
    subspace W_r; ``weak`` works at any order. Certified results are sound;
    Inconclusive results prove nothing.

    Attempt t (0-based) seeds leg i with seed + t*k + i, so a logged seed
    replays exactly.
    """
    dims = _validate_dims(dims)
    k = len(dims)
    if mode not in ("weak", "strong"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "strong" and k != 3:
        raise ValueError("strong mode is defined for order-3 tensors only")
    if not 1 <= r <= min(dims):
        raise ValueError(f"r must satisfy 1 <= r <= min(dims)={min(dims)}")
    if retries < 1:
        raise ValueError("retries must be >= 1")

    ambient = r ** (k - 1)
    # Dimension slack: a generic subspace of dimension >= r^(k-1) is the whole
    # slice space, whose lift alone spans everything.
    if any(n - r >= ambient for n in dims):
        return CertifyResult(
            certified=True,
            dims=tuple(dims),
            r=r,
            mode=mode,
            seed=seed,
            retries_used=0,
            field=field,
            immediate=True,
        )

    sub_dims = [min(n - r, ambient) for n in dims]
    if mode == "strong":
        target_cols = _distinct_flat_indices(r, k)
    else:
        target_cols = None
    needed = len(target_cols) if target_cols is not None else r**k
    total_rows = sum(r * d for d in sub_dims)
    if total_rows < needed:
        return CertifyResult(
            certified=False,
            dims=tuple(dims),
            r=r,
            mode=mode,
            seed=seed,
            retries_used=0,
            field=field,
            reason="dimension count rules out spanning",
        )

    for attempt in range(retries):
        blocks = []
        for leg in range(k):
            d = sub_dims[leg]
            if d == 0:
                continue
            basis = random_subspace(field, ambient, d, seed + attempt * k + leg)
            blocks.append(_lifted_block_rows(np.stack(basis), leg, r, k))
        if blocks:
            stacked = np.concatenate(blocks, axis=0)
        else:
            stacked = np.zeros((0, r**k), dtype=np.int64)
        if target_cols is not None:
            stacked = np.ascontiguousarray(stacked[:, target_cols])
        got = _kernels.rank_destructive(stacked, field.modulus)
        if got == needed:
            return CertifyResult(
                certified=True,
                dims=tuple(dims),
                r=r,
                mode=mode,
                seed=seed,
                retries_used=attempt + 1,
                field=field,
            )
    return CertifyResult(
        certified=False,
        dims=tuple(dims),
        r=r,
        mode=mode,
        seed=seed,
        retries_used=retries,
        field=field,
        reason="no sampled family spanned",
    )


def differential_image_rank(field, dims, r, seed):
    """Tangent-space dimension at a structured point, by explicit spans.

    Samples T with an invertible-diagonal [r]^3 block (sample_X_r), collects
    the top-left r x r corners of its slices along each leg, lifts those
    corner spans onto their legs inside the [r]^3 block, adds every
    coordinate outside the off-diagonal part of the block, and returns the
    dimension of the sum inside the full space. Equals prod(dims) exactly
    when the strong criterion holds generically.
    """
    from .subspaces import sample_X_r  # local import to avoid cycle at load

    dims = _validate_dims(dims)
    if len(dims) != 3:
        raise ValueError("differential evaluation is defined for order-3 tensors")
    if not 0 <= r <= min(dims):
        raise ValueError("r must satisfy 0 <= r <= min(dims)")
    prod = dims[0] * dims[1] * dims[2]
    if r == 0:
        return prod
    k = 3
    t = sample_X_r(field, dims, r, seed)
    blocks = []
    for leg in range(k):
        corners = []
        for idx in range(dims[leg]):
            sl = t.slice(leg, idx)
            corners.append(sl.data[:r, :r].reshape(-1))
        blocks.append(_lifted_block_rows(np.stack(corners).astype(np.int64), leg, r, k))
    stacked = np.concatenate(blocks, axis=0)
    off = _offdiagonal_flat_indices(r, k)
    restricted = np.ascontiguousarray(stacked[:, off])
    inside = _kernels.rank_destructive(restricted, field.modulus)
    # Everything outside the off-diagonal block is granted coordinate-wise.
    return (prod - (r**k - r)) + inside


@dataclass(frozen=True)
class GenericSubrankReport:
    """Upper bound, best certified lower bound, and the full probe log."""

    dims: tuple
    mode: str
    upper_bound: int
    certified_lower: int
    field: FieldSpec
    trials: tuple = dataclass_field(default_factory=tuple)

    def to_json_dict(self):
        return {
            "dims": list(self.dims),
            "mode": self.mode,
            "upper": self.upper_bound,
            "lower": self.certified_lower,
            "modulus": self.field.modulus,
            "trials": [t.to_json_dict() for t in self.trials],
        }


def generic_subrank_estimate(field, dims, mode="strong", base_seed=0, retries=5):
    """Search downward from the upper bound for the largest certifiable r.

    Probe number j (starting at the upper bound) uses seed
    base_seed + j*retries*k, so probes never share sampling seeds and any
    logged trial replays via certify_lower with its recorded seed.
    """
    dims = _validate_dims(dims)
    k = len(dims)
    upper = upper_bound_generic(dims)
    trials = []
    certified = 0
    for j, r in enumerate(range(upper, 0, -1)):
        probe_seed = base_seed + j * retries * k
        result = certify_lower(field, dims, r, mode=mode, seed=probe_seed, retries=retries)
        trials.append(result.trial())
        if result.certified:
            certified = r
            break
    return GenericSubrankReport(
        dims=tuple(dims),
        mode=mode,
        upper_bound=upper,
        certified_lower=certified,
        field=field,
        trials=tuple(trials),
    )


def certify_lower_from_witness(witness, dims):
    """Deterministic lower-bound certification from a verified cube witness.

    A verified witness for the cube spec [r,...,r; a,...,a] exhibits
    spanning subspaces of dimension a, so generic subspaces of any dimension
    >= a span as well (spanning is an open condition and supersets of a
    spanning family span). Hence Q(dims) >= r for generic tensors whenever
    n_i >= r and n_i - r >= a on every leg. Returns a CertifyResult; no
    sampling happens, so retries_used is 0.
    """
    dims = _validate_dims(dims)
    spec = witness.spec
    k = len(spec.legs)
    if len(dims) != k:
        raise ValueError("witness order does not match dims")
    ns = {n for n, _ in spec.legs}
    avals = {a for _, a in spec.legs}
    if len(ns) != 1 or len(avals) != 1:
        raise ValueError("witness must have a cube spec")
    if not witness.verified:
        raise ValueError("witness must be verified first")
    r = next(iter(ns))
    a = next(iter(avals))
    ok = all(n >= r and n - r >= a for n in dims)
    return CertifyResult(
        certified=ok,
        dims=tuple(dims),
        r=r,
        mode="witness",
        seed=0,
        retries_used=0,
        field=witness.field,
        immediate=ok,
        reason="" if ok else "dims too small for the witness dimensions",
    )
