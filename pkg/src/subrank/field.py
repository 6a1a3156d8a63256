"""Prime-field configuration and deterministic seeded randomness.

All linear algebra in this package runs over GF(p) for a prime p that fits
comfortably in a machine word. Residues are plain Python ints (or int64
numpy entries) in the range [0, p). Elimination kernels rely on products of
two residues fitting in a signed 64-bit integer, hence the hard cap on the
modulus.
"""

from __future__ import annotations

from dataclasses import dataclass

# Mersenne prime 2^31 - 1. Large enough that a random determinant vanishes
# with probability ~5e-10, small enough that a*b fits in int64.
DEFAULT_MODULUS = 2147483647

# Kernels require p^2 < 2^63; keeping p <= 2^31 - 1 also enables the
# Mersenne fast path at the default modulus.
MAX_MODULUS = 2147483647

_MASK64 = (1 << 64) - 1


def is_prime(n):
    """Deterministic Miller-Rabin, exact for all n < 3.3e24.

    The witness set {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37} is known to
    have no strong pseudoprimes below that threshold, which covers every
    modulus this package accepts many times over.
    """
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n == q:
            return True
        if n % q == 0:
            return False
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """The field GF(modulus); modulus must be prime and at most 2^31 - 1."""

    modulus: int = DEFAULT_MODULUS

    def __post_init__(self):
        m = self.modulus
        if not isinstance(m, int):
            raise ValueError("modulus must be an int")
        if m < 2 or m > MAX_MODULUS:
            raise ValueError(f"modulus must lie in [2, {MAX_MODULUS}], got {m}")
        if not is_prime(m):
            raise ValueError(f"modulus {m} is not prime")

    def reduce(self, x):
        return x % self.modulus

    def add(self, a, b):
        return (a + b) % self.modulus

    def sub(self, a, b):
        return (a - b) % self.modulus

    def mul(self, a, b):
        return (a * b) % self.modulus

    def neg(self, a):
        return (-a) % self.modulus

    def inv(self, a):
        """Multiplicative inverse by extended Euclid; raises on 0."""
        a = a % self.modulus
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        # Invariant: r = s*a + t*p for each (r, s) pair tracked below.
        r0, r1 = self.modulus, a
        s0, s1 = 0, 1
        while r1:
            q = r0 // r1
            r0, r1 = r1, r0 - q * r1
            s0, s1 = s1, s0 - q * s1
        return s0 % self.modulus

    def __str__(self):
        return f"GF({self.modulus})"


class SeededStream:
    """SplitMix64 pseudo-random stream with rejection-sampled field draws.

    The generator is fixed by this implementation, not borrowed from numpy
    or the stdlib, so identical seeds produce identical residue sequences
    on every platform and library version. That stability is what makes
    certification reports reproducible artifacts.
    """

    def __init__(self, seed):
        self._state = seed & _MASK64

    def next_u64(self):
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def residue(self, field):
        """Uniform draw from [0, p). Rejection keeps the distribution exact."""
        p = field.modulus
        limit = ((1 << 64) // p) * p
        while True:
            u = self.next_u64()
            if u < limit:
                return u % p

    def nonzero_residue(self, field):
        while True:
            x = self.residue(field)
            if x:
                return x

    def residues(self, field, count):
        return [self.residue(field) for _ in range(count)]
