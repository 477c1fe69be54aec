"""Exact arithmetic in the finite level rings Z/p^k and truncated p-adic integers.

Level k of the tower is the quotient ring Z/p^kZ; ``reduce`` realizes the
connecting homomorphism from level l down to level k <= l.  A truncated
p-adic integer is a base-p digit string whose level projections automatically
form a compatible thread through the tower.  Everything is arbitrary-precision
integer arithmetic; no floating point is used anywhere.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import LevelMismatch, PrecisionExceeded


def is_prime(n: int) -> bool:
    """Trial-division primality test (desk-scale inputs only)."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


@dataclass(frozen=True)
class Prime:
    """A prime base, verified at construction."""

    p: int

    def __post_init__(self) -> None:
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    def __repr__(self) -> str:
        return f"Prime({self.p})"


@dataclass(frozen=True)
class Residue:
    """An element of Z/p^k, stored as its canonical representative in [0, p^k).

    Instances are immutable and hashable; arithmetic is exact and stays at the
    same (prime, level).
    """

    prime: Prime
    level: int
    value: int

    def __post_init__(self) -> None:
        if self.level < 1:
            raise ValueError(f"level must be >= 1, got {self.level}")
        if not 0 <= self.value < self.modulus:
            raise ValueError(
                f"value {self.value} outside [0, {self.prime.p}^{self.level})"
            )

    @property
    def modulus(self) -> int:
        return self.prime.p ** self.level

    def _require_same_ring(self, other: "Residue") -> None:
        if self.prime != other.prime or self.level != other.level:
            raise LevelMismatch(
                f"cannot combine residue at (p={self.prime.p}, k={self.level}) "
                f"with (p={other.prime.p}, k={other.level})"
            )

    def __add__(self, other: "Residue") -> "Residue":
        self._require_same_ring(other)
        return Residue(self.prime, self.level, (self.value + other.value) % self.modulus)

    def __sub__(self, other: "Residue") -> "Residue":
        self._require_same_ring(other)
        return Residue(self.prime, self.level, (self.value - other.value) % self.modulus)

    def __mul__(self, other: "Residue") -> "Residue":
        self._require_same_ring(other)
        return Residue(self.prime, self.level, (self.value * other.value) % self.modulus)

    def __neg__(self) -> "Residue":
        return Residue(self.prime, self.level, (-self.value) % self.modulus)

    def __pow__(self, exponent: int) -> "Residue":
        if exponent < 0:
            raise ValueError("negative exponents are not defined in Z/p^k")
        return Residue(self.prime, self.level, pow(self.value, exponent, self.modulus))

    def reduce(self, k: int) -> "Residue":
        """Apply the connecting homomorphism down to level k <= level."""
        if not 1 <= k <= self.level:
            raise LevelMismatch(
                f"cannot reduce level-{self.level} residue to level {k}"
            )
        return Residue(self.prime, k, self.value % self.prime.p**k)

    def digits(self) -> tuple[int, ...]:
        """Base-p digits d_0..d_{k-1} of the canonical representative."""
        p = self.prime.p
        out = []
        v = self.value
        for _ in range(self.level):
            out.append(v % p)
            v //= p
        return tuple(out)

    def to_approx(self) -> "PadicApprox":
        """View this residue as a truncated p-adic integer of matching precision."""
        return PadicApprox(self.prime, self.digits())

    def __repr__(self) -> str:
        return f"{self.value} mod {self.prime.p}^{self.level}"


def fiber_enumerate(a: Residue, l: int) -> frozenset[Residue]:
    """All level-l residues that reduce to ``a``: the fiber of the quotient map.

    The fiber has exactly p^(l-k) elements.
    """
    if l <= a.level:
        raise LevelMismatch(f"target level {l} must exceed source level {a.level}")
    p = a.prime.p
    step = p**a.level
    return frozenset(
        Residue(a.prime, l, a.value + step * i) for i in range(p ** (l - a.level))
    )


@dataclass(frozen=True)
class PadicApprox:
    """A p-adic integer known to K base-p digits (d_0 is the units digit).

    The level-k projections x_k = sum_{i<k} d_i p^i form a compatible thread:
    reducing the level-l projection to level k <= l recovers the level-k one.
    """

    prime: Prime
    digits: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "digits", tuple(self.digits))
        if len(self.digits) < 1:
            raise ValueError("at least one digit is required")
        p = self.prime.p
        for d in self.digits:
            if not 0 <= d < p:
                raise ValueError(f"digit {d} outside [0, {p})")

    @property
    def precision(self) -> int:
        return len(self.digits)

    @classmethod
    def from_int(cls, prime: Prime, n: int, precision: int) -> "PadicApprox":
        """Truncate the integer n to its first ``precision`` base-p digits."""
        if precision < 1:
            raise ValueError("precision must be >= 1")
        p = prime.p
        v = n % p**precision
        out = []
        for _ in range(precision):
            out.append(v % p)
            v //= p
        return cls(prime, tuple(out))

    def to_int(self) -> int:
        """Canonical integer representative in [0, p^precision)."""
        total = 0
        for d in reversed(self.digits):
            total = total * self.prime.p + d
        return total

    def project(self, k: int) -> Residue:
        """Project to the level-k ring element x_k = sum_{i<k} d_i p^i."""
        if k < 1:
            raise LevelMismatch(f"level must be >= 1, got {k}")
        if k > self.precision:
            raise PrecisionExceeded(
                f"level {k} exceeds stored precision {self.precision}"
            )
        total = 0
        for d in reversed(self.digits[:k]):
            total = total * self.prime.p + d
        return Residue(self.prime, k, total)

    def truncate(self, k: int) -> "PadicApprox":
        """Drop digits beyond the first k."""
        if not 1 <= k <= self.precision:
            raise PrecisionExceeded(
                f"cannot truncate precision-{self.precision} value to {k} digits"
            )
        return PadicApprox(self.prime, self.digits[:k])

    def __repr__(self) -> str:
        return f"PadicApprox(p={self.prime.p}, digits={list(self.digits)})"


@dataclass(frozen=True, eq=False)
class ResidueVector:
    """A point of (Z/p^k)^m: a nonempty tuple of residues at one (prime, level)."""

    entries: tuple[Residue, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))
        if not self.entries:
            raise ValueError("a residue vector needs at least one entry")
        first = self.entries[0]
        for e in self.entries[1:]:
            if e.prime != first.prime or e.level != first.level:
                raise LevelMismatch("vector entries must share prime and level")
        # points are dictionary keys everywhere; precompute the hash once
        key = (first.prime.p, first.level) + tuple(e.value for e in self.entries)
        object.__setattr__(self, "_key", key)
        object.__setattr__(self, "_hash", hash(key))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ResidueVector):
            return NotImplemented
        return self._key == other._key

    def __hash__(self) -> int:
        return self._hash

    @property
    def prime(self) -> Prime:
        return self.entries[0].prime

    @property
    def level(self) -> int:
        return self.entries[0].level

    @property
    def dim(self) -> int:
        return len(self.entries)

    @classmethod
    def from_values(cls, prime: Prime, level: int, values: tuple[int, ...] | list[int]) -> "ResidueVector":
        return cls(tuple(Residue(prime, level, v) for v in values))

    def values(self) -> tuple[int, ...]:
        return tuple(e.value for e in self.entries)

    def reduce(self, k: int) -> "ResidueVector":
        return ResidueVector(tuple(e.reduce(k) for e in self.entries))

    def to_approx(self) -> tuple[PadicApprox, ...]:
        return tuple(e.to_approx() for e in self.entries)

    def __lt__(self, other: "ResidueVector") -> bool:
        return self.values() < other.values()

    def __repr__(self) -> str:
        return f"{list(self.values())} mod {self.prime.p}^{self.level}"
