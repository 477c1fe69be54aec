"""p-adic completion of integer coordinate lattices, and the quotient characters.

Countably-indexed lattices are represented by finite-support vectors over
integer index labels.  Reduction modulo p^s is the character map; a Cauchy
sequence of integer vectors has a well-defined coordinatewise limit at
precision s, and every truncated vector lifts back to an integer one, which
is exactly the density of the integer lattice in its completion.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .errors import LevelMismatch, NotCauchy, OrderUndefined
from .level_rings import Prime, Residue


@dataclass(frozen=True)
class IntVector:
    """A finite-support integer vector over integer index labels."""

    entries: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        cleaned = tuple(sorted((i, v) for i, v in self.entries if v != 0))
        object.__setattr__(self, "entries", cleaned)
        labels = [i for i, _ in cleaned]
        if len(labels) != len(set(labels)):
            raise ValueError("duplicate index label")

    @classmethod
    def from_dict(cls, entries: Mapping[int, int]) -> "IntVector":
        return cls(tuple(entries.items()))

    @classmethod
    def zero(cls) -> "IntVector":
        return cls(())

    def entry(self, label: int) -> int:
        for i, v in self.entries:
            if i == label:
                return v
        return 0

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.entries)

    def __add__(self, other: "IntVector") -> "IntVector":
        merged = dict(self.entries)
        for i, v in other.entries:
            merged[i] = merged.get(i, 0) + v
        return IntVector.from_dict(merged)

    def __neg__(self) -> "IntVector":
        return IntVector(tuple((i, -v) for i, v in self.entries))

    def __sub__(self, other: "IntVector") -> "IntVector":
        return self + (-other)

    def scale(self, factor: int) -> "IntVector":
        return IntVector(tuple((i, factor * v) for i, v in self.entries))


@dataclass(frozen=True)
class PadicVector:
    """A finite-support vector of nonzero residues mod p^s over integer labels."""

    prime: Prime
    precision: int
    entries: tuple[tuple[int, Residue], ...]

    def __post_init__(self) -> None:
        cleaned = tuple(sorted(((i, r) for i, r in self.entries if r.value != 0), key=lambda e: e[0]))
        object.__setattr__(self, "entries", cleaned)
        labels = [i for i, _ in cleaned]
        if len(labels) != len(set(labels)):
            raise ValueError("duplicate index label")
        for _, r in cleaned:
            if r.prime != self.prime or r.level != self.precision:
                raise LevelMismatch("entries must be residues at the vector's prime and precision")

    @classmethod
    def from_ints(cls, prime: Prime, precision: int, entries: Mapping[int, int]) -> "PadicVector":
        modulus = prime.p**precision
        return cls(
            prime,
            precision,
            tuple((i, Residue(prime, precision, v % modulus)) for i, v in entries.items()),
        )

    @classmethod
    def zero(cls, prime: Prime, precision: int) -> "PadicVector":
        return cls(prime, precision, ())

    def entry(self, label: int) -> Residue:
        for i, r in self.entries:
            if i == label:
                return r
        return Residue(self.prime, self.precision, 0)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.entries)

    def _require_same_space(self, other: "PadicVector") -> None:
        if other.prime != self.prime or other.precision != self.precision:
            raise LevelMismatch("vectors must share prime and precision")

    def __add__(self, other: "PadicVector") -> "PadicVector":
        self._require_same_space(other)
        merged = {i: r for i, r in self.entries}
        for i, r in other.entries:
            merged[i] = merged[i] + r if i in merged else r
        return PadicVector(self.prime, self.precision, tuple(merged.items()))

    def __neg__(self) -> "PadicVector":
        return PadicVector(self.prime, self.precision, tuple((i, -r) for i, r in self.entries))

    def __sub__(self, other: "PadicVector") -> "PadicVector":
        return self + (-other)


def character(x: IntVector, prime: Prime, s: int) -> PadicVector:
    """Coordinatewise quotient homomorphism onto residues mod p^s."""
    return PadicVector.from_ints(prime, s, dict(x.entries))


def complete(seq: Sequence[IntVector], prime: Prime, s: int) -> PadicVector:
    """Coordinatewise limit mod p^s of a Cauchy sequence of integer vectors.

    Stabilization must be witnessed inside the provided data: in every
    coordinate the final two entries (all entries, for one-element sequences)
    agree mod p^s, and the stabilized residue is the limit.  Otherwise
    NotCauchy is raised naming the offending coordinate.
    """
    if not seq:
        raise ValueError("cannot complete an empty sequence")
    modulus = prime.p**s
    labels = sorted({i for vec in seq for i in vec.support})
    limit: dict[int, int] = {}
    for label in labels:
        residues = [vec.entry(label) % modulus for vec in seq]
        final = residues[-1]
        if len(residues) >= 2 and residues[-2] != final:
            raise NotCauchy(
                f"coordinate {label} never stabilizes mod {prime.p}^{s}: "
                f"tail entries {residues[-2]} != {final}"
            )
        limit[label] = final
    return PadicVector.from_ints(prime, s, limit)


def density_witness(target: PadicVector) -> IntVector:
    """An integer vector congruent to the target: canonical representatives."""
    return IntVector(tuple((i, r.value) for i, r in target.entries))


VectorLike = Union[IntVector, PadicVector]


def baire_distance(x: VectorLike, y: VectorLike, prime: Prime | None = None) -> Fraction:
    """Ultrametric p^-j, j the least index label at which the vectors differ.

    Labels are read as the fixed enumeration of coordinates, so they must be
    positive integers; the distance of equal vectors is 0.
    """
    if type(x) is not type(y):
        raise LevelMismatch("cannot compare vectors of different kinds")
    if isinstance(x, PadicVector) and isinstance(y, PadicVector):
        x._require_same_space(y)
        if prime is None:
            prime = x.prime
        elif prime != x.prime:
            raise LevelMismatch("explicit prime disagrees with the vectors")
    elif prime is None:
        raise OrderUndefined("integer vectors need a prime for the distance base")
    labels = set(x.support) | set(y.support)
    for label in labels:
        if not isinstance(label, int) or isinstance(label, bool) or label < 1:
            raise OrderUndefined(
                f"label {label!r} is not a positive integer coordinate index"
            )
    for label in sorted(labels):
        if x.entry(label) != y.entry(label):
            return Fraction(1, prime.p**label)
    return Fraction(0)
