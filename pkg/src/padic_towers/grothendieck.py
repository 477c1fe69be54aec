"""Grothendieck group of the level loop monoids.

Because the monoid of value multisets is free commutative on the nonzero
codomain values, its group of formal differences is free abelian on the same
values; elements are stored directly as signed multiplicity vectors, which
makes equality and arithmetic exact and canonical.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .errors import LevelMismatch, NotHomomorphism
from .level_rings import ResidueVector
from .loop_monoids import CodomainTower, LevelCodomain, LevelLoopClass


@dataclass(frozen=True)
class GrothElem:
    """A formal difference of classes: signed multiplicities of nonzero values."""

    codomain: LevelCodomain
    coords: tuple[tuple[ResidueVector, int], ...]

    def __post_init__(self) -> None:
        cleaned = tuple(
            sorted(
                ((v, c) for v, c in self.coords if c != 0),
                key=lambda item: item[0].values(),
            )
        )
        object.__setattr__(self, "coords", cleaned)
        seen = set()
        for v, _ in cleaned:
            if v in seen:
                raise ValueError(f"duplicate coordinate {v!r}")
            seen.add(v)
            if v == self.codomain.zero or v not in self.codomain.values.points:
                raise ValueError(f"{v!r} is not a nonzero codomain value")

    @property
    def level(self) -> int:
        return self.codomain.level

    @classmethod
    def from_dict(cls, codomain: LevelCodomain, coords: Mapping[ResidueVector, int]) -> "GrothElem":
        return cls(codomain, tuple(coords.items()))

    @classmethod
    def zero(cls, codomain: LevelCodomain) -> "GrothElem":
        return cls(codomain, ())

    def coord(self, value: ResidueVector) -> int:
        for v, c in self.coords:
            if v == value:
                return c
        return 0

    def as_dict(self) -> dict[ResidueVector, int]:
        return dict(self.coords)

    def is_zero(self) -> bool:
        return not self.coords

    def _require_same_group(self, other: "GrothElem") -> None:
        if other.codomain != self.codomain:
            raise LevelMismatch("elements must share level and codomain")

    def __add__(self, other: "GrothElem") -> "GrothElem":
        self._require_same_group(other)
        merged = self.as_dict()
        for v, c in other.coords:
            merged[v] = merged.get(v, 0) + c
        return GrothElem.from_dict(self.codomain, merged)

    def __neg__(self) -> "GrothElem":
        return GrothElem(self.codomain, tuple((v, -c) for v, c in self.coords))

    def __sub__(self, other: "GrothElem") -> "GrothElem":
        return self + (-other)


def embed(cls: LevelLoopClass) -> GrothElem:
    """The canonical monoid embedding: multiplicities become coordinates."""
    return GrothElem.from_dict(cls.codomain, cls.multiplicities())


def positive_negative_parts(x: GrothElem) -> tuple[LevelLoopClass, LevelLoopClass]:
    """Write x as embed(a) - embed(b) with disjointly supported classes."""
    pos = []
    neg = []
    for v, c in x.coords:
        (pos if c > 0 else neg).extend([v] * abs(c))
    return (
        LevelLoopClass(x.codomain, tuple(pos)),
        LevelLoopClass(x.codomain, tuple(neg)),
    )


def free_rank(codomain: LevelCodomain) -> int:
    """Rank of the constructed free abelian group: the number of nonzero values."""
    return len(codomain.nonzero_values())


def universal_extend(
    h: Callable[[LevelLoopClass], int],
    codomain: LevelCodomain,
    samples: Iterable[LevelLoopClass] = (),
) -> Callable[[GrothElem], int]:
    """Extend a monoid homomorphism on classes to the group of differences.

    Additivity of ``h`` is verified on the generating set (all singletons and
    their pairwise wedges) and on any extra ``samples``; the extension is
    the unique group homomorphism agreeing with ``h`` through ``embed``.
    """
    unit = LevelLoopClass.unit(codomain)
    if h(unit) != 0:
        raise NotHomomorphism(f"h(unit) = {h(unit)}, expected 0")
    generators = codomain.nonzero_values()
    gen_value = {}
    singletons = {v: LevelLoopClass(codomain, (v,)) for v in generators}
    for v in generators:
        gen_value[v] = h(singletons[v])
    for v in generators:
        for w in generators:
            wedge = singletons[v].wedge(singletons[w])
            if h(wedge) != gen_value[v] + gen_value[w]:
                raise NotHomomorphism(
                    f"h({v!r} v {w!r}) = {h(wedge)} != {gen_value[v]} + {gen_value[w]}"
                )
    for cls in samples:
        expected = sum(gen_value[v] * c for v, c in cls.multiplicities().items())
        if h(cls) != expected:
            raise NotHomomorphism(f"h({cls!r}) = {h(cls)} != {expected}")

    def extension(x: GrothElem) -> int:
        if x.codomain != codomain:
            raise LevelMismatch("element does not belong to this group")
        return sum(gen_value[v] * c for v, c in x.coords)

    return extension


def connecting_hom(x: GrothElem, k: int, tower: CodomainTower) -> GrothElem:
    """Group homomorphism induced by the connecting map on classes.

    Coordinates whose values collide after reduction are summed; values that
    reduce to zero are dropped, matching the deletion on classes.
    """
    l = x.level
    if not 1 <= k <= l:
        raise LevelMismatch(f"cannot connect level {l} down to level {k}")
    if l > tower.depth or tower[l] != x.codomain:
        raise LevelMismatch("element codomain does not match the tower")
    target = tower[k]
    merged: dict[ResidueVector, int] = {}
    for v, c in x.coords:
        w = v.reduce(k)
        if w == target.zero:
            continue
        merged[w] = merged.get(w, 0) + c
    return GrothElem.from_dict(target, merged)
