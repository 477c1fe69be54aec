"""Finite-level loop monoids: based finite-support maps modulo based bijections.

A based map from a countable pointed domain into a level codomain is
determined, up to based bijections of the domain, by the multiset of its
nonzero values.  That multiset is the canonical form; wedge composition is
multiset union, which is commutative, associative, unital and cancellative.
Connecting maps push value multisets down the codomain tower, deleting the
values that become zero.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import (
    BasePointMoved,
    InfiniteSupport,
    LevelMismatch,
    TooLarge,
)
from .level_rings import Prime, ResidueVector
from .manifolds import ClopenManifold, LevelSet, full_level_set

DEFAULT_SUPPORT_BOUND = 10_000
DEFAULT_ENUMERATION_BOUND = 100_000


@dataclass(frozen=True)
class LevelCodomain:
    """A level set of codomain values with a distinguished zero."""

    values: LevelSet
    zero: ResidueVector

    def __post_init__(self) -> None:
        if self.zero not in self.values.points:
            raise ValueError("the distinguished zero must belong to the value set")

    @property
    def level(self) -> int:
        return self.values.level

    @property
    def prime(self) -> Prime:
        return self.values.prime

    def nonzero_values(self) -> list[ResidueVector]:
        return [v for v in self.values.sorted_points() if v != self.zero]

    @classmethod
    def from_ring(cls, prime: Prime, level: int, dim: int = 1) -> "LevelCodomain":
        """The full level ring (Z/p^level)^dim with zero as the base value."""
        values = full_level_set(prime, dim, level)
        return cls(values, ResidueVector.from_values(prime, level, (0,) * dim))


class CodomainTower:
    """Levels 1..K of codomains linked by coordinatewise reduction."""

    def __init__(self, levels: Sequence[LevelCodomain]) -> None:
        levels = list(levels)
        if not levels:
            raise ValueError("a codomain tower needs at least one level")
        for k, c in enumerate(levels, start=1):
            if c.level != k:
                raise LevelMismatch(f"expected a level-{k} codomain, got level {c.level}")
        for l_idx in range(2, len(levels) + 1):
            for k_idx in range(1, l_idx):
                upper, lower = levels[l_idx - 1], levels[k_idx - 1]
                if upper.zero.reduce(k_idx) != lower.zero:
                    raise LevelMismatch(f"zero thread broken between levels {l_idx} and {k_idx}")
                reduced = {v.reduce(k_idx) for v in upper.values.points}
                if reduced != set(lower.values.points):
                    raise LevelMismatch(
                        f"values at level {l_idx} do not reduce onto values at level {k_idx}"
                    )
        self.levels = levels

    @property
    def depth(self) -> int:
        return len(self.levels)

    def __getitem__(self, k: int) -> LevelCodomain:
        if not 1 <= k <= self.depth:
            raise LevelMismatch(f"tower has levels 1..{self.depth}, asked for {k}")
        return self.levels[k - 1]

    @classmethod
    def from_ring(cls, prime: Prime, depth: int, dim: int = 1) -> "CodomainTower":
        return cls([LevelCodomain.from_ring(prime, k, dim) for k in range(1, depth + 1)])

    @classmethod
    def from_manifold(cls, manifold: ClopenManifold, depth: int) -> "CodomainTower":
        """Codomains from a manifold with a marked base point as the zero."""
        if manifold.base_point is None:
            raise ValueError("the codomain manifold needs a base point for the zero value")
        levels = []
        for k in range(1, depth + 1):
            level_set = manifold.discretize(k)
            levels.append(LevelCodomain(level_set, level_set.base_point_image))
        return cls(levels)


@dataclass(frozen=True)
class LevelLoopClass:
    """Canonical form of a based finite-support map: its multiset of nonzero values."""

    codomain: LevelCodomain
    values: tuple[ResidueVector, ...]

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.values, key=lambda v: v.values()))
        object.__setattr__(self, "values", ordered)
        for v in ordered:
            if v == self.codomain.zero:
                raise ValueError("canonical multisets never contain the zero value")
            if v not in self.codomain.values.points:
                raise ValueError(f"{v!r} is not a codomain value")

    @property
    def level(self) -> int:
        return self.codomain.level

    @property
    def support_size(self) -> int:
        return len(self.values)

    def multiplicities(self) -> dict[ResidueVector, int]:
        out: dict[ResidueVector, int] = {}
        for v in self.values:
            out[v] = out.get(v, 0) + 1
        return out

    def is_unit(self) -> bool:
        return not self.values

    def wedge(self, other: "LevelLoopClass") -> "LevelLoopClass":
        if other.codomain != self.codomain:
            raise LevelMismatch("classes must share level and codomain")
        return LevelLoopClass(self.codomain, self.values + other.values)

    @classmethod
    def unit(cls, codomain: LevelCodomain) -> "LevelLoopClass":
        return cls(codomain, ())

    def __repr__(self) -> str:
        return f"LoopClass({[list(v.values()) for v in self.values]})"


def canonicalize(
    assignments: Mapping[Hashable, ResidueVector] | Iterable[tuple[Hashable, ResidueVector]],
    codomain: LevelCodomain,
    basepoint_label: Hashable,
    max_support: int = DEFAULT_SUPPORT_BOUND,
) -> LevelLoopClass:
    """Canonical form of a based map given by its (label, value) assignments.

    Labels other than listed ones are implicitly sent to zero.  The base
    point must map to zero; more than ``max_support`` nonzero values raises
    InfiniteSupport (the support of a loop representative is finite).
    """
    if isinstance(assignments, Mapping):
        items: Iterable[tuple[Hashable, ResidueVector]] = assignments.items()
    else:
        items = assignments
    seen: set[Hashable] = set()
    support: list[ResidueVector] = []
    for label, value in items:
        if label in seen:
            raise ValueError(f"label {label!r} assigned twice")
        seen.add(label)
        if value == codomain.zero:
            continue
        if label == basepoint_label:
            raise BasePointMoved(f"base point {label!r} maps to {value!r}, not zero")
        support.append(value)
        if len(support) > max_support:
            raise InfiniteSupport(f"support exceeds the bound {max_support}")
    return LevelLoopClass(codomain, tuple(support))


def wedge_compose(a: LevelLoopClass, b: LevelLoopClass) -> LevelLoopClass:
    """Multiset union of the two classes (the wedge of representatives)."""
    return a.wedge(b)


def connecting(cls_l: LevelLoopClass, k: int, tower: CodomainTower) -> LevelLoopClass:
    """Push a level-l class down to level k: reduce values, delete new zeros."""
    l = cls_l.level
    if not 1 <= k <= l:
        raise LevelMismatch(f"cannot connect level {l} down to level {k}")
    if l > tower.depth or tower[l] != cls_l.codomain:
        raise LevelMismatch("class codomain does not match the tower")
    target = tower[k]
    kept = tuple(w for w in (v.reduce(k) for v in cls_l.values) if w != target.zero)
    return LevelLoopClass(target, kept)


def class_count(n_values: int, max_support: int) -> int:
    """Number of value multisets of size <= max_support over n_values - 1 nonzero values."""
    nonzero = n_values - 1
    total = 0
    for j in range(max_support + 1):
        if j == 0:
            total += 1
        elif nonzero == 0:
            break
        else:
            total += math.comb(nonzero + j - 1, j)
    return total


def enumerate_classes(
    domain_size: int,
    codomain: LevelCodomain,
    max_support: int,
    bound: int = DEFAULT_ENUMERATION_BOUND,
) -> list[LevelLoopClass]:
    """All classes reachable from a based domain of the given size.

    A domain with ``domain_size`` labels (one of them the base point) yields
    supports of size at most domain_size - 1.
    """
    if domain_size < 1:
        raise ValueError("the domain contains at least the base point")
    effective = min(domain_size - 1, max_support)
    nonzero = codomain.nonzero_values()
    expected = class_count(len(nonzero) + 1, effective)
    if expected > bound:
        raise TooLarge(f"enumeration of {expected} classes exceeds the bound {bound}")
    out = []
    for j in range(effective + 1):
        for combo in itertools.combinations_with_replacement(nonzero, j):
            out.append(LevelLoopClass(codomain, combo))
    return out


class LoopClassTower:
    """Levels k0..K of classes coherent under the connecting maps."""

    def __init__(
        self,
        tower: CodomainTower,
        classes: Sequence[LevelLoopClass],
        start_level: int = 1,
    ) -> None:
        classes = list(classes)
        if not classes:
            raise ValueError("a class tower needs at least one level")
        self.start_level = start_level
        for offset, c in enumerate(classes):
            k = start_level + offset
            if c.level != k or tower[k] != c.codomain:
                raise LevelMismatch(f"expected the level-{k} codomain at position {offset}")
        top = classes[-1]
        for offset, c in enumerate(classes[:-1]):
            k = start_level + offset
            if connecting(top, k, tower) != c:
                raise LevelMismatch(f"class at level {k} is not the connection of the top class")
        self.tower = tower
        self.classes = classes

    @property
    def depth(self) -> int:
        return self.start_level + len(self.classes) - 1

    def __getitem__(self, k: int) -> LevelLoopClass:
        if not self.start_level <= k <= self.depth:
            raise LevelMismatch(
                f"tower has levels {self.start_level}..{self.depth}, asked for {k}"
            )
        return self.classes[k - self.start_level]

    @classmethod
    def from_top(
        cls,
        top: LevelLoopClass,
        tower: CodomainTower,
        start_level: int = 1,
    ) -> "LoopClassTower":
        levels = [connecting(top, k, tower) for k in range(start_level, top.level)]
        levels.append(top)
        return cls(tower, levels, start_level)

    def wedge(self, other: "LoopClassTower") -> "LoopClassTower":
        if other.tower is not self.tower and other.tower.levels != self.tower.levels:
            raise LevelMismatch("towers must share the codomain tower")
        if other.start_level != self.start_level or other.depth != self.depth:
            raise LevelMismatch("towers must cover the same levels")
        return LoopClassTower(
            self.tower,
            [a.wedge(b) for a, b in zip(self.classes, other.classes)],
            self.start_level,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LoopClassTower):
            return NotImplemented
        return self.start_level == other.start_level and self.classes == other.classes

    __hash__ = None
