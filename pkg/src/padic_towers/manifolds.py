"""Clopen manifolds in Z_p^m as disjoint unions of balls, and their level images.

A ball of radius p^-s around a center c is the set of points agreeing with c
in the first s base-p digits of every coordinate.  Discretizing at level k
maps the manifold onto a finite subset of (Z/p^k)^m; the images at different
levels are connected by coordinatewise reduction.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .errors import LevelMismatch, LevelTooSmall, PointNotInManifold, PrecisionExceeded
from .level_rings import PadicApprox, Prime, ResidueVector


@dataclass(frozen=True)
class Ball:
    """A closed ball of radius p^-radius_exp around a truncated center."""

    center: tuple[PadicApprox, ...]
    radius_exp: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", tuple(self.center))
        if not self.center:
            raise ValueError("a ball needs at least one center coordinate")
        first = self.center[0]
        for c in self.center[1:]:
            if c.prime != first.prime:
                raise LevelMismatch("center coordinates must share the prime")
        if self.radius_exp < 0:
            raise ValueError("radius exponent must be >= 0 (radius <= 1)")
        if self.radius_exp > self.precision:
            raise ValueError(
                f"radius exponent {self.radius_exp} exceeds center precision {self.precision}"
            )

    @property
    def prime(self) -> Prime:
        return self.center[0].prime

    @property
    def dim(self) -> int:
        return len(self.center)

    @property
    def precision(self) -> int:
        return min(c.precision for c in self.center)

    def meets(self, other: "Ball") -> bool:
        """Whether the two balls intersect (ultrametric: iff one contains the other).

        Two balls of radii p^-s, p^-t intersect exactly when their centers
        agree modulo p^min(s,t) in every coordinate.
        """
        t = min(self.radius_exp, other.radius_exp)
        if t == 0:
            return True
        return all(
            a.project(t) == b.project(t) for a, b in zip(self.center, other.center)
        )

    def contains_residue(self, point: ResidueVector) -> bool:
        """Whether the level-k image of this ball contains ``point``.

        Membership only constrains the first min(radius_exp, k) digits.
        """
        t = min(self.radius_exp, point.level)
        if t == 0:
            return True
        return all(
            c.project(t) == e.reduce(t)
            for c, e in zip(self.center, point.entries)
        )

    def contains_approx(self, point: tuple[PadicApprox, ...]) -> bool:
        s = self.radius_exp
        if s == 0:
            return True
        return all(c.project(s) == x.project(s) for c, x in zip(self.center, point))


@dataclass(frozen=True)
class LevelSet:
    """The finite level-k image of a manifold inside (Z/p^k)^m."""

    prime: Prime
    dim: int
    level: int
    points: frozenset[ResidueVector]
    base_point_image: ResidueVector | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", frozenset(self.points))
        if self.base_point_image is not None and self.base_point_image not in self.points:
            raise ValueError("base point image must belong to the level set")

    def __len__(self) -> int:
        return len(self.points)

    def __contains__(self, point: ResidueVector) -> bool:
        return point in self.points

    def sorted_points(self) -> list[ResidueVector]:
        """Points in canonical (coordinate value) order, for deterministic iteration."""
        return sorted(self.points, key=lambda v: v.values())

    def reduce(self, k: int) -> "LevelSet":
        """Image under coordinatewise reduction to level k <= level."""
        if not 1 <= k <= self.level:
            raise LevelMismatch(f"cannot reduce level-{self.level} set to level {k}")
        base = None if self.base_point_image is None else self.base_point_image.reduce(k)
        return LevelSet(
            self.prime, self.dim, k, frozenset(x.reduce(k) for x in self.points), base
        )


def full_level_set(prime: Prime, dim: int, level: int) -> LevelSet:
    """The level image of the whole unit ball: all of (Z/p^level)^dim."""
    ranges = [range(prime.p**level)] * dim
    points = frozenset(
        ResidueVector.from_values(prime, level, values)
        for values in itertools.product(*ranges)
    )
    return LevelSet(prime, dim, level, points)


@dataclass(frozen=True)
class ClopenManifold:
    """A compact clopen subset of Z_p^m given as finitely many disjoint balls."""

    prime: Prime
    dim: int
    balls: tuple[Ball, ...]
    base_point: tuple[PadicApprox, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "balls", tuple(self.balls))
        if not self.balls:
            raise ValueError("a manifold needs at least one ball")
        for b in self.balls:
            if b.prime != self.prime:
                raise LevelMismatch("all balls must share the manifold's prime")
            if b.dim != self.dim:
                raise ValueError("all balls must share the manifold's dimension")
        for i, a in enumerate(self.balls):
            for b in self.balls[i + 1 :]:
                if a.meets(b):
                    raise ValueError(
                        f"balls overlap: centers agree modulo p^{min(a.radius_exp, b.radius_exp)}"
                    )
        if self.base_point is not None:
            object.__setattr__(self, "base_point", tuple(self.base_point))
            if len(self.base_point) != self.dim:
                raise ValueError("base point dimension does not match the manifold")
            if not any(b.contains_approx(self.base_point) for b in self.balls):
                raise ValueError("base point lies outside every ball")

    @classmethod
    def unit_ball(
        cls,
        prime: Prime,
        dim: int,
        precision: int,
        base_point: tuple[PadicApprox, ...] | None = None,
    ) -> "ClopenManifold":
        """The whole unit ball Z_p^dim, stored to the given digit precision."""
        center = tuple(PadicApprox.from_int(prime, 0, precision) for _ in range(dim))
        return cls(prime, dim, (Ball(center, 0),), base_point)

    @property
    def precision(self) -> int:
        return min(b.precision for b in self.balls)

    @property
    def max_radius_exp(self) -> int:
        return max(b.radius_exp for b in self.balls)

    @property
    def min_radius_exp(self) -> int:
        return min(b.radius_exp for b in self.balls)

    def discretize(self, k: int) -> LevelSet:
        """The level-k image: all residue vectors covered by the balls.

        Raises PrecisionExceeded when k exceeds the stored center precision.
        """
        if k < 1:
            raise LevelMismatch(f"level must be >= 1, got {k}")
        if k > self.precision:
            raise PrecisionExceeded(
                f"level {k} exceeds stored center precision {self.precision}"
            )
        return _discretize_cached(self, k)

    def cardinality(self, k: int) -> int:
        """Closed-form size of the level-k image: sum_i p^(m(k - s_i)).

        Only valid once every ball is resolved (k >= max_i s_i); below that
        the images of distinct balls may still coincide.
        """
        if k < self.max_radius_exp:
            raise LevelTooSmall(
                f"closed form needs level >= {self.max_radius_exp}, got {k}"
            )
        p = self.prime.p
        return sum(p ** (self.dim * (k - b.radius_exp)) for b in self.balls)

    def card_divisibility_exponent(self, k: int) -> int:
        """Verified exponent a with p^a dividing the level-k cardinality.

        Equals m * min_i(k - s_i); each ball contributes p^(m(k - s_i)) points.
        Returns the trivial bound 0 below the resolving level.
        """
        if k < self.max_radius_exp:
            return 0
        return self.dim * min(k - b.radius_exp for b in self.balls)

    def contains_residue(self, point: ResidueVector) -> bool:
        return any(b.contains_residue(point) for b in self.balls)

    def fiber(self, point: ResidueVector, l: int) -> frozenset[ResidueVector]:
        """All level-l points of the manifold reducing to ``point``.

        For k >= max_i s_i every fiber has exactly p^(m(l-k)) elements.
        """
        k = point.level
        if l <= k:
            raise LevelMismatch(f"target level {l} must exceed point level {k}")
        table = fiber_table(self, k, l)
        if point not in table:
            raise PointNotInManifold(f"{point!r} is not a level-{k} point of the manifold")
        return frozenset(table[point])


@lru_cache(maxsize=4096)
def fiber_table(manifold: ClopenManifold, k: int, l: int) -> dict[ResidueVector, tuple[ResidueVector, ...]]:
    """Fibers of the level-l image over the level-k image, in canonical order.

    Built in one pass over the level-l points; keys are exactly the level-k
    points by surjectivity of the connecting reduction.
    """
    buckets: dict[ResidueVector, list[ResidueVector]] = {}
    for x in manifold.discretize(l).points:
        buckets.setdefault(x.reduce(k), []).append(x)
    return {
        base: tuple(sorted(points, key=lambda v: v.values()))
        for base, points in buckets.items()
    }


@lru_cache(maxsize=8192)
def reduction_table(level_set: LevelSet, k: int) -> dict[ResidueVector, ResidueVector]:
    """Memoized coordinatewise reduction of every point of a level set."""
    return {x: x.reduce(k) for x in level_set.points}


@lru_cache(maxsize=4096)
def _discretize_cached(manifold: ClopenManifold, k: int) -> LevelSet:
    p = manifold.prime.p
    points: set[ResidueVector] = set()
    for ball in manifold.balls:
        t = min(ball.radius_exp, k)
        lift_count = p ** (k - t)
        step = p**t
        coord_choices = []
        for c in ball.center:
            prefix = c.project(t).value if t > 0 else 0
            coord_choices.append([prefix + step * i for i in range(lift_count)])
        for values in itertools.product(*coord_choices):
            points.add(ResidueVector.from_values(manifold.prime, k, values))
    base = None
    if manifold.base_point is not None:
        base = ResidueVector(tuple(c.project(k) for c in manifold.base_point))
    return LevelSet(manifold.prime, manifold.dim, k, frozenset(points), base)
