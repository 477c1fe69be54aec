"""Permutation towers: finite homeomorphism groups of level sets and their limits.

The level-k homeomorphisms of a finite level set are exactly its permutations,
so the group at level k is symmetric of degree n_k = |M_k|.  A compatible
tower of such permutations is a finite-depth approximation to an element of
the projective-limit group; composition, inversion and uniform random lifting
all act levelwise.
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from .errors import (
    DomainMismatch,
    IncompatibleTower,
    LevelMismatch,
    PrecisionExceeded,
    UnequalFibers,
)
from .level_rings import PadicApprox, ResidueVector
from .manifolds import ClopenManifold, LevelSet, fiber_table, reduction_table
from .seeds import substream


class LevelPerm:
    """A bijection of a level set onto itself, stored as an explicit table."""

    def __init__(self, level: int, domain: LevelSet, mapping: Mapping[ResidueVector, ResidueVector]) -> None:
        if domain.level != level:
            raise LevelMismatch("domain must live at the permutation's level")
        mapping = dict(mapping)
        if set(mapping) != set(domain.points) or set(mapping.values()) != set(domain.points):
            raise ValueError("mapping must be a bijection of the level set onto itself")
        self.level = level
        self.domain = domain
        self.mapping = mapping

    def __call__(self, x: ResidueVector) -> ResidueVector:
        return self.mapping[x]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LevelPerm):
            return NotImplemented
        return self.level == other.level and self.domain == other.domain and self.mapping == other.mapping

    __hash__ = None

    def __repr__(self) -> str:
        return f"LevelPerm(level={self.level}, degree={len(self.mapping)})"

    def compose(self, other: "LevelPerm") -> "LevelPerm":
        """self after other."""
        if other.domain != self.domain:
            raise DomainMismatch("permutations must share their level set")
        return LevelPerm(self.level, self.domain, {x: self.mapping[y] for x, y in other.mapping.items()})

    def inverse(self) -> "LevelPerm":
        return LevelPerm(self.level, self.domain, {y: x for x, y in self.mapping.items()})

    def is_identity(self) -> bool:
        return all(x == y for x, y in self.mapping.items())

    @classmethod
    def identity(cls, level_set: LevelSet) -> "LevelPerm":
        return cls(level_set.level, level_set, {x: x for x in level_set.points})


def check_perm_tower_compatibility(levels: Sequence[LevelPerm]) -> None:
    """Verify reduce(sigma_l(x)) == sigma_k(reduce(x)) for all k <= l and x.

    Raises IncompatibleTower naming the violated law and a witness.
    """
    for l_idx, s_l in enumerate(levels, start=1):
        if s_l.level != l_idx:
            raise IncompatibleTower(f"expected a level-{l_idx} permutation, got level {s_l.level}")
        for k_idx in range(1, l_idx):
            s_k = levels[k_idx - 1]
            reduce_down = reduction_table(s_l.domain, k_idx)
            for x in s_l.domain.sorted_points():
                if reduce_down[s_l(x)] != s_k(reduce_down[x]):
                    raise IncompatibleTower(
                        "connecting law violated: reduce(sigma_l(x)) != sigma_k(reduce(x)) "
                        f"at levels l={l_idx}, k={k_idx}, x={x!r}"
                    )


class PermTower:
    """Levels 1..K of permutations of one manifold's level sets, validated at construction."""

    def __init__(self, manifold: ClopenManifold, levels: Sequence[LevelPerm]) -> None:
        levels = list(levels)
        if not levels:
            raise ValueError("a tower needs at least one level")
        for k, s in enumerate(levels, start=1):
            if s.domain != manifold.discretize(k):
                raise DomainMismatch(f"level-{k} permutation does not act on the manifold's level image")
        check_perm_tower_compatibility(levels)
        self.manifold = manifold
        self.levels = levels

    @property
    def depth(self) -> int:
        return len(self.levels)

    def __getitem__(self, k: int) -> LevelPerm:
        if not 1 <= k <= self.depth:
            raise LevelMismatch(f"tower has levels 1..{self.depth}, asked for {k}")
        return self.levels[k - 1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PermTower):
            return NotImplemented
        return self.manifold == other.manifold and self.levels == other.levels

    __hash__ = None

    def compose(self, other: "PermTower") -> "PermTower":
        if other.manifold != self.manifold or other.depth != self.depth:
            raise DomainMismatch("towers must share manifold and depth")
        return PermTower(
            self.manifold,
            [self.levels[i].compose(other.levels[i]) for i in range(self.depth)],
        )

    def inverse(self) -> "PermTower":
        return PermTower(self.manifold, [s.inverse() for s in self.levels])

    def __mul__(self, other: "PermTower") -> "PermTower":
        return self.compose(other)

    @classmethod
    def identity(cls, manifold: ClopenManifold, depth: int) -> "PermTower":
        return cls(manifold, [LevelPerm.identity(manifold.discretize(k)) for k in range(1, depth + 1)])


class BasedPermTower:
    """A permutation tower fixing the image of a marked base point at every level."""

    def __init__(self, tower: PermTower, base_point: tuple[PadicApprox, ...]) -> None:
        base_point = tuple(base_point)
        for k in range(1, tower.depth + 1):
            image = ResidueVector(tuple(c.project(k) for c in base_point))
            if tower[k](image) != image:
                raise ValueError(f"base point image is moved at level {k}")
        self.tower = tower
        self.base_point = base_point

    @property
    def depth(self) -> int:
        return self.tower.depth

    def compose(self, other: "BasedPermTower") -> "BasedPermTower":
        if other.base_point != self.base_point:
            raise DomainMismatch("based towers must share the base point")
        return BasedPermTower(self.tower.compose(other.tower), self.base_point)

    def inverse(self) -> "BasedPermTower":
        return BasedPermTower(self.tower.inverse(), self.base_point)


def random_lift(
    sigma: LevelPerm,
    manifold: ClopenManifold,
    l: int,
    seed: int,
) -> LevelPerm:
    """Lift a level-k permutation to a uniformly random compatible level-l one.

    Each fiber over x is mapped bijectively onto the fiber over sigma(x) by an
    independently shuffled assignment; one seed substream per fiber, keyed by
    the canonical position of x, so the result is independent of evaluation
    order.  Requires k >= max_i s_i so that all fibers have equal size.
    """
    k = sigma.level
    if l <= k:
        raise LevelMismatch(f"target level {l} must exceed source level {k}")
    if k < manifold.max_radius_exp:
        raise UnequalFibers(
            f"fibers over level {k} are unequal below the resolving level "
            f"{manifold.max_radius_exp}"
        )
    if l > manifold.precision:
        raise PrecisionExceeded(f"level {l} exceeds stored precision {manifold.precision}")
    fibers = fiber_table(manifold, k, l)
    mapping: dict[ResidueVector, ResidueVector] = {}
    for position, x in enumerate(sigma.domain.sorted_points()):
        source = fibers[x]
        target = list(fibers[sigma(x)])
        rng = substream(seed, "fiber", position)
        rng.shuffle(target)
        mapping.update(zip(source, target))
    return LevelPerm(l, manifold.discretize(l), mapping)


def random_perm_tower(manifold: ClopenManifold, depth: int, seed: int) -> PermTower:
    """A uniformly random compatible tower of the given depth."""
    points = manifold.discretize(1).sorted_points()
    shuffled = list(points)
    substream(seed, "level", 1).shuffle(shuffled)
    levels = [LevelPerm(1, manifold.discretize(1), dict(zip(points, shuffled)))]
    for k in range(2, depth + 1):
        levels.append(random_lift(levels[-1], manifold, k, substream(seed, "level", k).randrange(2**63)))
    return PermTower(manifold, levels)


def enumerate_level_perms(manifold: ClopenManifold, k: int) -> Iterator[LevelPerm]:
    """All permutations of the level-k image, in lexicographic table order."""
    level_set = manifold.discretize(k)
    points = level_set.sorted_points()
    for image in itertools.permutations(points):
        yield LevelPerm(k, level_set, dict(zip(points, image)))


def group_order(manifold: ClopenManifold, k: int) -> int:
    """Order n_k! of the full permutation group of the level-k image."""
    return math.factorial(len(manifold.discretize(k)))


def divisibility_report(manifold: ClopenManifold, k: int) -> dict:
    """Juxtapose the verified divisibility exponents with the literal one.

    verified_exponent is the largest b with p^b <= n_k, so (p^b)! divides
    n_k!.  card_exponent is the proven p-power dividing n_k itself.  The
    literal_exponent sums k + s_i over the balls (the face-value sign
    reading for radii p^-s); it generally overshoots what n_k admits, so it
    is only reported for comparison, never asserted.
    """
    p = manifold.prime.p
    n_k = len(manifold.discretize(k))
    b = 0
    while p ** (b + 1) <= n_k:
        b += 1
    return {
        "level": k,
        "cardinality": n_k,
        "group_order": math.factorial(n_k),
        "verified_exponent": b,
        "verified_divisor": math.factorial(p**b),
        "card_exponent": manifold.card_divisibility_exponent(k),
        "literal_exponent": sum(k + ball.radius_exp for ball in manifold.balls),
    }


def weak_distance(sigma: PermTower, tau: PermTower) -> Fraction:
    """First-disagreement ultrametric p^-j, j the least level where the towers differ.

    Equal towers are at distance 0; the value set {0} together with the
    powers p^-j makes this a genuine ultrametric generating the
    projective-limit topology at finite depth.
    """
    if sigma.manifold != tau.manifold or sigma.depth != tau.depth:
        raise DomainMismatch("towers must share manifold and depth")
    for k in range(1, sigma.depth + 1):
        if sigma[k] != tau[k]:
            return Fraction(1, sigma.manifold.prime.p**k)
    return Fraction(0)
