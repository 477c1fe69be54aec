"""Compatible towers of maps between level sets.

A map tower is a family f_k : M_k -> N_k (k = 1..K) commuting with the
connecting reductions; it is the computable surrogate for a continuous map
between the manifolds.  Towers arise by projecting point oracles, by
projecting polynomials with unit-ball coefficients, or by composing other
towers.  The module also computes binomial-basis (finite-difference)
expansions of integer-valued functions and evaluates them exactly.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .errors import (
    DomainMismatch,
    IncompatibleTower,
    LevelMismatch,
    NotLevelCompatible,
    PrecisionExceeded,
)
from .level_rings import PadicApprox, Prime, ResidueVector
from .manifolds import ClopenManifold, LevelSet, fiber_table, full_level_set, reduction_table

PointOracle = Callable[[tuple[PadicApprox, ...]], tuple[PadicApprox, ...]]


class LevelMap:
    """A total map between two level sets, stored as an explicit table."""

    def __init__(
        self,
        level: int,
        domain: LevelSet,
        codomain: LevelSet,
        table: Mapping[ResidueVector, ResidueVector],
    ) -> None:
        if domain.level != level or codomain.level != level:
            raise LevelMismatch("domain and codomain must live at the map's level")
        table = dict(table)
        if set(table) != set(domain.points):
            raise ValueError("table must be total on the domain")
        for x, y in table.items():
            if y not in codomain.points:
                raise ValueError(f"image {y!r} of {x!r} lies outside the codomain")
        self.level = level
        self.domain = domain
        self.codomain = codomain
        self.table = table

    def __call__(self, x: ResidueVector) -> ResidueVector:
        return self.table[x]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LevelMap):
            return NotImplemented
        return (
            self.level == other.level
            and self.domain == other.domain
            and self.codomain == other.codomain
            and self.table == other.table
        )

    __hash__ = None  # mutable table; identity hashing would be misleading

    def __repr__(self) -> str:
        return f"LevelMap(level={self.level}, size={len(self.table)})"

    def compose(self, other: "LevelMap") -> "LevelMap":
        """self after other; other's codomain must be self's domain."""
        if other.codomain != self.domain:
            raise DomainMismatch("codomain of inner map must equal domain of outer map")
        return LevelMap(
            self.level,
            other.domain,
            self.codomain,
            {x: self.table[y] for x, y in other.table.items()},
        )

    @classmethod
    def identity(cls, level_set: LevelSet) -> "LevelMap":
        return cls(level_set.level, level_set, level_set, {x: x for x in level_set.points})

    def to_json_dict(self) -> dict:
        """JSON form {level, domain: [...], table: [[x, fx], ...]} in canonical order."""
        return {
            "level": self.level,
            "domain": [list(x.values()) for x in self.domain.sorted_points()],
            "table": [
                [list(x.values()), list(self.table[x].values())]
                for x in self.domain.sorted_points()
            ],
        }


def check_tower_compatibility(levels: Sequence[LevelMap]) -> None:
    """Verify the connecting law for a family of level maps indexed 1..K.

    Raises IncompatibleTower naming the violated law and a witness point.
    """
    for l_idx, f_l in enumerate(levels, start=1):
        if f_l.level != l_idx:
            raise IncompatibleTower(f"expected a level-{l_idx} map, got level {f_l.level}")
        for k_idx in range(1, l_idx):
            f_k = levels[k_idx - 1]
            red_dom = reduction_table(f_l.domain, k_idx)
            red_cod = reduction_table(f_l.codomain, k_idx)
            for x in f_l.domain.sorted_points():
                if red_cod[f_l(x)] != f_k(red_dom[x]):
                    raise IncompatibleTower(
                        "connecting law violated: reduce(f_l(x)) != f_k(reduce(x)) "
                        f"at levels l={l_idx}, k={k_idx}, x={x!r}"
                    )


class MapTower:
    """Levels 1..K of maps over a fixed pair of manifolds, validated at construction."""

    def __init__(
        self,
        domain_manifold: ClopenManifold,
        codomain_manifold: ClopenManifold,
        levels: Sequence[LevelMap],
    ) -> None:
        levels = list(levels)
        if not levels:
            raise ValueError("a tower needs at least one level")
        for k, f in enumerate(levels, start=1):
            if f.domain != domain_manifold.discretize(k):
                raise DomainMismatch(f"level-{k} domain is not the manifold's level image")
            if f.codomain != codomain_manifold.discretize(k):
                raise DomainMismatch(f"level-{k} codomain is not the manifold's level image")
        check_tower_compatibility(levels)
        self.domain_manifold = domain_manifold
        self.codomain_manifold = codomain_manifold
        self.levels = levels

    @property
    def depth(self) -> int:
        return len(self.levels)

    def __getitem__(self, k: int) -> LevelMap:
        if not 1 <= k <= self.depth:
            raise LevelMismatch(f"tower has levels 1..{self.depth}, asked for {k}")
        return self.levels[k - 1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MapTower):
            return NotImplemented
        return (
            self.domain_manifold == other.domain_manifold
            and self.codomain_manifold == other.codomain_manifold
            and self.levels == other.levels
        )

    __hash__ = None

    def compose(self, other: "MapTower") -> "MapTower":
        """Levelwise composition self_k after other_k."""
        if other.codomain_manifold != self.domain_manifold:
            raise DomainMismatch("inner tower's codomain manifold must match outer domain")
        if other.depth != self.depth:
            raise DomainMismatch("towers must have equal depth")
        return MapTower(
            other.domain_manifold,
            self.codomain_manifold,
            [self.levels[i].compose(other.levels[i]) for i in range(self.depth)],
        )

    @classmethod
    def identity(cls, manifold: ClopenManifold, depth: int) -> "MapTower":
        return cls(
            manifold,
            manifold,
            [LevelMap.identity(manifold.discretize(k)) for k in range(1, depth + 1)],
        )

    @classmethod
    def from_oracle(
        cls,
        oracle: PointOracle,
        domain: ClopenManifold,
        codomain: ClopenManifold,
        depth: int,
    ) -> "MapTower":
        return cls(
            domain,
            codomain,
            [project_function(oracle, domain, codomain, k) for k in range(1, depth + 1)],
        )

    @classmethod
    def random(
        cls,
        domain: ClopenManifold,
        codomain: ClopenManifold,
        depth: int,
        rng: random.Random,
    ) -> "MapTower":
        """A uniformly random compatible tower, built by lifting level by level."""
        n_points = codomain.discretize(1).sorted_points()
        table = {x: rng.choice(n_points) for x in domain.discretize(1).sorted_points()}
        levels = [LevelMap(1, domain.discretize(1), codomain.discretize(1), table)]
        for k in range(2, depth + 1):
            prev = levels[-1]
            fibers = fiber_table(codomain, k - 1, k)
            reduce_down = reduction_table(domain.discretize(k), k - 1)
            table = {
                x: rng.choice(fibers[prev(reduce_down[x])])
                for x in domain.discretize(k).sorted_points()
            }
            levels.append(LevelMap(k, domain.discretize(k), codomain.discretize(k), table))
        return cls(domain, codomain, levels)

    def as_oracle(self) -> PointOracle:
        """The top level viewed as a point oracle at the tower's depth."""
        top = self.levels[-1]
        depth = self.depth

        def oracle(point: tuple[PadicApprox, ...]) -> tuple[PadicApprox, ...]:
            x = ResidueVector(tuple(c.project(depth) for c in point))
            return top(x).to_approx()

        return oracle


def project_function(
    oracle: PointOracle,
    domain: ClopenManifold,
    codomain: ClopenManifold,
    k: int,
) -> LevelMap:
    """Project a point oracle to its level-k table x(k) |-> f(x)(k).

    Every residue of the domain at its stored precision is sampled; if two
    points of one level-k fiber land in different level-k codomain residues
    the projection is not well defined and NotLevelCompatible is raised.
    """
    if k > domain.precision:
        raise PrecisionExceeded(
            f"level {k} exceeds domain precision {domain.precision}"
        )
    dom_k = domain.discretize(k)
    cod_k = codomain.discretize(k)
    top = domain.discretize(domain.precision)
    reduce_down = reduction_table(top, k)
    table: dict[ResidueVector, ResidueVector] = {}
    sources: dict[ResidueVector, ResidueVector] = {}
    for x in top.sorted_points():
        image = tuple(oracle(x.to_approx()))
        if any(c.precision < k for c in image):
            raise PrecisionExceeded(f"oracle output has fewer than {k} digits")
        y_k = ResidueVector(tuple(c.project(k) for c in image))
        x_k = reduce_down[x]
        if x_k in table:
            if table[x_k] != y_k:
                raise NotLevelCompatible(
                    f"fiber over {x_k!r} maps to both {table[x_k]!r} (from "
                    f"{sources[x_k]!r}) and {y_k!r} (from {x!r})"
                )
        else:
            table[x_k] = y_k
            sources[x_k] = x
    return LevelMap(k, dom_k, cod_k, table)


def project_polynomial(
    coefficients: Sequence[PadicApprox],
    domain: ClopenManifold,
    k: int,
) -> LevelMap:
    """Level-k table of the polynomial sum_i a_i x^i with unit-ball coefficients.

    The value modulo p^k depends only on x modulo p^k, so the table is built
    directly on level-k residues; the codomain is the full level ring.
    """
    if domain.dim != 1:
        raise DomainMismatch("polynomial projection is defined for one-dimensional domains")
    if not coefficients:
        raise ValueError("at least one coefficient is required")
    prime = domain.prime
    for c in coefficients:
        if c.prime != prime:
            raise LevelMismatch("coefficient prime does not match the domain")
        if c.precision < k:
            raise PrecisionExceeded(f"coefficient has fewer than {k} digits")
    modulus = prime.p**k
    coeff_values = [c.project(k).value for c in coefficients]
    table = {}
    for x in domain.discretize(k).sorted_points():
        rep = x.entries[0].value
        total = 0
        power = 1
        for a in coeff_values:
            total = (total + a * power) % modulus
            power = (power * rep) % modulus
        table[x] = ResidueVector.from_values(prime, k, (total,))
    return LevelMap(k, domain.discretize(k), full_level_set(prime, 1, k), table)


def compose_towers(outer: MapTower, inner: MapTower) -> MapTower:
    """Levelwise composite (outer o inner)_k = outer_k o inner_k."""
    return outer.compose(inner)


@dataclass(frozen=True)
class MahlerSeries:
    """Finite-difference coefficients of an integer-valued function, mod p^K.

    coefficient m is the m-th forward difference of f at 0, truncated to K
    base-p digits; the function is recovered as sum_m a_m * C(x, m).
    """

    prime: Prime
    precision: int
    coefficients: tuple[PadicApprox, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coefficients", tuple(self.coefficients))
        if not self.coefficients:
            raise ValueError("a series needs at least one coefficient")
        for c in self.coefficients:
            if c.prime != self.prime or c.precision != self.precision:
                raise LevelMismatch("coefficients must share the series prime and precision")

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1


def factorial_valuation(m: int, p: int) -> int:
    """v_p(m!) by Legendre's formula: (m - digit sum of m in base p) / (p - 1)."""
    digit_sum = 0
    v = m
    while v:
        digit_sum += v % p
        v //= p
    return (m - digit_sum) // (p - 1)


def mahler_coefficients(
    f: Callable[[int], int],
    m_max: int,
    prime: Prime,
    precision: int,
) -> MahlerSeries:
    """Coefficients a_m = (difference^m f)(0) for m = 0..m_max, exactly mod p^K."""
    if m_max < 0:
        raise ValueError("m_max must be >= 0")
    row = [f(j) for j in range(m_max + 1)]
    coefficients = []
    for _ in range(m_max + 1):
        coefficients.append(PadicApprox.from_int(prime, row[0], precision))
        row = [row[j + 1] - row[j] for j in range(len(row) - 1)]
    return MahlerSeries(prime, precision, tuple(coefficients))


def mahler_guard_precision(series: MahlerSeries) -> int:
    """Digits of the argument needed to evaluate the series at full precision.

    C(x, m) mod p^K is determined by x mod p^(K + v_p(m!)), so the argument
    must carry K + v_p(m_max!) digits.
    """
    return series.precision + factorial_valuation(series.order, series.prime.p)


def mahler_eval(series: MahlerSeries, x: PadicApprox) -> PadicApprox:
    """Evaluate sum_m a_m * C(x, m) exactly on an integer representative.

    The argument must carry the guard digits reported by
    ``mahler_guard_precision``; the division inside C(x, m) is exact in the
    integers before any reduction.
    """
    if x.prime != series.prime:
        raise LevelMismatch("argument prime does not match the series")
    guard = mahler_guard_precision(series)
    if x.precision < guard:
        raise PrecisionExceeded(
            f"argument has {x.precision} digits; evaluation needs {guard}"
        )
    rep = x.to_int()
    total = 0
    for m, coeff in enumerate(series.coefficients):
        total += coeff.to_int() * math.comb(rep, m)
    return PadicApprox.from_int(series.prime, total, series.precision)
