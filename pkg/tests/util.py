"""Shared generators for the randomized exact tests."""
from __future__ import annotations

import random

from padic_towers import Ball, ClopenManifold, PadicApprox, Prime


def random_manifold(
    rng: random.Random,
    prime: Prime,
    dim: int = 1,
    max_balls: int = 3,
    precision: int = 4,
    max_radius_exp: int = 2,
    min_balls: int = 1,
) -> ClopenManifold:
    """A random disjoint union of balls, rejection-sampled for disjointness."""
    target = rng.randint(min_balls, max(max_balls, min_balls))
    balls: list[Ball] = []
    attempts = 0
    while len(balls) < target and attempts < 300:
        attempts += 1
        s = rng.randint(0 if not balls else 1, min(max_radius_exp, precision))
        center = tuple(
            PadicApprox.from_int(prime, rng.randrange(prime.p**precision), precision)
            for _ in range(dim)
        )
        candidate = Ball(center, s)
        if all(not candidate.meets(b) for b in balls):
            balls.append(candidate)
    return ClopenManifold(prime, dim, tuple(balls))


def small_level_one_manifold(rng: random.Random, prime: Prime, precision: int = 4) -> ClopenManifold:
    """A random manifold whose level-1 image has at most 3 points."""
    for _ in range(50):
        m = random_manifold(rng, prime, dim=1, max_balls=2, precision=precision)
        if len(m.discretize(1)) <= 3:
            return m
    return ClopenManifold.unit_ball(prime, 1, precision)
