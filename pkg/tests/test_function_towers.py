import random

import pytest

from padic_towers import (
    ClopenManifold,
    DomainMismatch,
    IncompatibleTower,
    LevelMap,
    MapTower,
    NotLevelCompatible,
    PadicApprox,
    PrecisionExceeded,
    Prime,
    ResidueVector,
    compose_towers,
    mahler_coefficients,
    mahler_eval,
    mahler_guard_precision,
    project_function,
    project_polynomial,
)
from padic_towers.function_towers import factorial_valuation
from util import random_manifold

P2, P3, P5 = Prime(2), Prime(3), Prime(5)


def shift_by(prime, c):
    def oracle(point):
        x = point[0]
        return (PadicApprox.from_int(prime, x.to_int() + c, x.precision),)

    return oracle


def identity_oracle(point):
    return point


def table_of(level_map):
    return {x.values()[0]: y.values()[0] for x, y in level_map.table.items()}


def test_identity_projection_example():
    M = ClopenManifold.unit_ball(P2, 1, 3)
    f = project_function(identity_oracle, M, M, 2)
    assert table_of(f) == {0: 0, 1: 1, 2: 2, 3: 3}


def test_successor_projection_example():
    M = ClopenManifold.unit_ball(P2, 1, 3)
    f = project_function(shift_by(P2, 1), M, M, 1)
    assert table_of(f) == {0: 1, 1: 0}


def test_digit_shift_is_not_level_compatible():
    M = ClopenManifold.unit_ball(P2, 1, 3)

    def shift(point):
        return (PadicApprox(P2, point[0].digits[1:]),)

    with pytest.raises(NotLevelCompatible):
        project_function(shift, M, M, 1)


def test_projection_requires_precision():
    M = ClopenManifold.unit_ball(P2, 1, 2)
    with pytest.raises(PrecisionExceeded):
        project_function(identity_oracle, M, M, 3)


def test_level_map_validation():
    M = ClopenManifold.unit_ball(P2, 1, 2)
    dom = M.discretize(1)
    x0 = ResidueVector.from_values(P2, 1, (0,))
    x1 = ResidueVector.from_values(P2, 1, (1,))
    with pytest.raises(ValueError):
        LevelMap(1, dom, dom, {x0: x0})  # not total
    LevelMap(1, dom, dom, {x0: x1, x1: x1})  # non-injective maps are allowed


def test_level_map_json_surface():
    M = ClopenManifold.unit_ball(P2, 1, 2)
    f = project_function(identity_oracle, M, M, 1)
    assert f.to_json_dict() == {
        "level": 1,
        "domain": [[0], [1]],
        "table": [[[0], [0]], [[1], [1]]],
    }


def test_mahler_constant_and_linear():
    series = mahler_coefficients(lambda x: 7, 4, P2, 3)
    assert [c.to_int() for c in series.coefficients] == [7 % 8, 0, 0, 0, 0]
    series = mahler_coefficients(lambda x: x, 4, P3, 2)
    assert [c.to_int() for c in series.coefficients] == [0, 1, 0, 0, 0]


def test_mahler_square_example():
    # second difference of x^2 at 0 is 4 - 2*1 + 0 = 2
    series = mahler_coefficients(lambda x: x * x, 2, P2, 3)
    assert [c.to_int() for c in series.coefficients] == [0, 1, 2]
    value = mahler_eval(series, PadicApprox.from_int(P2, 3, mahler_guard_precision(series)))
    assert value == PadicApprox.from_int(P2, 9, 3)  # 1 mod 8


def test_mahler_eval_at_zero_is_constant_term():
    rng = random.Random(3)
    for prime in (P2, P3, P5):
        table = {n: rng.randint(-30, 30) for n in range(6)}
        series = mahler_coefficients(lambda n: table[n], 5, prime, 4)
        at_zero = mahler_eval(series, PadicApprox.from_int(prime, 0, mahler_guard_precision(series)))
        assert at_zero == series.coefficients[0]


def test_mahler_roundtrip_random():
    rng = random.Random(71)
    for _ in range(100):
        prime = rng.choice([P2, P3, P5])
        m_max = rng.randint(0, 8)
        precision = rng.randint(1, 6)
        table = {n: rng.randint(-100, 100) for n in range(m_max + 1)}
        series = mahler_coefficients(lambda n: table[n], m_max, prime, precision)
        guard = mahler_guard_precision(series)
        for n in range(m_max + 1):
            got = mahler_eval(series, PadicApprox.from_int(prime, n, guard))
            assert got == PadicApprox.from_int(prime, table[n], precision)


def test_mahler_guard_precision_required():
    series = mahler_coefficients(lambda x: x * x, 4, P2, 3)
    assert mahler_guard_precision(series) == 3 + factorial_valuation(4, 2)
    with pytest.raises(PrecisionExceeded):
        mahler_eval(series, PadicApprox.from_int(P2, 3, mahler_guard_precision(series) - 1))


def test_factorial_valuation():
    import math

    for p in (2, 3, 5):
        for m in range(30):
            direct = 0
            q = p
            while q <= m:
                direct += m // q
                q *= p
            assert factorial_valuation(m, p) == direct
            assert math.factorial(m) % p**direct == 0


def test_project_polynomial_example():
    M = ClopenManifold.unit_ball(P3, 1, 3)
    coeffs = [PadicApprox.from_int(P3, 0, 3), PadicApprox.from_int(P3, 0, 3), PadicApprox.from_int(P3, 1, 3)]
    f = project_polynomial(coeffs, M, 1)
    assert table_of(f) == {0: 0, 1: 1, 2: 1}


def test_zero_polynomial():
    M = ClopenManifold.unit_ball(P2, 1, 3)
    f = project_polynomial([PadicApprox.from_int(P2, 0, 3)], M, 2)
    assert all(y.values() == (0,) for y in f.table.values())


def test_polynomial_agrees_with_pointwise_projection():
    rng = random.Random(90)
    for _ in range(200):
        prime = rng.choice([P2, P3, P5])
        precision = 4
        domain = random_manifold(rng, prime, dim=1, precision=precision)
        k = rng.randint(1, 4)
        degree = rng.randint(0, 3)
        ints = [rng.randrange(prime.p**precision) for _ in range(degree + 1)]
        coeffs = [PadicApprox.from_int(prime, a, precision) for a in ints]
        f = project_polynomial(coeffs, domain, k)
        # oracle: evaluate on every full-precision representative with ints
        modulus = prime.p**k
        for x in domain.discretize(precision).points:
            rep = x.entries[0].value
            expected = sum(a * rep**i for i, a in enumerate(ints)) % modulus
            assert f(x.reduce(k)).values() == (expected,)


def test_compose_successor_twice_is_identity_mod_2():
    M = ClopenManifold.unit_ball(P2, 1, 3)
    t = MapTower.from_oracle(shift_by(P2, 1), M, M, 1)
    composed = compose_towers(t, t)
    assert composed[1] == LevelMap.identity(M.discretize(1))


def test_identity_tower_is_neutral():
    rng = random.Random(17)
    M = random_manifold(rng, P2, precision=4)
    N = ClopenManifold.unit_ball(P2, 1, 4)
    ident = MapTower.identity(N, 3)
    for _ in range(10):
        g = MapTower.random(M, N, 3, rng)
        assert compose_towers(ident, g) == g


def test_composition_matches_composed_oracle():
    rng = random.Random(23)
    for _ in range(30):
        prime = rng.choice([P2, P3])
        depth = rng.randint(1, 3)
        M = random_manifold(rng, prime, precision=4)
        N = ClopenManifold.unit_ball(prime, 1, 4)
        g = MapTower.random(M, N, depth, rng)
        f = MapTower.random(N, N, depth, rng)
        composed = f.compose(g)
        f_oracle, g_oracle = f.as_oracle(), g.as_oracle()
        for k in range(1, depth + 1):
            via_oracle = project_function(lambda x: f_oracle(g_oracle(x)), M, N, k)
            assert composed[k] == via_oracle


def test_composition_is_associative_on_towers():
    rng = random.Random(29)
    N = ClopenManifold.unit_ball(P2, 1, 4)
    for _ in range(10):
        f = MapTower.random(N, N, 3, rng)
        g = MapTower.random(N, N, 3, rng)
        h = MapTower.random(N, N, 3, rng)
        assert f.compose(g).compose(h) == f.compose(g.compose(h))


def test_tower_coherence_enforced():
    M = ClopenManifold.unit_ball(P2, 1, 3)
    x0, x1 = sorted(M.discretize(1).points)
    bad_level1 = LevelMap(1, M.discretize(1), M.discretize(1), {x0: x1, x1: x0})
    ident2 = LevelMap.identity(M.discretize(2))
    with pytest.raises(IncompatibleTower):
        MapTower(M, M, [bad_level1, ident2])


def test_compose_requires_matching_manifolds():
    M = ClopenManifold.unit_ball(P2, 1, 3)
    ball = ClopenManifold.unit_ball(P3, 1, 3)
    f = MapTower.identity(M, 2)
    g = MapTower.identity(ball, 2)
    with pytest.raises(DomainMismatch):
        f.compose(g)


def test_polynomial_levelwise_depends_only_on_residue():
    # equal residues at level k always give equal table outputs, by construction;
    # spot-check through the oracle route at full precision instead
    rng = random.Random(33)
    M = ClopenManifold.unit_ball(P3, 1, 4)
    ints = [4, 2, 7]
    coeffs = [PadicApprox.from_int(P3, a, 4) for a in ints]
    for k in (1, 2, 3):
        f = project_polynomial(coeffs, M, k)
        groups = {}
        for x in M.discretize(4).points:
            rep = x.entries[0].value
            value = sum(a * rep**i for i, a in enumerate(ints)) % P3.p**k
            groups.setdefault(x.reduce(k), set()).add(value)
        assert all(len(v) == 1 for v in groups.values())
        for x_k, (value,) in ((key, tuple(vals)) for key, vals in groups.items()):
            assert f(x_k).values() == (value,)
