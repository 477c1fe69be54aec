import random
from fractions import Fraction

import pytest

from padic_towers import (
    IntVector,
    LevelMismatch,
    NotCauchy,
    OrderUndefined,
    PadicVector,
    Prime,
    baire_distance,
    character,
    complete,
    density_witness,
)

P2, P3, P5 = Prime(2), Prime(3), Prime(5)


def test_complete_geometric_partial_sums():
    seq = [IntVector.from_dict({1: s}) for s in (1, 3, 7, 15, 31)]
    limit = complete(seq, P2, 3)
    assert limit == PadicVector.from_ints(P2, 3, {1: 7})  # 7 = -1 mod 8


def test_complete_constant_sequence():
    v = IntVector.from_dict({1: 5, 4: -2})
    assert complete([v, v, v], P3, 2) == character(v, P3, 2)
    assert complete([v], P3, 2) == character(v, P3, 2)


def test_complete_null_sequence():
    seq = [IntVector.from_dict({1: 2**n}) for n in range(1, 7)]
    assert complete(seq, P2, 3) == PadicVector.zero(P2, 3)


def test_complete_not_cauchy():
    seq = [IntVector.from_dict({1: 1}), IntVector.from_dict({1: 2})]
    with pytest.raises(NotCauchy):
        complete(seq, P2, 3)
    with pytest.raises(ValueError):
        complete([], P2, 3)


def test_character_examples():
    assert character(IntVector.from_dict({1: 13}), P2, 3) == PadicVector.from_ints(P2, 3, {1: 5})
    assert character(IntVector.zero(), P3, 4) == PadicVector.zero(P3, 4)


def test_character_is_additive_random():
    rng = random.Random(13)
    for prime in (P2, P3, P5):
        for s in range(1, 7):
            for _ in range(50):
                x = IntVector.from_dict({rng.randint(1, 6): rng.randint(-500, 500) for _ in range(3)})
                y = IntVector.from_dict({rng.randint(1, 6): rng.randint(-500, 500) for _ in range(3)})
                left = character(x + y, prime, s)
                right = character(x, prime, s) + character(y, prime, s)
                assert left == right
                # oracle: plain integer reduction per coordinate
                for label in set(x.support) | set(y.support):
                    expected = (x.entry(label) + y.entry(label)) % prime.p**s
                    assert left.entry(label).value == expected


def test_character_surjective_via_density_witness():
    rng = random.Random(29)
    for prime in (P2, P3, P5):
        for s in range(1, 7):
            for _ in range(25):
                target = PadicVector.from_ints(
                    prime, s, {rng.randint(1, 9): rng.randrange(prime.p**s) for _ in range(3)}
                )
                witness = density_witness(target)
                assert character(witness, prime, s) == target


def test_density_witness_examples():
    target = PadicVector.from_ints(P2, 3, {4: 7})
    assert density_witness(target) == IntVector.from_dict({4: 7})
    assert density_witness(PadicVector.zero(P2, 3)) == IntVector.zero()


def test_complete_commutes_with_character():
    # the character of the limit is the stabilized tail of the characters
    seq = [IntVector.from_dict({2: 3**n + 5}) for n in range(1, 8)]
    limit = complete(seq, P3, 4)
    tail = character(seq[-1], P3, 4)
    assert limit == tail


def test_baire_examples():
    x = IntVector.from_dict({1: 1, 2: 5})
    assert baire_distance(x, x, P2) == 0
    y = IntVector.from_dict({1: 2, 2: 5})
    assert baire_distance(x, y, P2) == Fraction(1, 2)
    z = IntVector.from_dict({1: 1, 2: 6})
    assert baire_distance(x, z, P3) == Fraction(1, 9)


def test_baire_is_ultrametric():
    rng = random.Random(31)
    for _ in range(300):
        prime = rng.choice([P2, P3, P5])
        vecs = [
            IntVector.from_dict({rng.randint(1, 4): rng.randint(-2, 2) for _ in range(3)})
            for _ in range(3)
        ]
        x, y, z = vecs
        d_xy, d_yz, d_xz = (
            baire_distance(x, y, prime),
            baire_distance(y, z, prime),
            baire_distance(x, z, prime),
        )
        assert d_xz <= max(d_xy, d_yz)
        assert d_xy == baire_distance(y, x, prime)
        # values live in {0} and the discrete value group {p^-j}
        assert d_xy == 0 or (d_xy.numerator == 1 and _is_power(prime.p, d_xy.denominator))


def _is_power(p, n):
    while n % p == 0:
        n //= p
    return n == 1


def test_baire_on_padic_vectors():
    a = PadicVector.from_ints(P2, 3, {1: 1, 3: 4})
    b = PadicVector.from_ints(P2, 3, {1: 1, 3: 5})
    assert baire_distance(a, b) == Fraction(1, 8)
    with pytest.raises(LevelMismatch):
        baire_distance(a, PadicVector.from_ints(P2, 2, {1: 1}))
    with pytest.raises(LevelMismatch):
        baire_distance(a, IntVector.from_dict({1: 1}))


def test_baire_order_undefined():
    x = IntVector.from_dict({1: 1})
    with pytest.raises(OrderUndefined):
        baire_distance(x, IntVector.from_dict({1: 2}))  # no prime for int vectors
    y = IntVector((("a", 1),))
    with pytest.raises(OrderUndefined):
        baire_distance(x, y, P2)
    z = IntVector.from_dict({0: 1})
    with pytest.raises(OrderUndefined):
        baire_distance(x, z, P2)


def test_vector_arithmetic():
    x = IntVector.from_dict({1: 2, 2: -2})
    y = IntVector.from_dict({2: 2, 5: 1})
    assert (x + y) == IntVector.from_dict({1: 2, 5: 1})
    assert (x - x) == IntVector.zero()
    assert x.scale(3) == IntVector.from_dict({1: 6, 2: -6})
    a = PadicVector.from_ints(P2, 2, {1: 3})
    b = PadicVector.from_ints(P2, 2, {1: 1})
    assert a + b == PadicVector.zero(P2, 2)
    assert a - a == PadicVector.zero(P2, 2)
