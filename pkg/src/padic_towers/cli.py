"""Reproducible experiment driver.

Loads a TOML scenario, runs the cross-module invariant suites, and emits
machine-readable reports.  Reports are canonical: the JSON bytes depend only
on the scenario and master seed, never on wall-clock time or evaluation
order (timing diagnostics go to stderr).  Exit codes: 0 all checks pass,
1 an invariant was violated, 2 the configuration is invalid.
"""
from __future__ import annotations

import argparse
import hashlib
import itertools
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .errors import (
    ConfigInvalid,
    IncompatibleTower,
    NotHomomorphism,
    TowerError,
    UnknownCommand,
)
from .level_rings import PadicApprox, Prime, Residue, fiber_enumerate
from .manifolds import Ball, ClopenManifold, LevelSet
from .function_towers import (
    MapTower,
    mahler_coefficients,
    mahler_eval,
    mahler_guard_precision,
    project_function,
    project_polynomial,
)
from .perm_towers import (
    LevelPerm,
    PermTower,
    check_perm_tower_compatibility,
    divisibility_report,
    group_order,
    random_lift,
    random_perm_tower,
    weak_distance,
)
from .loop_monoids import (
    CodomainTower,
    LevelCodomain,
    LevelLoopClass,
    canonicalize,
    class_count,
    connecting,
    enumerate_classes,
)
from .grothendieck import connecting_hom, embed, free_rank, universal_extend
from .completion import (
    IntVector,
    PadicVector,
    baire_distance,
    character,
    complete,
    density_witness,
)
from .seeds import substream

ARTIFACT_NAME = "padic-towers"

DEFAULT_BOUNDS = {
    "random_pairs": 300,
    "tower_samples": 25,
    "triples": 100,
    "polynomial_samples": 40,
    "mahler_samples": 30,
    "mahler_m_max": 6,
    "loop_support": 3,
    "loop_law_triples": 20000,
    "groth_homs": 20,
    "lift_samples": 15,
    "density_samples": 50,
    "enumeration_bound": 100000,
}


@dataclass
class Scenario:
    """A fully validated experiment configuration."""

    prime: Prime
    dim: int
    depth: int
    seed: int
    manifold: ClopenManifold
    codomain: ClopenManifold
    bounds: dict[str, int]
    faults: dict[str, bool]
    complete_spec: dict
    echo: dict = field(default_factory=dict)


def default_config() -> dict:
    """Built-in scenario: the one-dimensional unit ball at p = 2, depth 3."""
    return {
        "scenario": {
            "prime": 2,
            "dim": 1,
            "depth": 3,
            "seed": 0,
            "balls": [{"center": [0], "radius_exp": 0}],
        }
    }


def load_config(path: str | None) -> dict:
    if path is None:
        return default_config()
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigInvalid(f"malformed TOML in {path}: {exc}") from exc


def _require_int(raw: dict, key: str, default: int | None = None, minimum: int | None = None) -> int:
    value = raw.get(key, default)
    if value is None:
        raise ConfigInvalid(f"missing required integer key '{key}'")
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigInvalid(f"key '{key}' must be an exact integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigInvalid(f"key '{key}' must be >= {minimum}, got {value}")
    return value


def _coerce_digits(spec: object, prime: Prime, precision: int, what: str) -> PadicApprox:
    """Accept either an integer or an explicit little-endian digit list."""
    if isinstance(spec, bool):
        raise ConfigInvalid(f"{what} must be an integer or digit list")
    if isinstance(spec, int):
        return PadicApprox.from_int(prime, spec, precision)
    if isinstance(spec, list):
        if len(spec) < precision:
            raise ConfigInvalid(
                f"{what} needs at least {precision} digits, got {len(spec)}"
            )
        try:
            return PadicApprox(prime, tuple(spec))
        except (ValueError, TypeError) as exc:
            raise ConfigInvalid(f"{what}: {exc}") from exc
    raise ConfigInvalid(f"{what} must be an integer or digit list, got {spec!r}")


def _build_manifold(raw: dict, prime: Prime, dim: int, precision: int, what: str) -> ClopenManifold:
    ball_specs = raw.get("balls", [{"center": [0] * dim, "radius_exp": 0}])
    if not isinstance(ball_specs, list) or not ball_specs:
        raise ConfigInvalid(f"{what}.balls must be a nonempty list")
    balls = []
    for i, spec in enumerate(ball_specs):
        if not isinstance(spec, dict):
            raise ConfigInvalid(f"{what}.balls[{i}] must be a table")
        center_spec = spec.get("center")
        if not isinstance(center_spec, list) or len(center_spec) != dim:
            raise ConfigInvalid(f"{what}.balls[{i}].center must list {dim} coordinates")
        radius_exp = _require_int(spec, "radius_exp", default=0, minimum=0)
        if radius_exp > precision:
            raise ConfigInvalid(
                f"{what}.balls[{i}].radius_exp {radius_exp} exceeds precision {precision}"
            )
        center = tuple(
            _coerce_digits(c, prime, precision, f"{what}.balls[{i}].center[{j}]")
            for j, c in enumerate(center_spec)
        )
        balls.append(Ball(center, radius_exp))
    base_spec = raw.get("base_point")
    base = None
    if base_spec is not None:
        if not isinstance(base_spec, list) or len(base_spec) != dim:
            raise ConfigInvalid(f"{what}.base_point must list {dim} coordinates")
        base = tuple(
            _coerce_digits(c, prime, precision, f"{what}.base_point[{j}]")
            for j, c in enumerate(base_spec)
        )
    try:
        return ClopenManifold(prime, dim, tuple(balls), base)
    except (ValueError, TowerError) as exc:
        raise ConfigInvalid(f"{what}: {exc}") from exc


def build_scenario(config: dict, seed_override: int | None = None) -> Scenario:
    """Validate the raw config and construct all derived objects."""
    raw = config.get("scenario")
    if not isinstance(raw, dict):
        raise ConfigInvalid("config must contain a [scenario] table")
    p = _require_int(raw, "prime", minimum=2)
    try:
        prime = Prime(p)
    except ValueError as exc:
        raise ConfigInvalid(str(exc)) from exc
    dim = _require_int(raw, "dim", default=1, minimum=1)
    depth = _require_int(raw, "depth", default=3, minimum=1)
    seed = _require_int(raw, "seed", default=0, minimum=0)
    if seed_override is not None:
        if seed_override < 0:
            raise ConfigInvalid(f"seed must be >= 0, got {seed_override}")
        seed = seed_override
    precision = _require_int(raw, "precision", default=depth, minimum=depth)

    manifold = _build_manifold(raw, prime, dim, precision, "scenario")

    cod_raw = raw.get("codomain", {})
    if not isinstance(cod_raw, dict):
        raise ConfigInvalid("scenario.codomain must be a table")
    cod_dim = _require_int(cod_raw, "dim", default=1, minimum=1)
    cod_raw = dict(cod_raw)
    cod_raw.setdefault("base_point", [0] * cod_dim)
    codomain = _build_manifold(cod_raw, prime, cod_dim, precision, "scenario.codomain")

    bounds = dict(DEFAULT_BOUNDS)
    bounds_raw = raw.get("bounds", {})
    if not isinstance(bounds_raw, dict):
        raise ConfigInvalid("scenario.bounds must be a table")
    for key in bounds_raw:
        if key not in DEFAULT_BOUNDS:
            raise ConfigInvalid(f"unknown bound '{key}'")
        bounds[key] = _require_int(bounds_raw, key, minimum=0)

    faults_raw = raw.get("faults", {})
    if not isinstance(faults_raw, dict):
        raise ConfigInvalid("scenario.faults must be a table")
    faults = {}
    for key, value in faults_raw.items():
        if key not in {"permutation_tower"}:
            raise ConfigInvalid(f"unknown fault '{key}'")
        if not isinstance(value, bool):
            raise ConfigInvalid(f"fault '{key}' must be a boolean")
        faults[key] = value

    complete_raw = raw.get("complete", {})
    if not isinstance(complete_raw, dict):
        raise ConfigInvalid("scenario.complete must be a table")
    complete_precision = _require_int(complete_raw, "precision", default=min(depth, 6), minimum=1)
    sequence_spec = complete_raw.get("sequence")
    sequence = None
    if sequence_spec is not None:
        sequence = _parse_vector_sequence(sequence_spec)
    complete_spec = {"precision": complete_precision, "sequence": sequence}

    echo = {
        "prime": p,
        "dim": dim,
        "depth": depth,
        "precision": precision,
        "seed": seed,
        "balls": [
            {"center": [list(c.digits) for c in b.center], "radius_exp": b.radius_exp}
            for b in manifold.balls
        ],
        "base_point": None
        if manifold.base_point is None
        else [list(c.digits) for c in manifold.base_point],
        "codomain": {
            "dim": cod_dim,
            "balls": [
                {"center": [list(c.digits) for c in b.center], "radius_exp": b.radius_exp}
                for b in codomain.balls
            ],
            "base_point": [list(c.digits) for c in codomain.base_point],
        },
        "bounds": dict(sorted(bounds.items())),
        "faults": dict(sorted(faults.items())),
        "complete": {
            "precision": complete_precision,
            "sequence": None
            if sequence is None
            else [sorted(vec.entries) for vec in sequence],
        },
    }
    return Scenario(
        prime=prime,
        dim=dim,
        depth=depth,
        seed=seed,
        manifold=manifold,
        codomain=codomain,
        bounds=bounds,
        faults=faults,
        complete_spec=complete_spec,
        echo=echo,
    )


def _parse_vector_sequence(spec: object) -> list[IntVector]:
    if not isinstance(spec, list) or not spec:
        raise ConfigInvalid("complete.sequence must be a nonempty list of tables")
    out = []
    for i, entry in enumerate(spec):
        if not isinstance(entry, dict):
            raise ConfigInvalid(f"complete.sequence[{i}] must be a table of index -> entry")
        vec = {}
        for label, value in entry.items():
            try:
                index = int(label)
            except (TypeError, ValueError) as exc:
                raise ConfigInvalid(
                    f"complete.sequence[{i}] has non-integer index {label!r}"
                ) from exc
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigInvalid(f"complete.sequence[{i}][{label}] must be an integer")
            vec[index] = value
        out.append(IntVector.from_dict(vec))
    return out


def geometric_fixture(prime: Prime, s: int) -> list[IntVector]:
    """Partial sums of (p-1) * (1 + p + p^2 + ...): the limit is -1 mod p^s."""
    return [IntVector.from_dict({1: prime.p**t - 1}) for t in range(1, s + 3)]


# ---------------------------------------------------------------------------
# Invariant checks.  Each returns (passed, witness); the witness is JSON-safe
# and deterministic for a fixed scenario.
# ---------------------------------------------------------------------------


def _check_ring_homomorphism(sc: Scenario) -> tuple[bool, dict]:
    rng = substream(sc.seed, "level_rings.homomorphism")
    p = sc.prime.p
    count = sc.bounds["random_pairs"]
    checked = 0
    for _ in range(count):
        l = rng.randint(2, max(2, sc.depth))
        k = rng.randint(1, l - 1)
        a = Residue(sc.prime, l, rng.randrange(p**l))
        b = Residue(sc.prime, l, rng.randrange(p**l))
        if (a + b).reduce(k) != a.reduce(k) + b.reduce(k):
            return False, {"law": "additivity", "a": a.value, "b": b.value, "k": k, "l": l}
        if (a * b).reduce(k) != a.reduce(k) * b.reduce(k):
            return False, {"law": "multiplicativity", "a": a.value, "b": b.value, "k": k, "l": l}
        if (-a).reduce(k) != -(a.reduce(k)):
            return False, {"law": "negation", "a": a.value, "k": k, "l": l}
        checked += 1
    return True, {"pairs": checked}


def _check_ring_cocycle(sc: Scenario) -> tuple[bool, dict]:
    p = sc.prime.p
    top = min(max(sc.depth, 2), 3)
    checked = 0
    for value in range(p**top):
        a = Residue(sc.prime, top, value)
        for l in range(1, top + 1):
            for k in range(1, l + 1):
                if a.reduce(l).reduce(k) != a.reduce(k):
                    return False, {"value": value, "l": l, "k": k}
                checked += 1
    return True, {"triples": checked}


def _check_ring_fibers(sc: Scenario) -> tuple[bool, dict]:
    p = sc.prime.p
    l = min(sc.depth + 1, 4) if sc.depth >= 1 else 2
    k = max(1, l - 2)
    fibers = [fiber_enumerate(Residue(sc.prime, k, v), l) for v in range(p**k)]
    sizes = {len(f) for f in fibers}
    union = set().union(*fibers)
    ok = sizes == {p ** (l - k)} and len(union) == p**l
    return ok, {"k": k, "l": l, "fiber_size": p ** (l - k), "classes": p**k}


def _check_manifold_connecting(sc: Scenario) -> tuple[bool, dict]:
    M = sc.manifold
    for l in range(1, sc.depth + 1):
        for k in range(1, l + 1):
            reduced = {x.reduce(k) for x in M.discretize(l).points}
            if reduced != set(M.discretize(k).points):
                return False, {"l": l, "k": k}
    return True, {"levels": sc.depth}


def _check_manifold_cardinality(sc: Scenario) -> tuple[bool, dict]:
    M = sc.manifold
    start = max(M.max_radius_exp, 1)
    counts = []
    for k in range(start, sc.depth + 1):
        closed = M.cardinality(k)
        enumerated = len(M.discretize(k))
        if closed != enumerated:
            return False, {"k": k, "closed_form": closed, "enumerated": enumerated}
        exponent = M.card_divisibility_exponent(k)
        if closed % (sc.prime.p**exponent) != 0:
            return False, {"k": k, "cardinality": closed, "exponent": exponent}
        counts.append({"k": k, "cardinality": closed, "divisibility_exponent": exponent})
    return True, {"counts": counts}


def _check_manifold_disjointness_guard(sc: Scenario) -> tuple[bool, dict]:
    prime = sc.prime
    whole = Ball((PadicApprox.from_int(prime, 0, 2),), 0)
    inner = Ball((PadicApprox.from_int(prime, 1, 2),), 1)
    try:
        ClopenManifold(prime, 1, (whole, inner))
    except ValueError as exc:
        return True, {"rejected": str(exc)}
    return False, {"error": "overlapping balls were accepted"}


def _check_manifold_fibers(sc: Scenario) -> tuple[bool, dict]:
    M = sc.manifold
    k = max(M.max_radius_exp, 1)
    if k >= sc.depth:
        return True, {"skipped": f"no level above {k} within depth {sc.depth}"}
    checked = 0
    for l in range(k + 1, sc.depth + 1):
        expected = sc.prime.p ** (M.dim * (l - k))
        fibers = [M.fiber(x, l) for x in M.discretize(k).sorted_points()]
        if any(len(f) != expected for f in fibers):
            return False, {"k": k, "l": l, "expected_size": expected}
        union = set().union(*fibers)
        if union != set(M.discretize(l).points):
            return False, {"k": k, "l": l, "error": "fibers do not cover the level image"}
        total = sum(len(f) for f in fibers)
        if total != len(union):
            return False, {"k": k, "l": l, "error": "fibers overlap"}
        checked += 1
    return True, {"levels_checked": checked}


def _poly_oracle(coefficients: list[PadicApprox]):
    reps = [c.to_int() for c in coefficients]

    def oracle(point: tuple[PadicApprox, ...]) -> tuple[PadicApprox, ...]:
        x = point[0]
        rep = x.to_int()
        total = sum(a * rep**i for i, a in enumerate(reps))
        return (PadicApprox.from_int(x.prime, total, x.precision),)

    return oracle


def _check_polynomial_projection(sc: Scenario) -> tuple[bool, dict]:
    rng = substream(sc.seed, "function.polynomial_projection")
    prime = sc.prime
    if sc.manifold.dim == 1:
        domain = sc.manifold
    else:
        domain = ClopenManifold.unit_ball(prime, 1, sc.manifold.precision)
    target = ClopenManifold.unit_ball(prime, 1, domain.precision)
    checked = 0
    for _ in range(sc.bounds["polynomial_samples"]):
        degree = rng.randint(0, 3)
        coefficients = [
            PadicApprox.from_int(prime, rng.randrange(prime.p**domain.precision), domain.precision)
            for _ in range(degree + 1)
        ]
        k = rng.randint(1, sc.depth)
        direct = project_polynomial(coefficients, domain, k)
        via_oracle = project_function(_poly_oracle(coefficients), domain, target, k)
        if direct != via_oracle:
            return False, {"degree": degree, "k": k}
        checked += 1
    return True, {"polynomials": checked}


def _check_mahler_roundtrip(sc: Scenario) -> tuple[bool, dict]:
    rng = substream(sc.seed, "function.mahler_roundtrip")
    prime = sc.prime
    m_max = sc.bounds["mahler_m_max"]
    precision = min(sc.depth + 2, 6)
    checked = 0
    for _ in range(sc.bounds["mahler_samples"]):
        table = {n: rng.randint(-50, 50) for n in range(m_max + 1)}
        series = mahler_coefficients(lambda n: table[n], m_max, prime, precision)
        guard = mahler_guard_precision(series)
        for n in range(m_max + 1):
            got = mahler_eval(series, PadicApprox.from_int(prime, n, guard))
            expected = PadicApprox.from_int(prime, table[n], precision)
            if got != expected:
                return False, {"n": n, "table": [table[i] for i in range(m_max + 1)]}
        checked += 1
    return True, {"functions": checked, "m_max": m_max, "precision": precision}


def _check_composition_compat(sc: Scenario) -> tuple[bool, dict]:
    rng = substream(sc.seed, "function.composition_compat")
    M, N = sc.manifold, sc.codomain
    checked = 0
    for sample in range(sc.bounds["tower_samples"]):
        g = MapTower.random(M, N, sc.depth, rng)
        f = MapTower.random(N, N, sc.depth, rng)
        composed = f.compose(g)
        f_oracle, g_oracle = f.as_oracle(), g.as_oracle()

        def combined(point, f_oracle=f_oracle, g_oracle=g_oracle):
            return f_oracle(g_oracle(point))

        for k in range(1, sc.depth + 1):
            if composed[k] != project_function(combined, M, N, k):
                return False, {"sample": sample, "k": k}
        checked += 1
    return True, {"tower_pairs": checked}


def _check_perm_group_axioms(sc: Scenario) -> tuple[bool, dict]:
    rng = substream(sc.seed, "diff.group_axioms")
    M = sc.manifold
    identity = PermTower.identity(M, sc.depth)
    checked = 0
    for sample in range(sc.bounds["tower_samples"]):
        sigma = random_perm_tower(M, sc.depth, rng.randrange(2**63))
        tau = random_perm_tower(M, sc.depth, rng.randrange(2**63))
        rho = random_perm_tower(M, sc.depth, rng.randrange(2**63))
        if sigma.compose(tau).compose(rho) != sigma.compose(tau.compose(rho)):
            return False, {"law": "associativity", "sample": sample}
        if sigma.compose(identity) != sigma or identity.compose(sigma) != sigma:
            return False, {"law": "identity", "sample": sample}
        if sigma.compose(sigma.inverse()) != identity:
            return False, {"law": "inverses", "sample": sample}
        inv = sigma.inverse()
        for k in range(1, sc.depth + 1):
            if inv[k] != sigma[k].inverse():
                return False, {"law": "levelwise inverse", "sample": sample, "k": k}
        checked += 1
    return True, {"tower_triples": checked}


def _check_perm_lifts(sc: Scenario) -> tuple[bool, dict]:
    rng = substream(sc.seed, "diff.lift_section")
    M = sc.manifold
    k = max(M.max_radius_exp, 1)
    if k >= sc.depth:
        return True, {"skipped": f"no level above {k} within depth {sc.depth}"}
    points = M.discretize(k).sorted_points()
    checked = 0
    for sample in range(sc.bounds["lift_samples"]):
        shuffled = list(points)
        rng.shuffle(shuffled)
        sigma = LevelPerm(k, M.discretize(k), dict(zip(points, shuffled)))
        seed = rng.randrange(2**63)
        lift = random_lift(sigma, M, sc.depth, seed)
        again = random_lift(sigma, M, sc.depth, seed)
        if lift != again:
            return False, {"sample": sample, "error": "same seed gave different lifts"}
        if any(lift(x).reduce(k) != sigma(x.reduce(k)) for x in lift.domain.points):
            return False, {"sample": sample, "error": "lift does not reduce to its base"}
        checked += 1
    return True, {"lifts": checked, "from_level": k, "to_level": sc.depth}


def _check_perm_orders(sc: Scenario) -> tuple[bool, dict]:
    M = sc.manifold
    reports = []
    for k in range(1, sc.depth + 1):
        rep = divisibility_report(M, k)
        if rep["group_order"] != group_order(M, k):
            return False, {"k": k, "error": "order mismatch"}
        if rep["group_order"] % rep["verified_divisor"] != 0:
            return False, {"k": k, "error": "verified divisor does not divide the order"}
        if rep["cardinality"] % (sc.prime.p ** rep["card_exponent"]) != 0:
            return False, {"k": k, "error": "cardinality misses the verified p-power"}
        reports.append(
            {
                "k": k,
                "cardinality": rep["cardinality"],
                "verified_exponent": rep["verified_exponent"],
                "card_exponent": rep["card_exponent"],
                "literal_exponent": rep["literal_exponent"],
            }
        )
    return True, {"levels": reports}


def _check_weak_metric(sc: Scenario) -> tuple[bool, dict]:
    rng = substream(sc.seed, "diff.weak_metric")
    M = sc.manifold
    checked = 0
    for _ in range(sc.bounds["triples"]):
        sigma = random_perm_tower(M, sc.depth, rng.randrange(2**63))
        tau = random_perm_tower(M, sc.depth, rng.randrange(2**63))
        rho = random_perm_tower(M, sc.depth, rng.randrange(2**63))
        d_st, d_tr, d_sr = weak_distance(sigma, tau), weak_distance(tau, rho), weak_distance(sigma, rho)
        if d_sr > max(d_st, d_tr):
            return False, {"law": "strong triangle inequality"}
        if weak_distance(sigma, sigma) != 0:
            return False, {"law": "identity of indiscernibles"}
        if d_st != weak_distance(tau, sigma):
            return False, {"law": "symmetry"}
        checked += 1
    return True, {"triples": checked}


def _loop_tower(sc: Scenario) -> CodomainTower:
    return CodomainTower.from_manifold(sc.codomain, sc.depth)


def _random_class(rng, codomain: LevelCodomain, max_support: int) -> LevelLoopClass:
    nonzero = codomain.nonzero_values()
    size = rng.randint(0, max_support)
    return LevelLoopClass(codomain, tuple(rng.choice(nonzero) for _ in range(size)) if nonzero else ())


def _check_loop_monoid_laws(sc: Scenario) -> tuple[bool, dict]:
    rng = substream(sc.seed, "loop.monoid_laws")
    codomain = _loop_tower(sc)[1]
    support = sc.bounds["loop_support"]
    classes = enumerate_classes(support + 1, codomain, support, bound=sc.bounds["enumeration_bound"])
    unit = LevelLoopClass.unit(codomain)
    n = len(classes)
    exhaustive = n**3 <= sc.bounds["loop_law_triples"]
    if exhaustive:
        triples = [
            (a, b, c) for a in classes for b in classes for c in classes
        ]
    else:
        triples = [
            (rng.choice(classes), rng.choice(classes), rng.choice(classes))
            for _ in range(sc.bounds["loop_law_triples"] // 10)
        ]
    for a, b, c in triples:
        if a.wedge(b) != b.wedge(a):
            return False, {"law": "commutativity"}
        if a.wedge(b).wedge(c) != a.wedge(b.wedge(c)):
            return False, {"law": "associativity"}
        if a.wedge(unit) != a:
            return False, {"law": "unit"}
        if a.wedge(c) == b.wedge(c) and a != b:
            return False, {"law": "cancellation"}
    return True, {"classes": n, "triples": len(triples), "exhaustive": exhaustive}


def _check_loop_canonical(sc: Scenario) -> tuple[bool, dict]:
    codomain = _loop_tower(sc)[1]
    values = codomain.values.sorted_points()
    if len(values) > 3:
        keep = values[:3] if codomain.zero in values[:3] else [codomain.zero] + values[:2]
        codomain = LevelCodomain(
            LevelSet(codomain.prime, codomain.values.dim, 1, frozenset(keep)), codomain.zero
        )
    nonzero = codomain.nonzero_values()
    domain_size = 4
    labels = list(range(domain_size))  # label 0 is the base point
    all_values = [codomain.zero] + nonzero
    maps = list(itertools.product(all_values, repeat=domain_size - 1))
    orbits: dict[tuple, set] = {}
    for f in maps:
        canon = tuple(sorted((v for v in f if v != codomain.zero), key=lambda v: v.values()))
        orbits.setdefault(canon, set()).add(f)
    for members in orbits.values():
        pivot = next(iter(members))
        generated = {
            tuple(pivot[i] for i in perm)
            for perm in itertools.permutations(range(domain_size - 1))
        }
        if generated != members:
            return False, {"error": "orbit does not match a canonical multiset class"}
    canonical_via_api = {
        tuple(
            canonicalize(dict(zip(labels[1:], f)), codomain, basepoint_label=0).values
        )
        for f in maps
    }
    if canonical_via_api != set(orbits):
        return False, {"error": "canonicalize disagrees with the orbit enumeration"}
    return True, {"maps": len(maps), "orbit_count": len(orbits), "codomain_size": len(all_values)}


def _check_loop_connecting(sc: Scenario) -> tuple[bool, dict]:
    rng = substream(sc.seed, "loop.connecting_hom")
    tower = _loop_tower(sc)
    top = tower[sc.depth]
    checked = 0
    for _ in range(sc.bounds["random_pairs"] // 5):
        a = _random_class(rng, top, sc.bounds["loop_support"])
        b = _random_class(rng, top, sc.bounds["loop_support"])
        k = rng.randint(1, sc.depth)
        if connecting(a.wedge(b), k, tower) != connecting(a, k, tower).wedge(connecting(b, k, tower)):
            return False, {"law": "homomorphism", "k": k}
        j = rng.randint(1, k)
        two_step = connecting(connecting(a, k, tower), j, tower)
        if two_step != connecting(a, j, tower):
            return False, {"law": "cocycle", "k": k, "j": j}
        checked += 1
    return True, {"pairs": checked}


def _check_groth_embedding(sc: Scenario) -> tuple[bool, dict]:
    codomain = _loop_tower(sc)[1]
    support = min(sc.bounds["loop_support"], 3)
    classes = enumerate_classes(support + 1, codomain, support, bound=sc.bounds["enumeration_bound"])
    embedded = [embed(c) for c in classes]
    for i, x in enumerate(embedded):
        for y in embedded[i + 1 :]:
            if x == y:
                return False, {"error": "embed is not injective"}
    for a in classes[: min(len(classes), 12)]:
        for b in classes[: min(len(classes), 12)]:
            if embed(a.wedge(b)) != embed(a) + embed(b):
                return False, {"error": "embed is not a monoid homomorphism"}
    return True, {"classes": len(classes)}


def _check_groth_universal(sc: Scenario) -> tuple[bool, dict]:
    rng = substream(sc.seed, "groth.universal_property")
    codomain = _loop_tower(sc)[1]
    nonzero = codomain.nonzero_values()
    checked = 0
    for _ in range(sc.bounds["groth_homs"]):
        weights = {v: rng.randint(-9, 9) for v in nonzero}

        def h(cls, weights=weights):
            return sum(weights[v] * c for v, c in cls.multiplicities().items())

        samples = [_random_class(rng, codomain, sc.bounds["loop_support"]) for _ in range(5)]
        extension = universal_extend(h, codomain, samples)
        for cls in samples:
            if extension(embed(cls)) != h(cls):
                return False, {"error": "extension disagrees with h through embed"}
        checked += 1
    if nonzero:

        def bad(cls):
            return cls.support_size**2

        try:
            universal_extend(bad, codomain)
            return False, {"error": "non-homomorphism was accepted"}
        except NotHomomorphism:
            pass
    return True, {"homomorphisms": checked}


def _check_groth_rank(sc: Scenario) -> tuple[bool, dict]:
    tower = _loop_tower(sc)
    ranks = []
    for k in range(1, sc.depth + 1):
        codomain = tower[k]
        computed = free_rank(codomain)
        if computed != len(codomain.values.points) - 1:
            return False, {"k": k, "error": "rank does not count the nonzero values"}
        full = LevelLoopClass(codomain, tuple(codomain.nonzero_values()))
        if len(embed(full).coords) != computed:
            return False, {"k": k, "error": "coordinates do not realize the rank"}
        ranks.append(
            {
                "k": k,
                "codomain_size": len(codomain.values.points),
                "computed_rank": computed,
                "claimed_rank": len(codomain.values.points),
            }
        )
    return True, {"ranks": ranks}


def _check_groth_functorial(sc: Scenario) -> tuple[bool, dict]:
    rng = substream(sc.seed, "groth.functorial")
    tower = _loop_tower(sc)
    top = tower[sc.depth]
    checked = 0
    for _ in range(sc.bounds["random_pairs"] // 10):
        a = _random_class(rng, top, sc.bounds["loop_support"])
        k = rng.randint(1, sc.depth)
        if connecting_hom(embed(a), k, tower) != embed(connecting(a, k, tower)):
            return False, {"k": k}
        checked += 1
    return True, {"samples": checked}


def _check_characters(sc: Scenario) -> tuple[bool, dict]:
    rng = substream(sc.seed, "completion.character_hom")
    prime = sc.prime
    s = sc.complete_spec["precision"]
    checked = 0
    for _ in range(sc.bounds["density_samples"]):
        x = IntVector.from_dict({rng.randint(1, 8): rng.randint(-99, 99) for _ in range(3)})
        y = IntVector.from_dict({rng.randint(1, 8): rng.randint(-99, 99) for _ in range(3)})
        if character(x + y, prime, s) != character(x, prime, s) + character(y, prime, s):
            return False, {"law": "additivity"}
        target = PadicVector.from_ints(
            prime, s, {rng.randint(1, 8): rng.randrange(prime.p**s) for _ in range(3)}
        )
        if character(density_witness(target), prime, s) != target:
            return False, {"law": "density round trip"}
        checked += 1
    return True, {"samples": checked, "precision": s}


def _check_complete_fixture(sc: Scenario) -> tuple[bool, dict]:
    prime = sc.prime
    s = sc.complete_spec["precision"]
    sequence = sc.complete_spec["sequence"] or geometric_fixture(prime, s)
    limit = complete(sequence, prime, s)
    witness: dict = {
        "precision": s,
        "limit": [[i, r.value] for i, r in limit.entries],
    }
    if sc.complete_spec["sequence"] is None:
        expected = PadicVector.from_ints(prime, s, {1: prime.p**s - 1})
        if limit != expected:
            return False, {"error": "geometric fixture does not complete to -1", **witness}
        null_seq = [IntVector.from_dict({1: prime.p**t}) for t in range(1, s + 3)]
        if complete(null_seq, prime, s) != PadicVector.zero(prime, s):
            return False, {"error": "null sequence does not complete to zero"}
    constant = [sequence[-1], sequence[-1]]
    if complete(constant, prime, s) != character(sequence[-1], prime, s):
        return False, {"error": "constant sequence does not complete to itself"}
    return True, witness


def _check_baire_metric(sc: Scenario) -> tuple[bool, dict]:
    rng = substream(sc.seed, "completion.baire_ultrametric")
    prime = sc.prime
    checked = 0
    for _ in range(sc.bounds["triples"]):
        vectors = [
            IntVector.from_dict({rng.randint(1, 5): rng.randint(-3, 3) for _ in range(3)})
            for _ in range(3)
        ]
        x, y, z = vectors
        d_xy = baire_distance(x, y, prime)
        d_yz = baire_distance(y, z, prime)
        d_xz = baire_distance(x, z, prime)
        if d_xz > max(d_xy, d_yz):
            return False, {"law": "strong triangle inequality"}
        if baire_distance(x, x, prime) != 0:
            return False, {"law": "identity"}
        if d_xy != baire_distance(y, x, prime):
            return False, {"law": "symmetry"}
        checked += 1
    return True, {"triples": checked}


def _check_fault_perm_tower(sc: Scenario) -> tuple[bool, dict]:
    """Negative control: a deliberately incompatible tower must be rejected."""
    M = sc.manifold
    if sc.depth < 2:
        return False, {"error": "fault injection needs depth >= 2"}
    base = random_perm_tower(M, sc.depth, sc.seed)
    levels = list(base.levels)
    top = levels[-1]
    points = top.domain.sorted_points()
    if len(points) < 2:
        return False, {"error": "fault injection needs at least two points"}
    # swap two images in distinct level-(depth-1) fibers to break compatibility
    swapped = dict(top.mapping)
    a, b = None, None
    for i, x in enumerate(points):
        for y in points[i + 1 :]:
            if top(x).reduce(sc.depth - 1) != top(y).reduce(sc.depth - 1):
                a, b = x, y
                break
        if a is not None:
            break
    if a is None:
        return False, {"error": "could not construct a faulty tower"}
    swapped[a], swapped[b] = swapped[b], swapped[a]
    levels[-1] = LevelPerm(sc.depth, top.domain, swapped)
    try:
        check_perm_tower_compatibility(levels)
    except IncompatibleTower as exc:
        return False, {"violated_law": str(exc), "injected": True}
    return False, {"error": "faulty tower escaped the compatibility check"}


CHECKS = [
    ("level_rings.homomorphism", _check_ring_homomorphism),
    ("level_rings.cocycle", _check_ring_cocycle),
    ("level_rings.fiber_partition", _check_ring_fibers),
    ("manifold.connecting_surjectivity", _check_manifold_connecting),
    ("manifold.cardinality_closed_form", _check_manifold_cardinality),
    ("manifold.disjointness_guard", _check_manifold_disjointness_guard),
    ("manifold.fiber_partition", _check_manifold_fibers),
    ("function.polynomial_projection", _check_polynomial_projection),
    ("function.mahler_roundtrip", _check_mahler_roundtrip),
    ("function.composition_compat", _check_composition_compat),
    ("diff.group_axioms", _check_perm_group_axioms),
    ("diff.lift_section", _check_perm_lifts),
    ("diff.orders_divisibility", _check_perm_orders),
    ("diff.weak_metric", _check_weak_metric),
    ("loop.monoid_laws", _check_loop_monoid_laws),
    ("loop.canonical_complete", _check_loop_canonical),
    ("loop.connecting_hom", _check_loop_connecting),
    ("groth.embed_injective", _check_groth_embedding),
    ("groth.universal_property", _check_groth_universal),
    ("groth.rank_report", _check_groth_rank),
    ("groth.functorial", _check_groth_functorial),
    ("completion.character_hom", _check_characters),
    ("completion.complete_fixture", _check_complete_fixture),
    ("completion.baire_ultrametric", _check_baire_metric),
]


def run_verify(scenario: Scenario) -> dict:
    """Run every invariant check; the report is canonical for (config, seed)."""
    checks = list(CHECKS)
    if scenario.faults.get("permutation_tower"):
        checks.append(("faults.permutation_tower", _check_fault_perm_tower))
    results = []
    timings = []
    for name, fn in checks:
        started = time.monotonic()
        try:
            passed, witness = fn(scenario)
        except TowerError as exc:
            passed, witness = False, {"error": f"{type(exc).__name__}: {exc}"}
        timings.append((name, int((time.monotonic() - started) * 1000)))
        results.append({"name": name, "status": "pass" if passed else "fail", "witness": witness})
    failed = [r["name"] for r in results if r["status"] == "fail"]
    report = {
        "artifact": {"name": ARTIFACT_NAME, "version": __version__},
        "command": "verify",
        "scenario": scenario.echo,
        "scenario_hash": scenario_hash(scenario),
        "checks": results,
        "summary": {
            "checks": len(results),
            "passed": len(results) - len(failed),
            "failed": len(failed),
            "status": "pass" if not failed else "fail",
        },
    }
    for name, ms in timings:
        print(f"[timing] {name}: {ms} ms", file=sys.stderr)
    return report


def scenario_hash(scenario: Scenario) -> str:
    return hashlib.sha256(canonical_json(scenario.echo).encode()).hexdigest()


def canonical_json(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _comparisons(scenario: Scenario) -> dict:
    """The rank and divisibility juxtapositions carried by every demo report."""
    codomain = _loop_tower(scenario)[scenario.depth]
    n_k = len(codomain.values.points)
    return {
        "free_rank": {
            "codomain_size": n_k,
            "computed_rank": free_rank(codomain),
            "claimed_rank": n_k,
        },
        "divisibility": divisibility_report(scenario.manifold, scenario.depth),
    }


def run_demo(scenario: Scenario, which: str) -> dict:
    """Build the JSON payload of one named demonstration."""
    if which == "diff-tower":
        body = _demo_diff_tower(scenario)
    elif which == "loop-table":
        body = _demo_loop_table(scenario)
    elif which == "complete":
        body = _demo_complete(scenario)
    elif which == "report":
        body = {"orders": [group_order(scenario.manifold, k) for k in range(1, scenario.depth + 1)]}
    else:
        raise UnknownCommand(f"unknown demonstration '{which}'")
    return {
        "artifact": {"name": ARTIFACT_NAME, "version": __version__},
        "command": which,
        "scenario": scenario.echo,
        "scenario_hash": scenario_hash(scenario),
        "comparisons": _comparisons(scenario),
        **body,
    }


def _demo_diff_tower(scenario: Scenario) -> dict:
    M, depth = scenario.manifold, scenario.depth
    towers = [
        random_perm_tower(M, depth, substream(scenario.seed, "demo.diff", i).randrange(2**63))
        for i in range(4)
    ]
    distances = []
    for i in range(len(towers)):
        for j in range(i + 1, len(towers)):
            d = weak_distance(towers[i], towers[j])
            distances.append({"pair": [i, j], "numerator": d.numerator, "denominator": d.denominator})
    return {
        "p": scenario.prime.p,
        "K": depth,
        "manifold": scenario.echo["balls"],
        "orders": [group_order(M, k) for k in range(1, depth + 1)],
        "divisibility": [divisibility_report(M, k) for k in range(1, depth + 1)],
        "sample_distances": distances,
    }


def _class_label(cls: LevelLoopClass) -> list:
    return [list(v.values()) for v in cls.values]


def _demo_loop_table(scenario: Scenario) -> dict:
    support = scenario.bounds["loop_support"]
    codomain = _loop_tower(scenario)[1]
    classes = enumerate_classes(
        support + 1, codomain, support, bound=scenario.bounds["enumeration_bound"]
    )
    index = {cls.values: i for i, cls in enumerate(classes)}
    table = []
    for a in classes:
        row = []
        for b in classes:
            product = a.wedge(b)
            row.append(index.get(product.values, -1))  # -1: product exceeds the bound
        table.append(row)
    return {
        "p": scenario.prime.p,
        "level": 1,
        "codomain_size": len(codomain.values.points),
        "trivial_monoid": len(codomain.values.points) == 1,
        "max_support": support,
        "class_count": len(classes),
        "class_count_formula": class_count(len(codomain.values.points), support),
        "classes": [_class_label(cls) for cls in classes],
        "cayley": table,
    }


def _demo_complete(scenario: Scenario) -> dict:
    prime = scenario.prime
    s = scenario.complete_spec["precision"]
    sequence = scenario.complete_spec["sequence"] or geometric_fixture(prime, s)
    limit = complete(sequence, prime, s)
    witness = density_witness(limit)
    characters = {
        f"s={t}": [[i, r.value] for i, r in character(witness, prime, t).entries]
        for t in range(1, s + 1)
    }
    return {
        "p": prime.p,
        "precision": s,
        "sequence_length": len(sequence),
        "limit": [[i, r.value] for i, r in limit.entries],
        "density_witness": [[i, v] for i, v in witness.entries],
        "characters": characters,
    }


def _loop_table_csv(report: dict) -> str:
    lines = ["class_index,label,level"]
    for i, label in enumerate(report["classes"]):
        lines.append(f'{i},"{json.dumps(label)}",{report["level"]}')
    lines.append("")
    header = ["wedge"] + [str(i) for i in range(report["class_count"])]
    lines.append(",".join(header))
    for i, row in enumerate(report["cayley"]):
        lines.append(",".join([str(i)] + [str(entry) for entry in row]))
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_bytes(text.encode())


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="padic-towers",
        description="Run exact invariant suites and demonstrations for p-adic level towers.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML scenario file (default: built-in scenario)")
    common.add_argument("--seed", type=int, help="override the scenario seed")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, text in [
        ("verify", "run every module's invariant suite"),
        ("diff-tower", "permutation tower orders, divisibility, sample distances"),
        ("loop-table", "loop class list and wedge Cayley table"),
        ("complete", "coordinatewise p-adic limit and its characters"),
        ("report", "rank and divisibility comparison report"),
    ]:
        subparsers.add_parser(name, parents=[common], help=text)
    args = parser.parse_args(argv)

    try:
        scenario = build_scenario(load_config(args.config), args.seed)
        if args.format == "csv" and args.command != "loop-table":
            raise ConfigInvalid("csv output is only available for the loop-table command")
        if args.command == "verify":
            report = run_verify(scenario)
            _emit(canonical_json(report), args.out)
            return 0 if report["summary"]["status"] == "pass" else 1
        report = run_demo(scenario, args.command)
        if args.format == "csv":
            _emit(_loop_table_csv(report), args.out)
        else:
            _emit(canonical_json(report), args.out)
        return 0
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
