"""Exact arithmetic for compatible towers over p-adic level rings.

The package realizes projective-limit constructions at finite precision:
finite level rings Z/p^k with their connecting homomorphisms, clopen
manifolds in Z_p^m and their level discretizations, compatible map and
permutation towers, finite-level loop monoids with their Grothendieck
groups, and p-adic completions of integer coordinate lattices.  All
arithmetic is exact; no floating point is used anywhere.
"""

from .errors import (
    BasePointMoved,
    ConfigInvalid,
    DomainMismatch,
    IncompatibleTower,
    InfiniteSupport,
    LevelMismatch,
    LevelTooSmall,
    NotCauchy,
    NotHomomorphism,
    NotLevelCompatible,
    OrderUndefined,
    PointNotInManifold,
    PrecisionExceeded,
    TooLarge,
    TowerError,
    UnequalFibers,
    UnknownCommand,
)
from .level_rings import PadicApprox, Prime, Residue, ResidueVector, fiber_enumerate
from .manifolds import Ball, ClopenManifold, LevelSet, full_level_set
from .function_towers import (
    LevelMap,
    MahlerSeries,
    MapTower,
    compose_towers,
    mahler_coefficients,
    mahler_eval,
    mahler_guard_precision,
    project_function,
    project_polynomial,
)
from .perm_towers import (
    BasedPermTower,
    LevelPerm,
    PermTower,
    divisibility_report,
    enumerate_level_perms,
    group_order,
    random_lift,
    random_perm_tower,
    weak_distance,
)
from .loop_monoids import (
    CodomainTower,
    LevelCodomain,
    LevelLoopClass,
    LoopClassTower,
    canonicalize,
    class_count,
    connecting,
    enumerate_classes,
    wedge_compose,
)
from .grothendieck import (
    GrothElem,
    connecting_hom,
    embed,
    free_rank,
    positive_negative_parts,
    universal_extend,
)
from .completion import (
    IntVector,
    PadicVector,
    baire_distance,
    character,
    complete,
    density_witness,
)

__version__ = "0.1.0"
