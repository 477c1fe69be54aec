"""Exception types shared across the level-tower modules."""


class TowerError(Exception):
    """Base class for structural errors raised by this package."""


class LevelMismatch(TowerError):
    """Operands live at incompatible primes or levels."""


class PrecisionExceeded(TowerError):
    """A requested level exceeds the stored digit precision."""


class LevelTooSmall(TowerError):
    """The level does not yet resolve every ball of the manifold."""


class PointNotInManifold(TowerError):
    """A residue point lies outside the manifold's level image."""


class NotLevelCompatible(TowerError):
    """A point oracle maps one level fiber into several codomain fibers."""


class DomainMismatch(TowerError):
    """Two towers or maps do not share the required domain/codomain."""


class UnequalFibers(TowerError):
    """Fibers are not all of equal size, so no uniform lift exists."""


class IncompatibleTower(TowerError):
    """A family of level maps does not commute with the connecting reductions."""


class InfiniteSupport(TowerError):
    """A based map's support exceeds the configured finite bound."""


class BasePointMoved(TowerError):
    """A based map does not send the base point to the distinguished zero."""


class TooLarge(TowerError):
    """An enumeration would exceed the configured size bound."""


class NotCauchy(TowerError):
    """No tail of the sequence stabilizes at the requested precision."""


class OrderUndefined(TowerError):
    """Index labels admit no total order usable for the Baire metric."""


class NotHomomorphism(TowerError):
    """A claimed homomorphism fails additivity on the generating set."""


class ConfigInvalid(TowerError):
    """A scenario configuration failed validation."""


class UnknownCommand(TowerError):
    """An unrecognized demonstration name was requested."""
