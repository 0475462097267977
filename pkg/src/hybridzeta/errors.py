"""Exception hierarchy shared by every module."""


class HybridZetaError(Exception):
    """Base class; the CLI prints the subclass name on failure."""


class UnsupportedHeight(HybridZetaError):
    pass


class BudgetExceeded(HybridZetaError):
    pass


class CapacityExceeded(HybridZetaError):
    pass


class TableTooSmall(HybridZetaError):
    pass


class DomainError(HybridZetaError, ValueError):
    pass


class IllConditioned(HybridZetaError):
    pass


class TailDiverges(HybridZetaError):
    pass


class ConfigInvalid(HybridZetaError):
    pass


class SchemaMismatch(HybridZetaError):
    pass
