"""Package-wide exception types."""


class GeomlabError(Exception):
    """Base class for geomlab errors."""


class BudgetExceededError(GeomlabError):
    """An exact enumeration or quadrature product would exceed the evaluation budget."""


class SpaceDefinitionError(GeomlabError):
    """A space definition (JSON document or CLI mnemonic) could not be parsed."""
