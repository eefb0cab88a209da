"""Exception hierarchy for the CEP pricing engine."""

from typing import Optional

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3


class CepError(Exception):
    """Base class for all pricing-engine errors."""


class ValidationError(CepError, ValueError):
    """A value violates a domain invariant.

    Attributes:
        field: Name of the first violated field
    """

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class CurrencyMismatchError(CepError, TypeError):
    """Arithmetic mixed two currencies (e.g. USD and XCE)."""


class ConfigError(CepError):
    """Run configuration is invalid."""

    def __init__(self, message: str, key: Optional[str] = None):
        super().__init__(f"{key}: {message}" if key else message)
        self.key = key


class DataError(CepError):
    """Input data is missing or malformed."""


class CurveError(DataError):
    """A term structure cannot be built or queried."""


class UnavailableError(CurveError):
    """A negative-emissions technology is queried before it is available."""


class PricingError(CepError):
    """A valuation is undefined for the given inputs."""


class NoSolutionError(CepError):
    """The financial net-zero equation has no solution."""


class TermsheetError(CepError):
    """A linked termsheet is structurally invalid."""
