"""Exception types shared across the package.

Exit-code mapping used by the CLI: ConfigError -> 2,
BudgetError/ContaminationError -> 3, everything else numeric -> 1.
"""


class QbnfError(Exception):
    """Base class for package errors."""


class DegenerateFrequencyError(QbnfError):
    """Frequencies are real-proportional; outside the admissible domain."""


class GridMismatchError(QbnfError):
    """Operands live on different phase grids."""


class BudgetError(QbnfError):
    """A configured cost budget (grid size, order, series length) was exceeded."""


class ContaminationError(QbnfError):
    """Truncation-boundary effects reached the requested reporting window."""


class NormOverflowError(QbnfError):
    """Exponentially weighted integrand exceeds the representable range."""


class TrackingAmbiguityError(QbnfError):
    """Eigenvalue continuation found two candidates too close to resolve."""


class SeriesDivergenceError(QbnfError):
    """A truncated operator series failed to show decreasing term norms."""


class ConfigError(QbnfError):
    """Run configuration failed validation."""
