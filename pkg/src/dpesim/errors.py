"""Error classes shared across the package.

The CLI maps these onto distinct exit codes, so raising the right class
matters: ConfigError -> 2, NumericalError -> 3, ResourceError -> 4.
"""

from __future__ import annotations


class DpesimError(Exception):
    """Base class for package errors."""


class ConfigError(DpesimError):
    """Invalid configuration, specs, or input file schema."""


class NumericalError(DpesimError):
    """Integration or quadrature failure (step too large, non-convergence)."""


class ResourceError(DpesimError):
    """Run would exceed memory or step budgets."""
