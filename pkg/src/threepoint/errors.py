"""Exception hierarchy for the three-point energy toolkit.

Library code raises; only the command line turns these into exit codes.
"""

from __future__ import annotations


class ThreePointError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(ThreePointError, ValueError):
    """A configuration (points + weights) failed validation."""


class DomainError(ThreePointError, ValueError):
    """A parameter lies outside the domain of a formula (h < 2, p <= 0, ...)."""


class DimensionMismatchError(DomainError):
    """Points, kernels or configurations disagree on the ambient dimension."""


class KernelError(DomainError):
    """Invalid kernel specification or PSD block."""


class NoCapError(ThreePointError):
    """The support does not lie in an open hemisphere, so no cap exists."""


class TheoremViolation(ThreePointError, AssertionError):
    """A computed result contradicts a proven bound (energy floor, packing size)."""


class OutputError(ThreePointError, OSError):
    """A report, configuration or manifest could not be written."""
