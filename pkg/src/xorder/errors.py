"""Exception hierarchy shared by every module."""

from __future__ import annotations


class XOrderError(Exception):
    """Base class for all errors raised by xorder."""


class ValidationError(XOrderError, ValueError):
    """A distribution, system or config document is malformed."""


class ConstraintViolation(ValidationError):
    """F-G-M coefficients violate sum |c_ij| <= 1."""


class UnsupportedDependenceError(ValidationError):
    """F-G-M dependence requested on a node that cannot carry it."""


class DepthError(ValidationError):
    """System tree nests deeper than the supported two levels."""


class DomainError(XOrderError, ValueError):
    """An argument lies outside the domain of the requested functional."""


class UnboundedQuantileError(DomainError):
    """Bisection could not bracket the quantile below the configured x_max."""


class SingularPointError(DomainError):
    """The density vanishes where it appears in a denominator."""


class NoExponentialAsymptoteError(XOrderError):
    """A tail has no expansion in terms N x^p exp(-(lam x)^alpha)."""


class RangeError(XOrderError):
    """Every probe of a limit sequence underflowed."""


class ConfigurationError(XOrderError, ValueError):
    """Numerical settings are out of range (grid too small, bad tolerance)."""
