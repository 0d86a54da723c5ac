"""
exceptions.py
=========================
Exception hierarchy shared by every module of the lab.

Domain errors subclass ``ValueError`` and convergence errors subclass
``RuntimeError`` so callers that only know the builtins still catch them.
Quadrature non-convergence is not an exception: it is reported through
``QuadratureResult.converged``.
"""


class LabError(Exception):
    """Base class of all lab errors."""


class DomainError(LabError, ValueError):
    """A parameter lies outside the domain of the requested operation."""


class DegenerateParameterError(DomainError):
    """Moduli for which a derived quantity (e.g. delta) is undefined."""


class SingularPointError(DomainError):
    """Evaluation requested at a registered pole of a density."""


class OracleUndefinedError(DomainError):
    """The pullback oracle is undefined at branch points of its square roots."""


class ConvergenceError(LabError, RuntimeError):
    """An iterative procedure (IVP, tail extrapolation) failed."""


class OutputValidationError(LabError):
    """A row or report about to be written holds a non-finite or malformed value."""
