"""Exception hierarchy.

Two marker bases group the errors by how the command line reports them:
``HypothesisViolation`` covers parameter sets that break a model
assumption (exit code 2), ``ResourceBudget`` covers runs that would need
more lattice points or grid resolution than allowed (exit code 3).
"""


class CblabError(Exception):
    """Base class for all package errors."""


class DomainError(CblabError):
    """Argument outside the mathematical domain of an operation."""


class HypothesisViolation(CblabError):
    """A model hypothesis needed by the requested analysis fails."""


class DegenerateError(HypothesisViolation):
    """Curve inversion requested with j12 = 0 (decoupled groups)."""


class DegenerateHessian(HypothesisViolation):
    """Hessian with zero off-diagonal entry; the eigenbasis is ambiguous."""


class NoCriticalPoint(HypothesisViolation):
    """No coupling closes the critical window for the given alpha, j11, j22."""


class NotCritical(HypothesisViolation):
    """Parameters do not sit in the critical window."""


class NonPositiveCoefficient(HypothesisViolation):
    """A limit coefficient that must be positive came out non-positive."""


class ResourceBudget(CblabError):
    """A resolution or memory budget was exceeded."""


class BudgetExceeded(ResourceBudget):
    """Lattice larger than the enumeration budget."""


class GridTooCoarse(ResourceBudget):
    """Grid sweep could not separate adjacent solutions."""
