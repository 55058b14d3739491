"""Exception taxonomy shared by every solver module.

All failures that a caller can act on get their own class so the CLI can
map them to exit codes without string matching.  Everything derives from
GraverOptError; plain bugs still surface as ordinary Python exceptions.
"""


class GraverOptError(Exception):
    """Base class for all library errors."""


class DimMismatch(GraverOptError):
    """Operands disagree on dimension."""


class ZeroVector(GraverOptError):
    """Operation undefined on the zero vector."""


class NotInKernel(GraverOptError):
    """Vector expected in ker(A) is not."""


class BoundExceeded(GraverOptError):
    """No decomposition within the requested number of terms."""


class EmptyInterval(GraverOptError):
    """Line search over an empty integer interval."""


class InfeasibleBase(GraverOptError):
    """Augmentation started from a point outside the box."""


class UnboundedObjective(GraverOptError):
    """Objective decreases along an unbounded feasible ray."""


class UnboundedBox(GraverOptError):
    """Finite bounds are required but missing."""


class Infeasible(GraverOptError):
    """No integer point satisfies the constraints."""


class NotStabilized(GraverOptError):
    """Empirical stabilization did not occur within the cap."""

    def __init__(self, cap, detail=""):
        self.cap = cap
        msg = "no stabilization up to cap=%d" % cap
        if detail:
            msg += " (%s)" % detail
        super().__init__(msg)


class NTooSmall(GraverOptError):
    """Requested block count is below the seed's type bound."""


class BalanceMismatch(GraverOptError):
    """Total supply differs from total demand."""


class InconsistentMargins(GraverOptError):
    """Prescribed line sums cannot belong to any array."""


class DomainError(GraverOptError):
    """Univariate function evaluated outside its tabulated range."""


class RationalPoint(GraverOptError):
    """Rational point fed to an integer-only evaluation."""


class SearchSpaceTooLarge(GraverOptError):
    """Brute-force enumeration would exceed the configured cell cap."""


class SchemaError(GraverOptError):
    """Malformed instance or result document."""
