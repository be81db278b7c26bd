"""Exception hierarchy shared across the package.

Two families matter to callers: ComputationError for structurally bad input
or an impossible request, and CeilingExceeded for work that was abandoned
because a configured resource ceiling would be crossed.  The CLI maps the
first family to exit code 2 and the second to exit code 3.
"""


class BtqError(Exception):
    """Base class for all package errors."""


class ComputationError(BtqError):
    """Structured computational error (CLI exit code 2)."""


class CeilingExceeded(BtqError):
    """A configured resource ceiling would be exceeded (CLI exit code 3)."""


# ffield
class SingularMatrix(ComputationError):
    """Matrix has zero determinant where an invertible one is required."""


class PrecisionExceeded(CeilingExceeded):
    """Required series truncation exceeds the configured ceiling."""


# scomplex
class NotASubset(ComputationError):
    """Requested vertex set is not a subset of the simplex's vertices."""


class VertexNotInSimplex(ComputationError):
    """Named vertex does not belong to the simplex."""


class WrongDimension(ComputationError):
    """Object has a simplicial dimension other than the one required."""


# homology
class InfiniteComplex(ComputationError):
    """Operation needs a finite complex or core but got an infinite one."""


class CoreUnavailable(ComputationError):
    """No finite core is available at the requested exhaustion index."""


class SupportExceedsCore(ComputationError):
    """Chain support sticks out of the finite core it must live on."""


class NonFiniteFiber(ComputationError):
    """Map has an infinite fiber where finiteness is required."""


class MissingRamificationData(ComputationError):
    """Pullback requested without ramification indices for some simplex."""


# building
class NotSmall(ComputationError):
    """Point set admits no small lift and so is not an apartment simplex."""


class SingularBasis(ComputationError):
    """Proposed basis rows are linearly dependent."""


# quotient
class AutGroupTooLarge(CeilingExceeded):
    """Automorphism group order exceeds the configured ceiling."""


class EnumerationCeiling(CeilingExceeded):
    """Simplex or orbit enumeration exceeds the configured ceiling."""


class LevelsIncompatible(ComputationError):
    """Level ideals are not nested, so no level map exists."""


class NotInSupport(ComputationError):
    """Requested polygon index carries no jump for this bundle."""


# modsym
class CollarCheckFailed(CeilingExceeded):
    """No collar radius up to the ceiling passed the shell check."""


class GeneratorCeiling(CeilingExceeded):
    """Generator enumeration for the span test exceeds the ceiling."""


class BadSimplexPoint(ComputationError):
    """Barycentric point is outside the standard simplex."""


class NotStabilized(ComputationError):
    """Exhaustion did not stabilize within the requested grid."""
