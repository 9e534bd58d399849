"""Exception hierarchy shared by all modules.

Error names follow the contracts of the public operations: callers are
expected to catch these by name, so they are deliberately short.
"""


class BCNError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInput(BCNError):
    """An argument violates a documented precondition."""


class NumericalFailure(BCNError):
    """A computation produced non-finite values or an unusable result."""


class NotOnLeaf(BCNError):
    """A matrix does not admit the signature factorization b^dag J b."""


class ChamberViolation(BCNError):
    """Radial coordinates are not strictly decreasing (particle collision)."""


class SeparationViolation(BCNError):
    """The pairwise separation inequality fails; a radicand is non-positive."""


class InternalInconsistency(BCNError):
    """Derived quantities disagree beyond tolerance; indicates a caller bug."""


class DegenerateElement(BCNError):
    """A group element has coinciding or unit radial singular values."""


class NotOnConstraintSurface(BCNError):
    """A group element fails the constraint-surface residual checks."""
