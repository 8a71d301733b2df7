"""Exception types shared across the package."""


class QgkError(Exception):
    """Base class for all domain errors raised by this package."""


class ZeroVector(QgkError):
    """A vector with zero norm cannot be amplitude-encoded."""


class DimensionOverflow(QgkError):
    """A state would exceed the amplitude-count ceiling."""


class LayoutMismatch(QgkError):
    """Two states do not live on compatible register layouts."""


class AddressOutOfRange(QgkError):
    """A memory address is outside the stored dataset."""


class NotNormalized(QgkError):
    """Supplied amplitudes are too far from unit norm."""


class ZeroBranch(QgkError):
    """Post-selection on a branch whose probability is numerically zero."""


class OverflowGuard(QgkError):
    """The truncation-order search exceeded its hard cap."""


class TruncationTooTight(QgkError):
    """No representable truncation order meets the requested precision."""


class SingularSystem(QgkError):
    """The training linear system is singular or nearly so."""


class InvalidLabels(QgkError):
    """Labels are not the expected two-class +1/-1 scheme."""
