"""Exception types shared across the toolkit."""


class EigenSpineError(Exception):
    """Base class for toolkit-specific failures."""


class EmptyInputError(EigenSpineError, ValueError):
    """An operation received an empty collection where data is required."""


class DimensionMismatchError(EigenSpineError, ValueError):
    """Inputs disagree on vector, list, or image dimensions."""


class InvalidRankError(EigenSpineError, ValueError):
    """Requested basis rank is outside the valid range for the data."""


class RankDeficientError(EigenSpineError, ValueError):
    """The contour matrix cannot support the requested rank."""


class DegenerateEdgeError(EigenSpineError, ValueError):
    """An endplate edge collapses to a point, so no tilt is defined."""


class TooFewInstancesError(EigenSpineError, ValueError):
    """A spine sample does not carry enough vertebrae for the operation."""


class EmptyImageError(EigenSpineError, ValueError):
    """An image with zero pixels was supplied."""


class EmptyReferenceSetError(EigenSpineError, ValueError):
    """A privacy audit needs at least one reference image."""


class InfeasibleSpecError(EigenSpineError, ValueError):
    """A synthetic spine specification cannot be placed on its canvas."""


class MissingStatsError(EigenSpineError, ValueError):
    """Corpus statistics required by a filter are unavailable."""


class NoPredictorError(EigenSpineError, RuntimeError):
    """The engine was asked to iterate without an attached predictor."""


class BlockedOnReviewError(EigenSpineError, RuntimeError):
    """Strict-mode iteration cannot proceed while review items are pending."""

    def __init__(self, pending_ids):
        self.pending_ids = tuple(pending_ids)
        shown = ", ".join(self.pending_ids[:5])
        super().__init__(
            f"{len(self.pending_ids)} review item(s) pending: {shown}"
        )


class IdMismatchError(EigenSpineError, KeyError):
    """Predicted and reference datasets disagree on sample ids."""


class AnnotationFormatError(EigenSpineError, ValueError):
    """An annotation, ledger, or basis file violates the expected schema."""
