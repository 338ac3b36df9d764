"""Typed error hierarchy.

Every error that can reach a user is one of these; the CLI serializes them
as ``{"error": <class name>, "message": ...}`` on stderr and exits 1.
"""


class HtgEvalError(Exception):
    """Base class for all domain errors raised by this package."""

    @property
    def code(self) -> str:
        return type(self).__name__


class SchemaError(HtgEvalError):
    """Input violates a declared schema (missing field, bad value, duplicate entry)."""


class DuplicateId(SchemaError):
    """A sample identifier occurs more than once."""


class FormatError(HtgEvalError):
    """Binary container is malformed (bad magic, version, or truncation)."""


class NonFiniteData(HtgEvalError):
    """Payload contains NaN or infinite values."""


class AlignmentError(HtgEvalError):
    """Row count and identifier table disagree, or aligned inputs diverge."""


class ShapeError(HtgEvalError):
    """Operands have incompatible shapes or dimensions."""


class InsufficientSamples(HtgEvalError):
    """Too few samples for the requested statistic."""


class NumericalError(HtgEvalError):
    """A numerical routine failed or produced an out-of-contract result."""


class WriterMismatch(HtgEvalError):
    """Writer identifier key sets differ between compared tables."""


class IdenticalImages(HtgEvalError):
    """PSNR is undefined for identical images (zero MSE)."""


class EmptyReference(HtgEvalError):
    """A transcription record has an empty reference string."""


class NoRecords(HtgEvalError):
    """An operation requiring records received an empty list."""


class SplitViolation(HtgEvalError):
    """A record's sample lies outside the declared split."""


class VocabViolation(HtgEvalError):
    """A record's reference word is not tagged as required (IV/OOV protocol breach)."""
