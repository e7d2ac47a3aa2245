"""Exception hierarchy.

Two families map onto the CLI exit codes: :class:`ParseError` (bad or missing
input artifacts, exit 2) and :class:`PreconditionError` (inputs that parse but
violate an operation's contract, exit 3).
"""

from __future__ import annotations


class MafError(Exception):
    """Base class for every error raised by this package."""


class ParseError(MafError):
    """An input artifact is missing or malformed."""

    def __init__(self, message: str, path: object | None = None) -> None:
        self.path = None if path is None else str(path)
        if self.path is not None:
            message = f"{self.path}: {message}"
        super().__init__(message)


class BadMagic(ParseError):
    pass


class BadHeader(ParseError):
    pass


class TruncatedFile(ParseError):
    pass


class TrailingData(ParseError):
    pass


class NonPositiveDims(ParseError):
    pass


class RunSumMismatch(ParseError):
    pass


class SchemaError(ParseError):
    """A JSON document does not follow its schema."""


class ArtifactMissing(ParseError):
    pass


class PreconditionError(MafError, ValueError):
    """Inputs are well formed but violate an operation's precondition."""


class DimensionMismatch(PreconditionError):
    pass


class NoValidPixels(PreconditionError):
    pass


class EmptySequence(PreconditionError):
    pass


class OutOfRange(PreconditionError):
    pass


class WindowCountMismatch(PreconditionError):
    pass


class NoCandidateEmbeddings(PreconditionError):
    pass


class TooFewCandidates(PreconditionError):
    pass


class UnorderedVideo(PreconditionError):
    pass


class InfeasiblePartition(PreconditionError):
    pass


class EmptySide(PreconditionError):
    pass
