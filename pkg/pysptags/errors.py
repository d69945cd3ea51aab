from os import PathLike


class PySpTagsError(ValueError):
    """Base class for all errors raised by pysptags."""


class EmptyReferenceError(PySpTagsError):
    """Raised when an error rate is requested over an empty reference."""


class EmptyInputError(PySpTagsError):
    """Raised when a statistic is requested over no samples."""


class MissingTimingsError(PySpTagsError):
    """Raised when a record lacks the word or tag timings a metric needs."""


class InvalidSpecError(PySpTagsError):
    """Raised when a synthetic corpus spec or failure model is inconsistent."""


class EnumerationCapExceeded(PySpTagsError):  # noqa: N818
    """Raised when embedding enumeration hits the configured cap.

    The embeddings found before the cap was reached are kept on the exception so
    callers can still report how many were seen.
    """

    def __init__(self, cap: int, embeddings: list):
        super().__init__(f"More than {cap} embeddings; enumeration stopped.")
        self.cap = cap
        self.embeddings = embeddings


class RecordParseError(PySpTagsError):
    """Raised when a corpus line cannot be parsed into a record."""

    def __init__(self, path: PathLike | str, lineno: int, reason: str):
        super().__init__(f"{path}:{lineno}: {reason}")
        self.path = path
        self.lineno = lineno
        self.reason = reason
