"""Exception taxonomy shared by the pipeline, the service, and the CLI.

Three families, matching the CLI exit codes: usage problems (bad arguments
or configuration, exit 1), data problems (malformed records, bad stores,
inconsistent shapes, exit 2), and I/O problems (missing or unreadable
files, exit 3).
"""

from __future__ import annotations


class TweetFuseError(Exception):
    """Base class for all errors raised by this package."""

    kind = "data"


class UsageError(TweetFuseError):
    """Invalid arguments, flags, or configuration values."""

    kind = "usage"


class DataError(TweetFuseError):
    """Malformed or inconsistent input data."""

    kind = "data"


class StoreIOError(TweetFuseError):
    """Filesystem-level failure while reading or writing artifacts."""

    kind = "io"


class RecordParseError(DataError):
    """A single input line could not be parsed into a tweet record."""

    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class DecodeError(DataError):
    """An image file exists but could not be decoded."""

    def __init__(self, path: str, reason: str = ""):
        self.path = str(path)
        msg = f"cannot decode image {path}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)
