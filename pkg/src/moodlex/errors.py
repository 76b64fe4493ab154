"""Exception hierarchy.

Every error raised on bad input data derives from :class:`DataError`, which the
command-line front end maps to exit code 2.
"""


class MoodlexError(Exception):
    """Base class for all package errors."""


class DataError(MoodlexError):
    """Input data could not be used."""


class InvalidParameter(MoodlexError, ValueError):
    pass


class EncodingUndecodable(DataError):
    def __init__(self, source_id: str, tried: tuple[str, ...]):
        self.source_id = source_id
        self.tried = tried
        super().__init__(f"{source_id}: no candidate encoding decodes cleanly (tried {', '.join(tried)})")


class MalformedLine(DataError):
    def __init__(self, line_no: int, reason: str = "", source: str | None = None):
        self.line_no = line_no
        self.source = source
        where = f"{source}:{line_no}" if source else f"line {line_no}"
        super().__init__(f"{where}: malformed line" + (f" ({reason})" if reason else ""))


class IntensityOutOfRange(DataError):
    def __init__(self, line_no: int, value: float, source: str | None = None):
        self.line_no = line_no
        self.value = value
        where = f"{source}:{line_no}" if source else f"line {line_no}"
        super().__init__(f"{where}: intensity {value!r} outside [0, 1]")


class InvalidPatch(DataError):
    pass


class EmptyDocument(DataError):
    pass


class EmptySegment(DataError):
    pass


class EmptyCorpus(DataError):
    pass


class MismatchedDocuments(DataError):
    pass


class MalformedHeader(DataError):
    pass


class DimensionMismatch(DataError):
    def __init__(self, line_no: int, expected: int, got: int):
        self.line_no, self.expected, self.got = line_no, expected, got
        super().__init__(f"line {line_no}: expected {expected} components, got {got}")


class ZeroVector(MoodlexError, ValueError):
    pass
