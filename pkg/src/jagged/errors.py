"""Exception types raised across the package."""

from __future__ import annotations


class JaggedError(Exception):
    """Base class for every error raised by this package."""


def _format_path(path) -> str:
    if not path:
        return "root"
    return "root" + "".join(path)


# layout -------------------------------------------------------------------


class StructureError(JaggedError, ValueError):
    """A layout invariant does not hold.

    ``validate`` returns instances of this class; everything else raises them.
    """

    def __init__(self, path, message):
        self.path = tuple(path)
        self.message = message
        super().__init__(f"{message} (at {_format_path(self.path)})")


class FieldNotFoundError(JaggedError, KeyError):
    def __init__(self, name, available, note=None):
        self.name = name
        self.available = list(available)
        self.note = note
        super().__init__(name)

    def __str__(self):
        if self.note:
            return f"no field {self.name!r}: {self.note}; fields: {self.available}"
        return f"no field {self.name!r}; available fields: {self.available}"


class NoRecordError(JaggedError, LookupError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"cannot project field {name!r}: no record at any depth")


class EncodingError(JaggedError, ValueError):
    """A string-flagged byte run is not valid UTF-8."""


# slicing ------------------------------------------------------------------


class SliceError(JaggedError):
    """Base class for errors raised while applying selectors."""


class IndexOutOfRangeError(SliceError, IndexError):
    def __init__(self, index, length, path=(), position=None):
        self.index = index
        self.length = length
        self.path = tuple(path)
        self.position = position
        where = _format_path(self.path)
        if position is not None:
            where += f", sublist {position}"
        super().__init__(f"index {index} out of range for length {length} (at {where})")


class MissingValueError(SliceError, IndexError):
    def __init__(self, path=(), position=None):
        self.path = tuple(path)
        self.position = position
        super().__init__(
            f"cannot select an element of a missing value at position {position} "
            f"(at {_format_path(self.path)})"
        )


class MaskLengthMismatchError(SliceError, IndexError):
    def __init__(self, expected, got, path=(), position=None):
        self.expected = expected
        self.got = got
        self.path = tuple(path)
        self.position = position
        super().__init__(
            f"boolean mask of length {got} does not match dimension of length {expected} "
            f"(at {_format_path(self.path)})"
        )


class JaggedStructureMismatchError(SliceError, IndexError):
    def __init__(self, message, path=(), position=None):
        self.path = tuple(path)
        self.position = position
        super().__init__(f"{message} (at {_format_path(self.path)})")


class TooManySelectorsError(SliceError, IndexError):
    def __init__(self, remaining, path=()):
        self.remaining = remaining
        self.path = tuple(path)
        super().__init__(
            f"{remaining} selector(s) remain but the array has no more dimensions "
            f"(at {_format_path(self.path)})"
        )


class SelectorError(SliceError, TypeError):
    """A selector is malformed or used in an unsupported position."""


# elementwise --------------------------------------------------------------


class NonNumericLeafError(JaggedError, TypeError):
    def __init__(self, path, kind):
        self.path = tuple(path)
        self.kind = kind
        super().__init__(f"cannot apply a numeric function to {kind} data (at {_format_path(self.path)})")


class StructureMismatchError(JaggedError, ValueError):
    def __init__(self, path, message):
        self.path = tuple(path)
        super().__init__(f"{message} (at {_format_path(self.path)})")


# builder ------------------------------------------------------------------


class BuilderError(JaggedError):
    """Base class for builder protocol errors. ``offset`` is set by JSON ingestion."""

    offset = None


class FillStateError(BuilderError, ValueError):
    def __init__(self, expected, got):
        self.expected = expected
        self.got = got
        super().__init__(f"fill-state error: expected {expected}, got {got}")


class DuplicateFieldError(BuilderError, ValueError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"field {name!r} appears twice in one record")


class UnsupportedValueError(BuilderError, TypeError):
    def __init__(self, value):
        self.value = value
        super().__init__(f"cannot convert value of type {type(value).__name__}")


class IntegerOverflowError(BuilderError, OverflowError):
    def __init__(self, literal, offset=None):
        self.literal = literal
        self.offset = offset
        at = "" if offset is None else f" at offset {offset}"
        super().__init__(f"integer {literal} does not fit in 64 bits{at}")


# JSON ---------------------------------------------------------------------


class ParseError(JaggedError, ValueError):
    def __init__(self, offset, message):
        self.offset = offset
        self.message = message
        super().__init__(f"{message} at offset {offset}")


class DepthLimitError(ParseError):
    def __init__(self, offset, limit):
        self.limit = limit
        super().__init__(offset, f"nesting depth exceeds limit of {limit}")


class StructureDeviationError(ParseError):
    """Input is valid JSON but not uniformly nested lists of numbers."""


# storage ------------------------------------------------------------------


class FormatError(JaggedError, ValueError):
    """A container on disk is malformed or of an unsupported version."""


class ContainerIOError(JaggedError, OSError):
    pass
