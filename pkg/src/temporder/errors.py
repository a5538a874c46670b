"""Exception hierarchy shared across the package."""


class TempOrderError(Exception):
    """Base class for all errors raised by this package."""


# --- grammar / rendering ---

class GrammarError(TempOrderError, ValueError):
    pass


class MissingSlot(GrammarError):
    pass


class OutOfDomain(GrammarError):
    pass


# --- normalization ---

class Unparseable(TempOrderError, ValueError):
    """Surface string is not in the template language."""


class OutOfRange(TempOrderError, ValueError):
    """Resolved date falls outside the supported 1900-2049 year range."""


# --- documents / trees ---

class MalformedTree(TempOrderError, ValueError):
    """Dependency heads contain a cycle or more than one root."""


class SpanOutOfBounds(TempOrderError, IndexError):
    pass


# --- neural kernel ---

class ShapeMismatch(TempOrderError, ValueError):
    pass


class EmptySequence(TempOrderError, ValueError):
    pass


class EmptyString(TempOrderError, ValueError):
    pass


class BadIndex(TempOrderError, IndexError):
    pass


class NonFinite(TempOrderError, FloatingPointError):
    """A NaN or Inf was produced; only raised with debug checks on."""


# --- configuration / modes ---

class ConfigInvalid(TempOrderError, ValueError):
    pass


class ModeMismatch(TempOrderError, ValueError):
    """Timex-dependent mode requested without a timex model."""


# --- serialization ---

class ParseError(TempOrderError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SchemaViolation(TempOrderError, ValueError):
    def __init__(self, message, field=None, line=None):
        prefix = []
        if line is not None:
            prefix.append(f"line {line}")
        if field is not None:
            prefix.append(f"field '{field}'")
        if prefix:
            message = ": ".join([", ".join(prefix), message])
        super().__init__(message)
        self.field = field
        self.line = line


class ChecksumMismatch(TempOrderError, ValueError):
    pass


class VersionUnsupported(TempOrderError, ValueError):
    pass


# --- stats ---

class LengthMismatch(TempOrderError, ValueError):
    pass
