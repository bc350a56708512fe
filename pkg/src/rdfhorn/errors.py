"""Exception hierarchy. Every error carries a stable ``code`` string."""

from __future__ import annotations


class RdfHornError(Exception):
    code = "E_INTERNAL"

    def __init__(self, message: str = "", **details):
        super().__init__(message)
        self.details = details

    def __str__(self) -> str:
        msg = super().__str__()
        return f"{self.code}: {msg}" if msg else self.code


class RegimeError(RdfHornError):
    code = "E_REGIME"


class SkolemClashError(RdfHornError):
    code = "E_CLASH"


class NotHornError(RdfHornError):
    code = "E_NOT_HORN"


class EqualityUnsupportedError(RdfHornError):
    code = "E_EQ_UNSUPPORTED"


class UnsafeRuleError(RdfHornError):
    code = "E_UNSAFE"


class NotDefiniteError(RdfHornError):
    code = "E_NOT_DEFINITE"


class NoXMLLiteralError(RdfHornError):
    code = "E_NO_XMLLITERAL"


class NotStandardError(RdfHornError):
    code = "E_NOT_STANDARD"


class PreconditionError(RdfHornError):
    code = "E_PRECONDITION"


class UnsupportedError(RdfHornError):
    code = "E_UNSUPPORTED"


class ResourceLimitError(RdfHornError):
    """Raised when a fact-count or wall-clock ceiling is exceeded.

    ``stats`` holds the partial counters at the time of the abort.
    """

    code = "E_RESOURCE_LIMIT"

    def __init__(self, message: str = "", stats: dict | None = None):
        super().__init__(message)
        self.stats = dict(stats or {})


class ParseError(RdfHornError):
    code = "E_PARSE"

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class NotGroundError(RdfHornError):
    code = "E_NOT_GROUND"


class HigherOrderError(RdfHornError):
    code = "E_HIGHER_ORDER"


class ConfigError(RdfHornError):
    code = "E_CONFIG"
