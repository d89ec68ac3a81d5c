"""Exception and warning types shared across the package.

Every error raised by lexivar derives from :class:`LexivarError`, so callers
(notably the CLI) can distinguish user/data problems from genuine bugs.
Conditions that degrade a result without invalidating it are warnings.
"""

from __future__ import annotations


class LexivarError(Exception):
    """Base class for all errors raised by this package.

    ``stage`` is filled in by the inspection pipeline so that an error
    surfacing from deep inside a module still names the step it broke in.
    """

    stage: str | None = None

    def __str__(self) -> str:
        base = super().__str__()
        if self.stage:
            return f"[{self.stage}] {base}"
        return base


# dataset loading / column selection

class DatasetNotFoundError(LexivarError):
    pass


class EncodingError(LexivarError):
    pass


class MalformedRowError(LexivarError):
    """A row does not match the table width; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class UnknownColumnError(LexivarError):
    pass


class TooManyTextColumnsError(LexivarError):
    pass


class OverlappingSelectionError(LexivarError):
    pass


class EmptyTableError(LexivarError):
    pass


# unitization

class UnknownTokenizerError(LexivarError):
    pass


class InvalidTokenError(LexivarError):
    pass


class StopwordFileNotFoundError(LexivarError):
    pass


class WindowTooSmallError(LexivarError):
    pass


# variables

class NonNumericValueError(LexivarError):
    pass


class UnknownVariableColumnError(LexivarError):
    pass


# metrics

class EmptyCorpusError(LexivarError):
    pass


class SingleClassError(LexivarError):
    pass


# inspection / interchange

class ConfigError(LexivarError):
    pass


class SchemaError(LexivarError):
    """Interchange document violates the schema; carries the JSON path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


# chart planning / rendering

class UnsupportedCombinationError(LexivarError):
    """No chart rule matches the variable signature; carries remediation text."""

    def __init__(self, message: str, remediation: str):
        super().__init__(f"{message} ({remediation})")
        self.remediation = remediation


class MissingGeometryError(LexivarError):
    pass


class InvalidPatternError(LexivarError):
    pass


# warnings

class LexivarWarning(UserWarning):
    pass


class DegenerateRangeWarning(LexivarWarning):
    pass


class DegenerateNormalizationWarning(LexivarWarning):
    pass


class EmptySliceWarning(LexivarWarning):
    pass
