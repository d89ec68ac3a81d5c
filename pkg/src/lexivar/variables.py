"""Variable declarations, binning, and per-row value tuples.

Each declared variable has a representational type (nominal, ordinal,
quantitative, coordinate) and a visualization semantics (temporal, spatial,
general). Every logical row maps to one joint tuple over all declared
variables; tuples are the "class" axis of the association metrics and are
serialized to stable string keys for the interchange document.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

from .dataset import TEXT_SOURCE_VARIABLE, AnalysisTable, LogicalRow
from .errors import (
    DegenerateRangeWarning,
    NonNumericValueError,
    UnknownVariableColumnError,
)

VTYPES = ("nominal", "ordinal", "quantitative", "coordinate")
SEMANTICS = ("temporal", "spatial", "general")
AXES = ("latitude", "longitude")

# Missing cells (empty strings) become their own category instead of dropping
# the row: missingness is often exactly what a bias analysis is looking for.
MISSING_VALUE = "∅"

TUPLE_SEPARATOR = "::"


@dataclass(frozen=True)
class VariableDecl:
    name: str
    vtype: str = "nominal"
    semantics: str = "general"
    bins: int | None = None
    axis: str | None = None

    def __post_init__(self):
        if self.vtype not in VTYPES:
            raise ValueError(f"unknown variable type: {self.vtype!r}")
        if self.semantics not in SEMANTICS:
            raise ValueError(f"unknown variable semantics: {self.semantics!r}")
        if self.bins is not None:
            if self.vtype not in ("quantitative", "coordinate"):
                raise ValueError("bins apply to quantitative/coordinate variables only")
            if self.bins < 1:
                raise ValueError("bins must be >= 1")
        if self.axis is not None:
            if self.axis not in AXES:
                raise ValueError(f"axis must be latitude or longitude, got {self.axis!r}")
            if self.vtype != "coordinate":
                raise ValueError("axis applies to coordinate variables only")
        if self.vtype == "coordinate" and self.semantics != "spatial":
            raise ValueError("coordinate variables must have spatial semantics")


def text_source_decl() -> VariableDecl:
    """The implicit variable distinguishing the two text columns of a run."""
    return VariableDecl(name=TEXT_SOURCE_VARIABLE, vtype="nominal", semantics="general")


# ---------------------------------------------------------------------------
# Tuple keys
#
# Values are joined with "::". Backslashes and colons inside values are
# escaped ("\\" and "\:"), so a literal "::" appears as "\:\:" and the
# separator is the only place two bare colons can ever be adjacent. That
# keeps serialization injective for any value strings.
# ---------------------------------------------------------------------------

def _escape_value(value: str) -> str:
    return value.replace("\\", "\\\\").replace(":", "\\:")


def serialize_tuple(values: Sequence[str]) -> str:
    return TUPLE_SEPARATOR.join(_escape_value(v) for v in values)


def deserialize_tuple(key: str, arity: int) -> tuple[str, ...]:
    """Invert :func:`serialize_tuple`; ``arity`` disambiguates the empty key."""
    if arity == 0:
        if key != "":
            raise ValueError(f"expected empty key for arity 0, got {key!r}")
        return ()
    values: list[str] = []
    current: list[str] = []
    i = 0
    while i < len(key):
        ch = key[i]
        if ch == "\\":
            if i + 1 >= len(key):
                raise ValueError(f"dangling escape in tuple key {key!r}")
            current.append(key[i + 1])
            i += 2
        elif ch == ":" and i + 1 < len(key) and key[i + 1] == ":":
            values.append("".join(current))
            current = []
            i += 2
        else:
            current.append(ch)
            i += 1
    values.append("".join(current))
    if len(values) != arity:
        raise ValueError(
            f"tuple key {key!r} has {len(values)} values, expected {arity}"
        )
    return tuple(values)


@dataclass(frozen=True)
class ValueTuple:
    values: tuple[str, ...]

    @property
    def key(self) -> str:
        return serialize_tuple(self.values)


# ---------------------------------------------------------------------------
# Binning
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BinScheme:
    """Equal-width bins over [min, max]; the last bin is right-closed."""

    min: float
    max: float
    k: int

    @property
    def width(self) -> float:
        return (self.max - self.min) / self.k

    def index_of(self, value: float) -> int:
        if self.max == self.min:
            return 0
        idx = int(math.floor((value - self.min) / self.width))
        return min(max(idx, 0), self.k - 1)

    def label_of(self, index: int) -> str:
        lo = self.min + index * self.width
        hi = self.min + (index + 1) * self.width
        if index == self.k - 1:
            return f"[{lo:.6f}, {self.max:.6f}]"
        return f"[{lo:.6f}, {hi:.6f})"

    def labels(self) -> list[str]:
        return [self.label_of(i) for i in range(self.k)]


def parse_number(cell: str, context: str = "") -> float:
    try:
        value = float(cell)
    except (TypeError, ValueError):
        raise NonNumericValueError(
            f"{context + ': ' if context else ''}cannot parse {cell!r} as a number"
        ) from None
    if not math.isfinite(value):
        raise NonNumericValueError(
            f"{context + ': ' if context else ''}non-finite value {cell!r}"
        )
    return value


def bin_values(values: Sequence[float], k: int) -> list[str]:
    """Map numbers to equal-width bin labels computed from the data range.

    Labels render bounds at 6 decimal places so identical data always
    produces identical keys. A degenerate range (min == max with k > 1)
    puts everything in bin 0 and warns instead of failing.
    """
    if not values:
        raise ValueError("values must be non-empty")
    if k < 1:
        raise ValueError("k must be >= 1")
    for v in values:
        if not math.isfinite(v):
            raise NonNumericValueError(f"non-finite value {v!r}")
    scheme = BinScheme(min=min(values), max=max(values), k=k)
    if scheme.min == scheme.max and k > 1:
        warnings.warn(
            f"all values equal {scheme.min:g}; every value maps to bin 0",
            DegenerateRangeWarning,
        )
    return [scheme.label_of(scheme.index_of(v)) for v in values]


# ---------------------------------------------------------------------------
# Joint tuple assignment
# ---------------------------------------------------------------------------

def _numeric_aware_key(value: str):
    """Sort key: numbers compare numerically and precede other strings."""
    try:
        num = float(value)
        if math.isfinite(num):
            return (0, num, value)
    except ValueError:
        pass
    return (1, 0.0, value)


def sort_values(values: Iterable[str]) -> list[str]:
    return sorted(values, key=_numeric_aware_key)


def _column_values(rows: list[LogicalRow], decl: VariableDecl) -> list[str]:
    out = []
    for row in rows:
        if decl.name not in row.values:
            raise UnknownVariableColumnError(
                f"variable {decl.name!r} is not a selected column"
            )
        out.append(row.values[decl.name])
    return out


def _validate_coordinate(decl: VariableDecl, value: float) -> None:
    if decl.axis == "latitude" and not -90.0 <= value <= 90.0:
        raise NonNumericValueError(
            f"{decl.name}: latitude {value:g} outside [-90, 90]"
        )
    if decl.axis == "longitude" and not -180.0 <= value <= 180.0:
        raise NonNumericValueError(
            f"{decl.name}: longitude {value:g} outside [-180, 180]"
        )


def assign_tuples(
    table: AnalysisTable | list[LogicalRow],
    decls: Sequence[VariableDecl],
) -> tuple[list[ValueTuple], dict[str, list[str]]]:
    """Map every logical row to its joint value tuple.

    Returns the per-row tuples plus a per-variable inventory of distinct
    values in display order: bin order for binned variables, numeric-aware
    sort otherwise. Quantitative and coordinate cells must parse as finite
    numbers (missing cells become the dedicated missing category); binned
    variables get equal-width bin labels computed over the observed range.
    """
    rows = list(table.logical_rows()) if isinstance(table, AnalysisTable) else table

    per_variable: list[list[str]] = []
    inventories: dict[str, list[str]] = {}
    for decl in decls:
        raw = _column_values(rows, decl)
        if decl.vtype in ("quantitative", "coordinate"):
            numbers: dict[int, float] = {}
            for i, cell in enumerate(raw):
                if cell == "":
                    continue
                value = parse_number(cell, context=f"{decl.name} row {i + 1}")
                if decl.vtype == "coordinate":
                    _validate_coordinate(decl, value)
                numbers[i] = value
            if decl.bins is not None and numbers:
                scheme = BinScheme(
                    min=min(numbers.values()), max=max(numbers.values()), k=decl.bins
                )
                if scheme.min == scheme.max and decl.bins > 1:
                    warnings.warn(
                        f"{decl.name}: all values equal; every value maps to bin 0",
                        DegenerateRangeWarning,
                    )
                values = [
                    scheme.label_of(scheme.index_of(numbers[i]))
                    if i in numbers
                    else MISSING_VALUE
                    for i in range(len(raw))
                ]
                ordered = [
                    label
                    for label in scheme.labels()
                    if label in set(values)
                ]
                if MISSING_VALUE in values:
                    ordered.append(MISSING_VALUE)
            else:
                values = [
                    raw[i] if i in numbers else MISSING_VALUE for i in range(len(raw))
                ]
                ordered = sort_values(set(values))
        else:
            values = [cell if cell != "" else MISSING_VALUE for cell in raw]
            ordered = sort_values(set(values))
        per_variable.append(values)
        inventories[decl.name] = ordered

    tuples = [
        ValueTuple(values=tuple(per_variable[j][i] for j in range(len(decls))))
        for i in range(len(rows))
    ]
    return tuples, inventories
