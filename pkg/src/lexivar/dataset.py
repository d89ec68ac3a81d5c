"""Tabular dataset loading and text/variable column selection.

Datasets are csv (comma-delimited, double-quote quoting, doubled quotes as
escapes) or tsv (tab-delimited, no quoting; tabs and newlines are illegal
inside cells) files in UTF-8, with an optional header row. Cells are kept
verbatim: no trimming, no type coercion. Tokenization owns normalization.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field
from typing import Iterator, Sequence, Union

from .errors import (
    ConfigError,
    DatasetNotFoundError,
    EmptyTableError,
    EncodingError,
    MalformedRowError,
    OverlappingSelectionError,
    TooManyTextColumnsError,
    UnknownColumnError,
)

# A column is addressed by header name (requires a header row) or 0-based index.
ColumnRef = Union[str, int]

TEXT_SOURCE_VARIABLE = "__text_source__"


@dataclass(frozen=True)
class DatasetSource:
    """Where a dataset comes from and how to parse it.

    ``location`` is a file path, or raw file content when ``inline`` is true.
    """

    location: str
    format: str = "csv"
    has_header: bool = True
    inline: bool = False

    def __post_init__(self):
        if self.format not in ("csv", "tsv"):
            raise ValueError(f"format must be 'csv' or 'tsv', got {self.format!r}")


@dataclass
class RawTable:
    """A rectangular table of string cells, with optional column names."""

    column_names: list[str] | None
    rows: list[list[str]]

    @property
    def n_columns(self) -> int:
        if self.column_names is not None:
            return len(self.column_names)
        return len(self.rows[0]) if self.rows else 0

    @property
    def n_rows(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class LogicalRow:
    """One unit of analysis: a text plus the variable cells attached to it.

    With two text columns every physical row yields up to two logical rows,
    and ``values`` carries the originating column name under
    ``__text_source__``.
    """

    text: str
    values: dict[str, str] = field(default_factory=dict)


@dataclass
class AnalysisTable:
    """Validated view of a dataset: 1-2 text columns plus variable columns."""

    text_names: list[str]
    text_columns: list[list[str]]
    variable_names: list[str]
    variable_columns: list[list[str]]
    row_count: int

    @property
    def has_text_source(self) -> bool:
        return len(self.text_names) == 2

    def logical_rows(self) -> Iterator[LogicalRow]:
        """Yield one row per non-empty text cell, in row-major order.

        Empty text cells are skipped rather than treated as zero-unit
        documents. Variable values apply identically to every text column
        of the same physical row.
        """
        for i in range(self.row_count):
            base = {
                name: col[i]
                for name, col in zip(self.variable_names, self.variable_columns)
            }
            for name, col in zip(self.text_names, self.text_columns):
                text = col[i]
                if text == "":
                    continue
                values = dict(base)
                if self.has_text_source:
                    values[TEXT_SOURCE_VARIABLE] = name
                yield LogicalRow(text=text, values=values)


def _open_stream(source: DatasetSource) -> io.TextIOBase:
    if source.inline:
        # inline content arrives already decoded; normalize line endings the
        # same way text-mode file reading would
        text = source.location.replace("\r\n", "\n").replace("\r", "\n")
        return io.StringIO(text)
    if not os.path.isfile(source.location):
        raise DatasetNotFoundError(f"dataset file not found: {source.location}")
    if source.format == "csv":
        # the csv module needs newline="" to handle quoted line breaks itself
        return open(source.location, encoding="utf-8", newline="")
    return open(source.location, encoding="utf-8")


def _iter_records(source: DatasetSource) -> Iterator[tuple[int, list[str]]]:
    """Stream (line number, cells) pairs one row at a time.

    Only the \\n and \\r\\n line endings delimit tsv rows; other Unicode line
    separators stay inside cells. Decoding failures surface as
    :class:`EncodingError` naming the file.
    """
    stream = _open_stream(source)
    try:
        if source.format == "tsv":
            for lineno, line in enumerate(stream, start=1):
                yield lineno, line.rstrip("\n").rstrip("\r").split("\t")
        else:
            reader = csv.reader(stream)
            for row in reader:
                if row:  # the csv module yields [] for blank lines
                    yield reader.line_num, row
    except UnicodeDecodeError as exc:
        raise EncodingError(
            f"{source.location} is not valid UTF-8: {exc}"
        ) from exc
    finally:
        stream.close()


def iter_dataset(source: DatasetSource) -> Iterator[list[str]]:
    """Stream data rows (header consumed and validated) without holding the
    whole file in memory; single-pass consumers can use this directly."""
    width: int | None = None
    saw_header = False
    for lineno, cells in _iter_records(source):
        if source.has_header and not saw_header:
            saw_header = True
            width = len(cells)
            continue
        if width is None:
            width = len(cells)
        elif len(cells) != width:
            raise MalformedRowError(
                lineno, f"expected {width} cells, found {len(cells)}"
            )
        yield cells
    if source.has_header and not saw_header:
        raise MalformedRowError(1, "missing header row")


def dataset_header(source: DatasetSource) -> list[str] | None:
    for _, cells in _iter_records(source):
        return cells if source.has_header else None
    if source.has_header:
        raise MalformedRowError(1, "missing header row")
    return None


def load_dataset(source: DatasetSource) -> RawTable:
    """Load a csv/tsv source into a rectangular table of string cells.

    The header row, when present, is consumed into column names. A ragged
    row raises :class:`MalformedRowError` naming its 1-based line number.
    """
    column_names = dataset_header(source)
    rows = list(iter_dataset(source))
    return RawTable(column_names=column_names, rows=rows)


def write_dataset(table: RawTable, format: str = "csv") -> str:
    """Serialize a table back to csv/tsv text (used for round-trip checks)."""
    if format == "tsv":
        lines = []
        header = [table.column_names] if table.column_names is not None else []
        for row in header + table.rows:
            for cell in row:
                if "\t" in cell or "\n" in cell or "\r" in cell:
                    raise ValueError("tsv cells cannot contain tabs or newlines")
            lines.append("\t".join(row))
        return "\n".join(lines) + "\n" if lines else ""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    if table.column_names is not None:
        writer.writerow(table.column_names)
    writer.writerows(table.rows)
    return buf.getvalue()


def resolve_column(table: RawTable, ref: ColumnRef) -> tuple[int, str]:
    """Resolve a name-or-index reference to (index, display name)."""
    if isinstance(ref, bool):  # bool is an int subclass; reject explicitly
        raise UnknownColumnError(f"invalid column reference: {ref!r}")
    if isinstance(ref, int):
        if ref < 0 or ref >= table.n_columns:
            raise UnknownColumnError(
                f"column index {ref} out of range (table has {table.n_columns} columns)"
            )
        name = table.column_names[ref] if table.column_names else f"col{ref}"
        return ref, name
    if table.column_names is None:
        raise UnknownColumnError(
            f"column {ref!r} addressed by name but the table has no header"
        )
    try:
        return table.column_names.index(ref), ref
    except ValueError:
        raise UnknownColumnError(f"unknown column: {ref!r}") from None


def select_columns(
    table: RawTable,
    texts: Sequence[ColumnRef],
    variables: Sequence[ColumnRef] = (),
) -> AnalysisTable:
    """Pick the text and variable columns to analyze, in the given order.

    Text and variable selections must be disjoint (and free of internal
    duplicates). With two text columns, logical rows carry the implicit
    ``__text_source__`` variable naming the originating column.
    """
    if len(texts) < 1:
        raise ConfigError("at least one text column is required")
    if len(texts) > 2:
        raise TooManyTextColumnsError(
            f"at most 2 text columns are supported, got {len(texts)}"
        )

    text_resolved = [resolve_column(table, ref) for ref in texts]
    var_resolved = [resolve_column(table, ref) for ref in variables]
    seen: set[int] = set()
    for idx, name in text_resolved + var_resolved:
        if idx in seen:
            raise OverlappingSelectionError(
                f"column {name!r} selected more than once"
            )
        seen.add(idx)

    if table.n_rows < 1:
        raise EmptyTableError("dataset has no data rows")

    def column(idx: int) -> list[str]:
        return [row[idx] for row in table.rows]

    return AnalysisTable(
        text_names=[name for _, name in text_resolved],
        text_columns=[column(idx) for idx, _ in text_resolved],
        variable_names=[name for _, name in var_resolved],
        variable_columns=[column(idx) for idx, _ in var_resolved],
        row_count=table.n_rows,
    )
