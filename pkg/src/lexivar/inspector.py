"""End-to-end analysis runs and the JSON interchange document.

An inspection loads the dataset, selects columns, turns every logical row
into units, assigns joint variable tuples, counts, and computes the
requested metrics. The result is a self-describing document: everything
chart planning needs (config echo, variable inventories, scores) is inside.

Nothing in the pipeline is stochastic, so identical data and configuration
always produce identical documents (pin the timestamp to make them
byte-identical).
"""

from __future__ import annotations

import json
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from typing import Any

from . import __version__
from .dataset import (
    ColumnRef,
    DatasetSource,
    LogicalRow,
    load_dataset,
    select_columns,
)
from .errors import ConfigError, LexivarError, SchemaError
from .metrics import (
    ALL_METRICS,
    DIVERSITY_METRICS,
    GLOBAL_STATS_KEY,
    PMI_METRICS,
    RELEVANCE_METRICS,
    STATS_METRIC,
    CountsTable,
    PmiFlavor,
    basic_stats,
    class_relevance,
    lexical_diversity,
    pmi,
)
from .units import (
    PreprocessOptions,
    TokenizerSpec,
    UnitConfig,
    build_units,
    merged_stopwords,
    preprocess,
    tokenize,
)
from .variables import VariableDecl, assign_tuples, deserialize_tuple, text_source_decl

SCHEMA_VERSION = "1"
PINNED_TIMESTAMP = "1970-01-01T00:00:00Z"

STATS_FIELDS = (
    "num_texts", "num_units", "num_duplicates", "avg_text_length", "vocab_size",
)


@dataclass(frozen=True)
class InspectionConfig:
    source: DatasetSource
    texts: tuple[ColumnRef, ...]
    variables: tuple[VariableDecl, ...] = ()
    tokenizer: TokenizerSpec = TokenizerSpec()
    preprocess: PreprocessOptions = PreprocessOptions()
    unit: UnitConfig = UnitConfig()
    metrics: tuple[str, ...] = ("stats",)
    timestamp_zero: bool = False

    def __post_init__(self):
        object.__setattr__(self, "texts", tuple(self.texts))
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "metrics", tuple(self.metrics))

    def validate(self) -> None:
        if not self.metrics:
            raise ConfigError("at least one metric must be requested")
        if len(set(self.metrics)) != len(self.metrics):
            raise ConfigError("metric list contains duplicates")
        unknown = [m for m in self.metrics if m not in ALL_METRICS]
        if unknown:
            raise ConfigError(f"unknown metrics: {', '.join(unknown)}")
        if not 1 <= len(self.texts) <= 2:
            raise ConfigError("between 1 and 2 text columns are required")
        names = [d.name for d in self.variables]
        if len(set(names)) != len(names):
            raise ConfigError("variable names must be unique")


@dataclass
class ResultsDocument:
    """Thin wrapper over the interchange payload dict.

    Keeping the payload primary means unknown fields written by newer tools
    survive a parse/serialize round-trip untouched.
    """

    payload: dict

    @property
    def metadata(self) -> dict:
        return self.payload["metadata"]

    @property
    def metrics(self) -> dict:
        return self.payload["metrics"]

    @property
    def variables(self) -> list[dict]:
        return self.metadata["variables"]

    @property
    def metric_ids(self) -> list[str]:
        return list(self.metadata["config"]["metrics"])

    @property
    def arity(self) -> int:
        return len(self.variables)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ResultsDocument) and self.payload == other.payload


def _round9(value: float) -> float:
    """Cap interchange numbers at 9 significant digits."""
    return float(f"{value:.9g}")


def _config_dict(config: InspectionConfig) -> dict:
    return {
        "source": {
            "location": config.source.location,
            "format": config.source.format,
            "has_header": config.source.has_header,
            "inline": config.source.inline,
        },
        "texts": list(config.texts),
        "variables": [
            {
                "name": d.name,
                "vtype": d.vtype,
                "semantics": d.semantics,
                "bins": d.bins,
                "axis": d.axis,
            }
            for d in config.variables
        ],
        "tokenizer": {"kind": config.tokenizer.kind, "custom_id": config.tokenizer.custom_id},
        "preprocess": {
            "lowercase": config.preprocess.lowercase,
            "stopword_files": list(config.preprocess.stopword_files),
            "extra_stopwords": list(config.preprocess.extra_stopwords),
        },
        "unit": {
            "mode": config.unit.mode,
            "n": config.unit.n,
            "window": config.unit.window,
            "dedup_same_surface": config.unit.dedup_same_surface,
        },
        "metrics": list(config.metrics),
        "timestamp_zero": config.timestamp_zero,
    }


@contextmanager
def _stage(name: str):
    """Tag errors escaping a pipeline step with that step's name."""
    try:
        yield
    except LexivarError as exc:
        if exc.stage is None:
            exc.stage = name
        raise


def _process_rows(
    rows: list[LogicalRow],
    tuple_keys: list,
    config: InspectionConfig,
    stopwords: set[str],
) -> tuple[CountsTable, dict[str, Counter]]:
    """Unitize and count one shard of logical rows."""
    counts = CountsTable()
    tuple_tokens: dict[str, Counter] = {}
    for row, tup in zip(rows, tuple_keys):
        tokens = preprocess(
            tokenize(row.text, config.tokenizer), config.preprocess, stopwords
        )
        bag = build_units(tokens, config.unit)
        counts.add_row(bag, tup, row.text)
        tuple_tokens.setdefault(tup.key, Counter()).update(tokens)
    return counts, tuple_tokens


def run_inspection(config: InspectionConfig, workers: int = 1) -> ResultsDocument:
    """Run the full pipeline and return the results document.

    ``workers`` shards the per-row work; shards merge in a fixed order, so
    the shard count never changes a single byte of the output.
    """
    with _stage("config"):
        config.validate()

    with _stage("load"):
        table = load_dataset(config.source)

    with _stage("select"):
        selected = select_columns(
            table, list(config.texts), [d.name for d in config.variables]
        )
        rows = list(selected.logical_rows())

    decls = list(config.variables)
    if selected.has_text_source:
        decls.append(text_source_decl())

    with _stage("variables"):
        tuples, inventories = assign_tuples(rows, decls)

    with _stage("unitize"):
        stopwords = merged_stopwords(config.preprocess)
        shard_count = max(1, min(workers, max(1, len(rows))))
        bounds = [
            (len(rows) * i // shard_count, len(rows) * (i + 1) // shard_count)
            for i in range(shard_count)
        ]
        if shard_count == 1:
            partials = [_process_rows(rows, tuples, config, stopwords)]
        else:
            with ThreadPoolExecutor(max_workers=shard_count) as pool:
                partials = list(
                    pool.map(
                        lambda b: _process_rows(
                            rows[b[0] : b[1]], tuples[b[0] : b[1]], config, stopwords
                        ),
                        bounds,
                    )
                )
        counts = CountsTable()
        tuple_tokens: dict[str, Counter] = {}
        for partial_counts, partial_tokens in partials:
            counts.merge(partial_counts)
            for key, tokens in partial_tokens.items():
                tuple_tokens.setdefault(key, Counter()).update(tokens)

    with _stage("metrics"):
        metric_tables: dict[str, dict] = {}
        for metric_id in config.metrics:
            if metric_id in PMI_METRICS:
                table_scores = pmi(counts, PmiFlavor.from_metric_id(metric_id))
                metric_tables[metric_id] = {
                    t: {u: _round9(s) for u, s in units.items()}
                    for t, units in table_scores.items()
                }
            elif metric_id in RELEVANCE_METRICS:
                prefix = metric_id[: -len("relevance")].rstrip("_")
                table_scores = class_relevance(
                    counts, positive="p" in prefix, weighted="w" in prefix
                )
                metric_tables[metric_id] = {
                    t: {u: _round9(s) for u, s in units.items()}
                    for t, units in table_scores.items()
                }
            elif metric_id in DIVERSITY_METRICS:
                diversity = lexical_diversity(tuple_tokens, metric_id)
                metric_tables[metric_id] = {
                    t: (None if s is None else _round9(s))
                    for t, s in diversity.items()
                }
            else:
                metric_tables[metric_id] = basic_stats(counts)

    created = PINNED_TIMESTAMP if config.timestamp_zero else datetime.now(
        timezone.utc
    ).strftime("%Y-%m-%dT%H:%M:%SZ")

    payload = {
        "schema": SCHEMA_VERSION,
        "metadata": {
            "version": __version__,
            "created_at": created,
            "config": _config_dict(config),
            "variables": [
                {
                    "name": d.name,
                    "vtype": d.vtype,
                    "semantics": d.semantics,
                    "bins": d.bins,
                    "axis": d.axis,
                    "values": inventories[d.name],
                }
                for d in decls
            ],
            "summary": {
                "rows": len(rows),
                "tuples": len(counts.texts_per_tuple),
                "vocab": len(counts.vocab),
            },
        },
        "metrics": metric_tables,
    }
    return ResultsDocument(payload=payload)


def serialize(doc: ResultsDocument) -> bytes:
    """Render the document as UTF-8 JSON with lexicographically sorted keys
    (byte-stable for identical payloads)."""
    text = json.dumps(doc.payload, sort_keys=True, ensure_ascii=False, indent=2)
    return (text + "\n").encode("utf-8")


def _check(condition: bool, path: str, message: str) -> None:
    if not condition:
        raise SchemaError(path, message)


def _is_number(value: Any) -> bool:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        return False
    return math.isfinite(value)


def validate_payload(payload: Any) -> None:
    """Validate an interchange payload, reporting the first violation's path."""
    _check(isinstance(payload, dict), "$", "document must be a JSON object")
    _check("schema" in payload, "$.schema", "missing schema version")
    _check(
        payload["schema"] == SCHEMA_VERSION,
        "$.schema",
        f"unsupported schema version {payload['schema']!r}",
    )
    _check("metadata" in payload, "$.metadata", "missing metadata")
    meta = payload["metadata"]
    _check(isinstance(meta, dict), "$.metadata", "metadata must be an object")
    for fld in ("version", "created_at", "config", "variables"):
        _check(fld in meta, f"$.metadata.{fld}", f"missing metadata.{fld}")
    _check(
        isinstance(meta["variables"], list),
        "$.metadata.variables",
        "variables must be an array",
    )
    for i, var in enumerate(meta["variables"]):
        path = f"$.metadata.variables[{i}]"
        _check(isinstance(var, dict), path, "variable entry must be an object")
        for fld in ("name", "vtype", "semantics", "values"):
            _check(fld in var, f"{path}.{fld}", f"missing {fld}")
    config = meta["config"]
    _check(isinstance(config, dict), "$.metadata.config", "config must be an object")
    _check(
        "metrics" in config and isinstance(config["metrics"], list),
        "$.metadata.config.metrics",
        "config.metrics must be an array",
    )
    _check("metrics" in payload, "$.metrics", "missing metrics")
    tables = payload["metrics"]
    _check(isinstance(tables, dict), "$.metrics", "metrics must be an object")

    arity = len(meta["variables"])
    for metric_id in config["metrics"]:
        _check(
            metric_id in tables,
            f"$.metrics.{metric_id}",
            f"configured metric {metric_id!r} has no entry",
        )
    for metric_id, table in tables.items():
        path = f"$.metrics.{metric_id}"
        _check(isinstance(table, dict), path, "metric table must be an object")
        for tuple_key, value in table.items():
            tpath = f"{path}.{tuple_key or '<global>'}"
            if not (metric_id == STATS_METRIC and tuple_key == GLOBAL_STATS_KEY):
                try:
                    deserialize_tuple(tuple_key, arity)
                except ValueError as exc:
                    raise SchemaError(tpath, str(exc)) from None
            if metric_id == STATS_METRIC:
                _check(isinstance(value, dict), tpath, "stats record must be an object")
                for fld in STATS_FIELDS:
                    _check(
                        fld in value and _is_number(value[fld]),
                        f"{tpath}.{fld}",
                        f"stats field {fld!r} missing or not a number",
                    )
            elif metric_id in DIVERSITY_METRICS:
                _check(
                    value is None or _is_number(value),
                    tpath,
                    "diversity score must be a number or null",
                )
            else:
                _check(isinstance(value, dict), tpath, "score table must be an object")
                for unit, score in value.items():
                    _check(
                        _is_number(score),
                        f"{tpath}.{unit}",
                        "score must be a finite number",
                    )


def deserialize(data: bytes | str) -> ResultsDocument:
    """Parse and validate an interchange document."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"not valid JSON: {exc}") from None
    validate_payload(payload)
    return ResultsDocument(payload=payload)


def with_pinned_timestamp(config: InspectionConfig) -> InspectionConfig:
    return replace(config, timestamp_zero=True)
