"""Command line interface: `lexivar inspect` and `lexivar visualize`.

inspect runs an analysis over a csv/tsv file and writes the results
document; visualize reads a results document and writes chart files. Exit
codes: 0 success, 1 user error (bad flags or data), 2 internal error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .charts import VisualizerArgs, visualize_document
from .dataset import ColumnRef, DatasetSource
from .errors import ConfigError, LexivarError
from .inspector import (
    InspectionConfig,
    deserialize,
    run_inspection,
    serialize,
)
from .units import PreprocessOptions, TokenizerSpec, UnitConfig
from .variables import VariableDecl

THREADS_ENV = "LEXIVAR_THREADS"


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; the contract reserves 2 for bugs.
    def error(self, message):
        raise ConfigError(message)


def parse_variable(spec: str) -> VariableDecl:
    """Parse NAME:TYPE:SEMANTICS[:bins=K][:axis=latitude|longitude]."""
    parts = spec.split(":")
    if len(parts) < 3:
        raise ConfigError(
            f"--var needs NAME:TYPE:SEMANTICS (with optional :bins=K, :axis=...), got {spec!r}"
        )
    name, vtype, semantics = parts[0], parts[1], parts[2]
    bins = None
    axis = None
    for extra in parts[3:]:
        if extra.startswith("bins="):
            try:
                bins = int(extra[len("bins="):])
            except ValueError:
                raise ConfigError(f"--var {spec!r}: bins must be an integer") from None
        elif extra.startswith("axis="):
            axis = extra[len("axis="):]
        else:
            raise ConfigError(f"--var {spec!r}: unknown option {extra!r}")
    try:
        return VariableDecl(name=name, vtype=vtype, semantics=semantics, bins=bins, axis=axis)
    except ValueError as exc:
        raise ConfigError(f"--var {spec!r}: {exc}") from None


def _column_ref(raw: str) -> ColumnRef:
    return int(raw) if raw.isdigit() else raw


def _infer_format(path: str, explicit: str | None) -> str:
    if explicit:
        return explicit
    return "tsv" if path.lower().endswith((".tsv", ".tab")) else "csv"


def _config_from_flags(args: argparse.Namespace) -> InspectionConfig:
    if args.config:
        if args.data:
            raise ConfigError("--config and --data are mutually exclusive")
        return _config_from_file(args.config, timestamp_zero=args.timestamp_zero)
    if not args.data:
        raise ConfigError("--data is required (or use --config)")
    if not args.text_col:
        raise ConfigError("at least one --text-col is required")
    if not args.metric:
        raise ConfigError("at least one --metric is required")

    if args.cooccurrences is not None:
        if args.ngrams is not None:
            raise ConfigError("--ngrams and --cooccurrences are mutually exclusive")
        if args.window is None:
            raise ConfigError("--cooccurrences requires --window")
        unit = UnitConfig(
            mode="cooccurrence",
            n=args.cooccurrences,
            window=args.window,
            dedup_same_surface=args.dedup,
        )
    else:
        if args.window is not None:
            raise ConfigError("--window applies to --cooccurrences only")
        unit = UnitConfig(mode="ngram", n=args.ngrams if args.ngrams else 1)

    tokenizer = (
        TokenizerSpec()
        if args.tokenizer in (None, "whitespace", "default_whitespace")
        else TokenizerSpec(kind="custom", custom_id=args.tokenizer)
    )
    return InspectionConfig(
        source=DatasetSource(
            location=args.data,
            format=_infer_format(args.data, args.format),
            has_header=not args.no_header,
        ),
        texts=tuple(_column_ref(t) for t in args.text_col),
        variables=tuple(parse_variable(v) for v in args.var),
        tokenizer=tokenizer,
        preprocess=PreprocessOptions(
            lowercase=args.lowercase,
            stopword_files=tuple(args.stopwords),
            extra_stopwords=tuple(args.extra_stopword),
        ),
        unit=unit,
        metrics=tuple(args.metric),
        timestamp_zero=args.timestamp_zero,
    )


def _config_from_file(path: str, timestamp_zero: bool) -> InspectionConfig:
    import json

    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    source = raw.get("source", {})
    unit = raw.get("unit", {})
    prep = raw.get("preprocess", {})
    tok = raw.get("tokenizer", {})
    try:
        return InspectionConfig(
            source=DatasetSource(
                location=source["location"],
                format=source.get("format", "csv"),
                has_header=source.get("has_header", True),
                inline=source.get("inline", False),
            ),
            texts=tuple(
                _column_ref(t) if isinstance(t, str) else t for t in raw["texts"]
            ),
            variables=tuple(
                VariableDecl(
                    name=v["name"],
                    vtype=v.get("vtype", "nominal"),
                    semantics=v.get("semantics", "general"),
                    bins=v.get("bins"),
                    axis=v.get("axis"),
                )
                for v in raw.get("variables", [])
            ),
            tokenizer=TokenizerSpec(
                kind=tok.get("kind", "default_whitespace"),
                custom_id=tok.get("custom_id"),
            ),
            preprocess=PreprocessOptions(
                lowercase=prep.get("lowercase", False),
                stopword_files=tuple(prep.get("stopword_files", [])),
                extra_stopwords=tuple(prep.get("extra_stopwords", [])),
            ),
            unit=UnitConfig(
                mode=unit.get("mode", "ngram"),
                n=unit.get("n", 1),
                window=unit.get("window"),
                dedup_same_surface=unit.get("dedup_same_surface", False),
            ),
            metrics=tuple(raw["metrics"]),
            timestamp_zero=raw.get("timestamp_zero", timestamp_zero),
        )
    except KeyError as exc:
        raise ConfigError(f"config file missing field: {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config file: {exc}") from None


def _default_threads() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def cmd_inspect(args: argparse.Namespace) -> int:
    config = _config_from_flags(args)
    workers = args.threads if args.threads else _default_threads()
    doc = run_inspection(config, workers=workers)
    with open(args.output, "wb") as fh:
        fh.write(serialize(doc))
    summary = doc.metadata["summary"]
    print(f"rows={summary['rows']} tuples={summary['tuples']} vocab={summary['vocab']}")
    return 0


def cmd_visualize(args: argparse.Namespace) -> int:
    if not os.path.isfile(args.results):
        raise ConfigError(f"results file not found: {args.results}")
    with open(args.results, "rb") as fh:
        doc = deserialize(fh.read())
    formats = tuple(f.strip() for f in args.format.split(",") if f.strip())
    vis_args = VisualizerArgs(
        output_dir=args.output_dir,
        formats=formats,
        top_k=args.top_k,
        unit_filter_list=tuple(args.filter_unit) if args.filter_unit else None,
        filter_regex=args.filter_regex,
        geometry=args.geometry,
        geometry_property=args.geometry_property,
        background=args.background,
    )
    documents = visualize_document(doc, vis_args)
    for document in documents:
        for warning in document.warnings:
            print(f"warning: {warning}", file=sys.stderr)
    print(f"charts={len(documents)} output_dir={args.output_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lexivar", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_inspect = sub.add_parser("inspect", help="run an analysis and write a results document")
    p_inspect.add_argument("--data", help="path to the csv/tsv dataset")
    p_inspect.add_argument("--format", choices=("csv", "tsv"),
                           help="dataset format (default: by file extension)")
    p_inspect.add_argument("--no-header", action="store_true",
                           help="the dataset has no header row; address columns by index")
    p_inspect.add_argument("--text-col", action="append", default=[],
                           help="text column name or index (repeat for two columns)")
    p_inspect.add_argument("--var", action="append", default=[],
                           metavar="NAME:TYPE:SEMANTICS[:bins=K][:axis=A]",
                           help="variable declaration (repeatable)")
    p_inspect.add_argument("--metric", action="append", default=[],
                           help="metric id (repeatable)")
    p_inspect.add_argument("--tokenizer", help="tokenizer: 'whitespace' or a registered custom id")
    p_inspect.add_argument("--ngrams", type=int, metavar="N",
                           help="use contiguous n-grams of size N (default 1)")
    p_inspect.add_argument("--cooccurrences", type=int, metavar="N",
                           help="use co-occurrences of N tokens within --window")
    p_inspect.add_argument("--window", type=int, help="window size for co-occurrences")
    p_inspect.add_argument("--dedup", action="store_true",
                           help="discard co-occurrences with repeated surface forms")
    p_inspect.add_argument("--lowercase", action="store_true")
    p_inspect.add_argument("--stopwords", action="append", default=[], metavar="FILE",
                           help="stopword file, newline-delimited (repeatable)")
    p_inspect.add_argument("--extra-stopword", action="append", default=[], metavar="WORD",
                           help="additional stopword (repeatable)")
    p_inspect.add_argument("-o", "--output", default="results.json")
    p_inspect.add_argument("--timestamp-zero", action="store_true",
                           help="pin the document timestamp for reproducible bytes")
    p_inspect.add_argument("--threads", type=int,
                           help=f"worker shards (default: {THREADS_ENV} or cpu count)")
    p_inspect.add_argument("--config", metavar="FILE",
                           help="JSON file with a full inspection config (instead of flags)")
    p_inspect.set_defaults(func=cmd_inspect)

    p_vis = sub.add_parser("visualize", help="render charts from a results document")
    p_vis.add_argument("--results", required=True, help="path to a results document")
    p_vis.add_argument("--output-dir", default="charts")
    p_vis.add_argument("--format", default="html,json",
                       help="comma-separated subset of {html,json}")
    p_vis.add_argument("--top-k", type=int, help="keep only the k best units per tuple")
    p_vis.add_argument("--filter-regex", help="keep units matching this pattern")
    p_vis.add_argument("--filter-unit", action="append", metavar="UNIT",
                       help="keep exactly these units (repeatable)")
    p_vis.add_argument("--geometry", metavar="FILE",
                       help="GeoJSON FeatureCollection for choropleth regions")
    p_vis.add_argument("--geometry-property", default="name",
                       help="feature property matched against variable values")
    p_vis.add_argument("--background", metavar="FILE",
                       help="GeoJSON background for spatial scatter/binned maps")
    p_vis.set_defaults(func=cmd_visualize)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except LexivarError as exc:
        print(f"lexivar: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - defensive
        print(f"lexivar: internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
