#!/usr/bin/env python3
"""Regenerate the golden fixtures under tests/data/golden/.

Run from the repository root:

    python scripts/generate_fixtures.py

Everything is deterministic (timestamps pinned, sorted keys), so reruns must
be byte-identical; the acceptance suite enforces exactly that. The explorer
frontend reads the same files as its test fixtures.
"""

from __future__ import annotations

import json
import os
import re
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from lexivar.charts import (  # noqa: E402
    VisualizerArgs,
    plan_charts,
    render_chart,
    render_stats_report,
)
from lexivar.dataset import DatasetSource  # noqa: E402
from lexivar.inspector import InspectionConfig, run_inspection, serialize  # noqa: E402
from lexivar.units import PreprocessOptions, UnitConfig  # noqa: E402
from lexivar.variables import VariableDecl  # noqa: E402

SOURCE = "tests/data/source"
GOLDEN = "tests/data/golden"
GEOMETRY = f"{SOURCE}/regions_mini.geojson"

TOY_CSV = "t,l\na b a,A\nb c,B\n"


def V(name, vtype="nominal", semantics="general", bins=None, axis=None):
    return VariableDecl(name=name, vtype=vtype, semantics=semantics, bins=bins, axis=axis)


def config(location, format, texts, variables=(), metrics=("stats",), **kw):
    return InspectionConfig(
        source=DatasetSource(location=location, format=format, **kw.pop("source_kw", {})),
        texts=texts,
        variables=variables,
        metrics=metrics,
        timestamp_zero=True,
        **kw,
    )


RUNS = {
    "toy_results.json": config(
        TOY_CSV, "csv", ("t",), (V("l"),),
        metrics=(
            "pmi", "n_pmi", "npw_pmi", "relevance", "pw_relevance",
            "ttr", "root_ttr", "log_ttr", "maas", "stats",
        ),
        source_kw={"inline": True},
    ),
    "diatopit_region_results.json": config(
        f"{SOURCE}/diatopit_mini.tsv", "tsv", ("text",),
        (V("region", semantics="spatial"),),
        metrics=("npw_pmi",),
        preprocess=PreprocessOptions(
            lowercase=True,
            stopword_files=(f"{SOURCE}/stopwords_it.txt",),
            extra_stopwords=("user", "url"),
        ),
    ),
    "diatopit_coord_results.json": config(
        f"{SOURCE}/diatopit_mini.tsv", "tsv", ("text",),
        (
            V("latitude", "coordinate", "spatial", bins=30, axis="latitude"),
            V("longitude", "coordinate", "spatial", bins=30, axis="longitude"),
        ),
        metrics=("npw_pmi",),
        preprocess=PreprocessOptions(
            lowercase=True,
            stopword_files=(f"{SOURCE}/stopwords_it.txt",),
            extra_stopwords=("user", "url"),
        ),
    ),
    "diatopit_geo_results.json": config(
        f"{SOURCE}/diatopit_mini.tsv", "tsv", ("text",),
        (
            V("latitude", "coordinate", "spatial", axis="latitude"),
            V("longitude", "coordinate", "spatial", axis="longitude"),
        ),
        metrics=("npw_pmi",),
    ),
    "diatopit_year_results.json": config(
        f"{SOURCE}/diatopit_mini.tsv", "tsv", ("text",),
        (V("year", "ordinal", "temporal"),),
        metrics=("npw_pmi",),
    ),
    "mhs_results.json": config(
        f"{SOURCE}/mhs_mini.csv", "csv", ("text",),
        (V("hatespeech"), V("annotator_race")),
        metrics=("pw_relevance",),
        preprocess=PreprocessOptions(
            lowercase=True, stopword_files=(f"{SOURCE}/stopwords_en.txt",)
        ),
    ),
    "mhs_age_results.json": config(
        f"{SOURCE}/mhs_mini.csv", "csv", ("text",),
        (V("annotator_age", "quantitative"),),
        metrics=("npw_pmi",),
        preprocess=PreprocessOptions(
            lowercase=True, stopword_files=(f"{SOURCE}/stopwords_en.txt",)
        ),
    ),
    "mhs_three_results.json": config(
        f"{SOURCE}/mhs_mini.csv", "csv", ("text",),
        (V("hatespeech"), V("annotator_race"), V("annotator_age", "quantitative")),
        metrics=("pw_relevance", "stats"),
        preprocess=PreprocessOptions(
            lowercase=True, stopword_files=(f"{SOURCE}/stopwords_en.txt",)
        ),
    ),
    "hc3_results.json": config(
        f"{SOURCE}/hc3_mini.csv", "csv", ("human_answers", "chatgpt_answers"), (),
        metrics=("stats", "root_ttr", "npw_pmi"),
        unit=UnitConfig(mode="ngram", n=2),
        preprocess=PreprocessOptions(
            lowercase=True,
            stopword_files=(f"{SOURCE}/stopwords_en.txt",),
            extra_stopwords=("url",) + tuple(str(d) for d in range(10)),
        ),
    ),
}

# (document, visualizer args) pairs for the golden chart files
CHART_RUNS = [
    ("diatopit_region_results.json", dict(geometry=GEOMETRY, filter_regex="^ghe$")),
    ("diatopit_coord_results.json", dict(unit_filter_list=("ghe",))),
    ("diatopit_geo_results.json", dict(unit_filter_list=("ghe",))),
    ("diatopit_year_results.json", dict(top_k=5)),
    ("mhs_results.json", dict(top_k=10)),
    ("mhs_age_results.json", dict(top_k=10)),
    ("mhs_three_results.json", dict(top_k=10)),
    ("hc3_results.json", dict(top_k=20)),
    ("toy_results.json", dict()),
]

FILTER_PARITY_PATTERNS = [
    "ghe", "^ghe$", "gh", "^gh", "e$", "a|o", "g.e", "gh?e", "g+",
    "[aeiou]$", "^[bcd]", "ss", "x", "^$", ".", "..", "^.{3}$", "^.{4,}$",
    "o$", "an", "a.*a", "^p", "(gh|be)", "lin$", "e.e", "[^aeiou]$",
    "m[ia]", "t+o", "s?e", "u", "^[gb]he", "he$", "a{2}", "(a|e|i)n",
    "^[a-m]", "[n-z]$", "gg", "^u", "ia", "c.*o",
]


def generate(root: str) -> dict[str, bytes]:
    """Build every fixture as bytes, keyed by path relative to ``root``."""
    os.chdir(root)
    out: dict[str, bytes] = {}
    documents = {}
    for name, cfg in RUNS.items():
        doc = run_inspection(cfg)
        documents[name] = doc
        out[f"{GOLDEN}/{name}"] = serialize(doc)

    import tempfile

    for name, extra in CHART_RUNS:
        doc = documents[name]
        stem = name[: -len("_results.json")]
        with tempfile.TemporaryDirectory() as tmp:
            args = VisualizerArgs(output_dir=tmp, formats=("json",), **extra)
            for metric_id in doc.metric_ids:
                if metric_id == "stats":
                    render_stats_report(doc, args)
                    continue
                for plan in plan_charts(
                    metric_id, doc.variables, geometry_available=args.geometry is not None
                ):
                    render_chart(plan, doc, args)
            for filename in sorted(os.listdir(tmp)):
                with open(os.path.join(tmp, filename), "rb") as fh:
                    out[f"{GOLDEN}/charts/{stem}__{filename}"] = fh.read()

    # shared regex-filter parity vectors: engine selections frozen for the
    # frontend to reproduce with its own regex engine
    inventory = sorted(
        {
            unit
            for table in documents["diatopit_region_results.json"].metrics["npw_pmi"].values()
            for unit in table
        }
        | {"ghe", "ghetto", "spiaggia", "passo", "anno2021", "x y"}
    )
    vectors = []
    for pattern in FILTER_PARITY_PATTERNS:
        selected = [u for u in inventory if re.search(pattern, u)]
        vectors.append({"pattern": pattern, "selected": selected})
    parity = {"inventory": inventory, "vectors": vectors}
    out[f"{GOLDEN}/filter_parity.json"] = (
        json.dumps(parity, sort_keys=True, ensure_ascii=False, indent=2) + "\n"
    ).encode("utf-8")
    return out


def main() -> int:
    root = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
    fixtures = generate(root)
    for rel_path, data in fixtures.items():
        path = os.path.join(root, rel_path)
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, "wb") as fh:
            fh.write(data)
    print(f"wrote {len(fixtures)} fixture files under {GOLDEN}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
