"""Chart planning and rendering for inspection results.

Planning maps a (metric, variable signature) pair onto chart types and
channel assignments under a five-dimension budget: one dimension is always
the quantitative score, one the language unit (as an encoding or as an
interactive filter widget), and the rest carry variables. Rendering turns a
plan plus a results document into a self-contained Vega-Lite v5 chart
document with the data inlined, written as .json and/or a single-file .html
wrapper.
"""

from __future__ import annotations

import json
import math
import os
import re
import warnings
from dataclasses import dataclass, field
from datetime import datetime
from typing import Mapping, Sequence

from .errors import (
    ConfigError,
    EmptySliceWarning,
    InvalidPatternError,
    MissingGeometryError,
    UnsupportedCombinationError,
)
from .inspector import ResultsDocument
from .metrics import (
    GLOBAL_STATS_KEY,
    PMI_METRICS,
    RELEVANCE_METRICS,
    STATS_METRIC,
    filter_units_in_table,
    metric_is_non_negative,
    top_k,
)
from .variables import VariableDecl, deserialize_tuple

VEGA_LITE_SCHEMA = "https://vega.github.io/schema/vega-lite/v5.json"

CHART_TYPES = (
    "bar", "line", "heatmap", "scatter", "geo_scatter", "binned_map", "choropleth",
)

ASSOCIATION_METRICS = set(PMI_METRICS) | set(RELEVANCE_METRICS)

# A chart may spend at most this many dimensions: score + unit + variables.
DIMENSION_BUDGET = 5
# Up to this many dimensions the unit widget is a free-text regex search;
# beyond it, a dropdown keeps filtering responsive.
REGEX_WIDGET_MAX_DIMS = 3


@dataclass(frozen=True)
class ChartPlan:
    """One chart decision: type, channel assignment, and unit widget.

    ``assignments`` maps variable names plus the reserved roles ``score``
    and ``unit`` to channels (x, y, color, size, lat, lon, dropdown). For
    choropleths the join variable is carried in ``geometry_key`` instead of
    occupying a channel.
    """

    chart_type: str
    metric_id: str
    assignments: tuple[tuple[str, str], ...]
    unit_widget: str | None = None
    geometry_key: str | None = None

    @property
    def assignment_map(self) -> dict[str, str]:
        return dict(self.assignments)

    @property
    def has_unit(self) -> bool:
        return "unit" in self.assignment_map or self.unit_widget is not None


@dataclass(frozen=True)
class VisualizerArgs:
    output_dir: str = "charts"
    formats: tuple[str, ...] = ("json", "html")
    top_k: int | None = None
    unit_filter_list: tuple[str, ...] | None = None
    filter_regex: str | None = None
    geometry: str | None = None
    geometry_property: str = "name"
    background: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "formats", tuple(self.formats))
        if self.unit_filter_list is not None:
            object.__setattr__(self, "unit_filter_list", tuple(self.unit_filter_list))
        unknown = set(self.formats) - {"json", "html"}
        if unknown:
            raise ConfigError(f"unknown chart formats: {', '.join(sorted(unknown))}")
        if self.top_k is not None and self.top_k < 1:
            raise ConfigError("top_k must be >= 1")
        if self.top_k is not None and self.unit_filter_list is not None:
            raise ConfigError("top_k and unit_filter_list are mutually exclusive")


@dataclass
class ChartDocument:
    """A rendered chart: file stem, inline-data Vega-Lite spec, warnings."""

    name: str
    spec: dict
    warnings: list[str] = field(default_factory=list)


def _as_decl(var: VariableDecl | Mapping) -> VariableDecl:
    if isinstance(var, VariableDecl):
        return var
    return VariableDecl(
        name=var["name"],
        vtype=var["vtype"],
        semantics=var["semantics"],
        bins=var.get("bins"),
        axis=var.get("axis"),
    )


def _widget_for(n_variables: int) -> str:
    dims = n_variables + 2  # score + unit
    return "regex_search" if dims <= REGEX_WIDGET_MAX_DIMS else "dropdown"


def plan_charts(
    metric_id: str,
    variables: Sequence[VariableDecl | Mapping],
    geometry_available: bool = False,
) -> list[ChartPlan]:
    """Choose chart types and channel assignments for a metric.

    The rule matrix keys on the variables' types and semantics; a
    latitude/longitude coordinate pair consumes two declarations but one
    planning slot. Signatures outside the matrix raise
    :class:`UnsupportedCombinationError` with remediation advice. The
    ``stats`` metric is tabular and yields no chart plans (it renders as a
    report instead).
    """
    if metric_id == STATS_METRIC:
        return []
    decls = [_as_decl(v) for v in variables]
    is_assoc = metric_id in ASSOCIATION_METRICS
    widget = _widget_for(len(decls)) if is_assoc else None

    def plan(chart_type, assignments, geometry_key=None, unit_widget=widget):
        pairs = dict(assignments)
        if is_assoc and "unit" not in pairs and unit_widget is None:
            raise AssertionError("association plans must keep the unit present")
        return ChartPlan(
            chart_type=chart_type,
            metric_id=metric_id,
            assignments=tuple(pairs.items()),
            unit_widget=unit_widget,
            geometry_key=geometry_key,
        )

    coords = [d for d in decls if d.vtype == "coordinate"]
    others = [d for d in decls if d.vtype != "coordinate"]

    if coords:
        if others or len(coords) != 2:
            raise UnsupportedCombinationError(
                "coordinate variables must come as exactly one latitude/longitude "
                "pair with no other variables",
                "declare one latitude and one longitude coordinate, and analyze "
                "other variables in separate runs",
            )
        axes = sorted(filter(None, (d.axis for d in coords)))
        if axes != ["latitude", "longitude"]:
            raise UnsupportedCombinationError(
                "coordinate pair needs one latitude and one longitude axis",
                "flag one declaration with axis=latitude and the other with "
                "axis=longitude",
            )
        lat = next(d for d in coords if d.axis == "latitude")
        lon = next(d for d in coords if d.axis == "longitude")
        binned = [d.bins is not None for d in coords]
        if all(binned):
            chart = "binned_map"
        elif not any(binned):
            chart = "geo_scatter"
        else:
            raise UnsupportedCombinationError(
                "latitude and longitude disagree about binning",
                "bin both coordinates or neither",
            )
        base = {lat.name: "lat", lon.name: "lon", "score": "color"}
        return [plan(chart, base)]

    if len(others) == 0:
        if is_assoc:
            return [plan("bar", {"unit": "x", "score": "y"})]
        return [plan("bar", {"score": "y"})]

    if len(others) == 1:
        d = others[0]
        if d.vtype in ("nominal", "ordinal"):
            if d.semantics == "temporal":
                assignments = {d.name: "x", "score": "y"}
                if is_assoc:
                    assignments["unit"] = "color"
                return [plan("line", assignments)]
            assignments = {d.name: "x", "score": "y"}
            if is_assoc:
                assignments["unit"] = "color"
            plans = [plan("bar", assignments)]
            if d.semantics == "spatial" and geometry_available:
                plans.append(
                    plan("choropleth", {"score": "color"}, geometry_key=d.name)
                )
            return plans
        # quantitative
        chart = "line" if d.semantics == "temporal" else "scatter"
        return [plan(chart, {d.name: "x", "score": "y"})]

    if len(others) == 2:
        if any(d.vtype == "quantitative" for d in others):
            raise UnsupportedCombinationError(
                "two-variable charts cannot place a quantitative variable on a "
                "categorical axis",
                "bin the quantitative variable or declare it ordinal",
            )
        temporal = [d for d in others if d.semantics == "temporal"]
        if len(temporal) == 2:
            raise UnsupportedCombinationError(
                "a chart can order at most one axis by time",
                "keep one temporal variable per run",
            )
        if len(temporal) == 1:
            other = next(d for d in others if d.semantics != "temporal")
            return [
                plan("line", {temporal[0].name: "x", other.name: "color", "score": "y"})
            ]
        return [
            plan("heatmap", {others[0].name: "x", others[1].name: "y", "score": "color"})
        ]

    if len(others) == 3:
        axis_candidates = [
            d for d in others
            if d.vtype in ("nominal", "ordinal") and d.semantics != "temporal"
        ]
        if len(axis_candidates) < 2:
            raise UnsupportedCombinationError(
                "three-variable charts need two non-temporal nominal/ordinal "
                "variables for the heatmap axes",
                "re-declare variables or split the analysis into separate runs",
            )
        x_var, y_var = axis_candidates[0], axis_candidates[1]
        third = next(d for d in others if d not in (x_var, y_var))
        return [
            plan(
                "heatmap",
                {x_var.name: "x", y_var.name: "y", third.name: "dropdown",
                 "score": "color"},
            )
        ]

    raise UnsupportedCombinationError(
        f"{len(others)} variables exceed the {DIMENSION_BUDGET}-dimension budget",
        "analyze at most 3 non-coordinate variables per run",
    )


def filter_units(table: Mapping[str, Mapping[str, float]], pattern: str) -> dict:
    """Keep units whose key matches the pattern anywhere (unanchored).

    The supported dialect is the portable regular-expression subset
    (literals, character classes, anchors, quantifiers, alternation) so an
    interactive frontend can mirror the behavior exactly.
    """
    try:
        compiled = re.compile(pattern)
    except re.error as exc:
        raise InvalidPatternError(f"invalid pattern {pattern!r}: {exc}") from None
    out: dict = {}
    for tuple_key in sorted(table):
        kept = {u: s for u, s in table[tuple_key].items() if compiled.search(u)}
        if kept:
            out[tuple_key] = kept
    return out


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

# Equal-width bin labels as the variable model renders them: 6-decimal
# bounds, last bin right-closed.
_BIN_LABEL = re.compile(r"^\[(-?\d+(?:\.\d+)?), (-?\d+(?:\.\d+)?)[\)\]]$")


def parse_bin_label(label: str) -> tuple[float, float] | None:
    match = _BIN_LABEL.match(label)
    if match is None:
        return None
    return float(match.group(1)), float(match.group(2))


def _temporal_sort_key(value: str):
    """ISO-8601 dates first, then numbers, then code-point order."""
    try:
        return (0, datetime.fromisoformat(value).isoformat(), value)
    except ValueError:
        pass
    try:
        num = float(value)
        if math.isfinite(num):
            return (1, f"{num:+030.9f}", value)
    except ValueError:
        pass
    return (2, value, value)


def temporal_order(values: Sequence[str]) -> list[str]:
    return sorted(values, key=_temporal_sort_key)


def _score_scale(metric_id: str) -> dict:
    if metric_is_non_negative(metric_id):
        return {"scheme": "blues"}
    return {"scheme": "redblue", "domainMid": 0, "reverse": True}


def _unit_params(plan: ChartPlan, units: Sequence[str], best_unit: str) -> tuple[list, list]:
    """Vega-Lite params + transforms implementing the unit filter widget."""
    if plan.unit_widget == "dropdown":
        params = [
            {
                "name": "unit_selection",
                "value": best_unit,
                "bind": {"input": "select", "options": list(units), "name": "unit: "},
            }
        ]
        transforms = [{"filter": "datum.unit == unit_selection"}]
        return params, transforms
    if plan.unit_widget == "regex_search":
        params = [
            {
                "name": "unit_search",
                "value": "",
                "bind": {
                    "input": "text",
                    "name": "unit search: ",
                    "placeholder": "regular expression",
                },
            }
        ]
        transforms = [
            {"filter": "unit_search == '' || test(regexp(unit_search), datum.unit)"}
        ]
        return params, transforms
    return [], []


def _load_geojson(path: str) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        geo = json.load(fh)
    if geo.get("type") != "FeatureCollection" or "features" not in geo:
        raise ConfigError(f"{path}: expected a GeoJSON FeatureCollection")
    return geo["features"]


def _variable_values(doc: ResultsDocument, name: str) -> list[str]:
    for var in doc.variables:
        if var["name"] == name:
            return list(var["values"])
    return []


def _apply_filters(table: dict, args: VisualizerArgs) -> dict:
    if args.filter_regex is not None:
        table = filter_units(table, args.filter_regex)
    if args.unit_filter_list is not None:
        table = filter_units_in_table(table, args.unit_filter_list)
    if args.top_k is not None:
        table = top_k(table, args.top_k)
    return table


def _association_rows(doc: ResultsDocument, table: dict) -> tuple[list[dict], list[str]]:
    names = [v["name"] for v in doc.variables]
    rows: list[dict] = []
    units: set[str] = set()
    for tuple_key in sorted(table):
        values = deserialize_tuple(tuple_key, len(names))
        base = dict(zip(names, values))
        for unit in sorted(table[tuple_key]):
            row = dict(base)
            row["unit"] = unit
            row["score"] = table[tuple_key][unit]
            rows.append(row)
            units.add(unit)
    return rows, sorted(units)


def _diversity_rows(doc: ResultsDocument, table: dict) -> list[dict]:
    names = [v["name"] for v in doc.variables]
    rows = []
    for tuple_key in sorted(table):
        score = table[tuple_key]
        if score is None:
            continue
        values = deserialize_tuple(tuple_key, len(names))
        row = dict(zip(names, values))
        row["score"] = score
        rows.append(row)
    return rows


def _axis_sort(doc: ResultsDocument, name: str, semantics_by_name: dict) -> list[str]:
    values = _variable_values(doc, name)
    if semantics_by_name.get(name) == "temporal":
        return temporal_order(values)
    return values


def _encoding_for(
    plan: ChartPlan,
    doc: ResultsDocument,
    metric_id: str,
) -> dict:
    semantics = {v["name"]: v["semantics"] for v in doc.variables}
    vtypes = {v["name"]: v["vtype"] for v in doc.variables}
    assignment = plan.assignment_map
    encoding: dict = {}
    tooltip: list[dict] = []

    for field_name, channel in assignment.items():
        if field_name == "score":
            enc = {"field": "score", "type": "quantitative", "title": metric_id}
            if channel == "color":
                enc["scale"] = _score_scale(metric_id)
            encoding[channel] = enc
            tooltip.append({"field": "score", "type": "quantitative"})
            continue
        if field_name == "unit":
            encoding[channel] = {"field": "unit", "type": "nominal"}
            tooltip.append({"field": "unit", "type": "nominal"})
            continue
        if channel in ("lat", "lon"):
            continue  # handled per chart type below
        if channel == "dropdown":
            continue  # widget, not a visual encoding
        if vtypes.get(field_name) == "quantitative" and plan.chart_type == "scatter":
            encoding[channel] = {"field": field_name, "type": "quantitative"}
        else:
            enc = {
                "field": field_name,
                "type": "nominal",
                "sort": _axis_sort(doc, field_name, semantics),
            }
            encoding[channel] = enc
        tooltip.append({"field": field_name, "type": "nominal"})
    if "unit" not in assignment and plan.has_unit:
        tooltip.append({"field": "unit", "type": "nominal"})
    encoding["tooltip"] = tooltip
    return encoding


def _variable_dropdown_params(
    plan: ChartPlan, doc: ResultsDocument
) -> tuple[list, list]:
    """Bind dropdown-channel variables to select inputs."""
    params: list = []
    transforms: list = []
    for field_name, channel in plan.assignment_map.items():
        if channel != "dropdown" or field_name in ("unit", "score"):
            continue
        options = _variable_values(doc, field_name)
        params.append(
            {
                "name": f"select_{field_name}",
                "value": options[0] if options else "",
                "bind": {
                    "input": "select",
                    "options": options,
                    "name": f"{field_name}: ",
                },
            }
        )
        transforms.append(
            {"filter": f"datum['{field_name}'] == select_{field_name}"}
        )
    return params, transforms


_MARKS = {
    "bar": {"type": "bar"},
    "line": {"type": "line", "point": True},
    "heatmap": {"type": "rect"},
    "scatter": {"type": "point", "filled": True},
}


def build_chart_spec(
    plan: ChartPlan,
    doc: ResultsDocument,
    args: VisualizerArgs,
) -> tuple[dict | None, list[str]]:
    """Build the Vega-Lite spec for one plan; (None, warnings) on empty slice."""
    metric_id = plan.metric_id
    table = doc.metrics[metric_id]
    chart_warnings: list[str] = []

    if metric_id in ASSOCIATION_METRICS:
        table = _apply_filters(dict(table), args)
        rows, units = _association_rows(doc, table)
        if not rows:
            warnings.warn(
                f"{metric_id}/{plan.chart_type}: every unit was filtered out",
                EmptySliceWarning,
            )
            return None, [f"{metric_id}: empty slice, chart skipped"]
        best_unit = min(
            (
                (-(score), unit)
                for t in table
                for unit, score in table[t].items()
            )
        )[1]
        unit_params, unit_transforms = _unit_params(plan, units, best_unit)
    else:
        rows = _diversity_rows(doc, table)
        if not rows:
            warnings.warn(
                f"{metric_id}/{plan.chart_type}: no defined scores to plot",
                EmptySliceWarning,
            )
            return None, [f"{metric_id}: empty slice, chart skipped"]
        unit_params, unit_transforms = [], []

    var_params, var_transforms = _variable_dropdown_params(plan, doc)
    params = unit_params + var_params
    transforms = unit_transforms + var_transforms

    title = f"{metric_id} — {plan.chart_type}"
    spec: dict = {
        "$schema": VEGA_LITE_SCHEMA,
        "title": title,
        "data": {"values": rows},
    }
    if params:
        spec["params"] = params
    if transforms:
        spec["transform"] = transforms

    assignment = plan.assignment_map

    if plan.chart_type == "choropleth":
        return self_contained_choropleth(
            plan, doc, args, rows, params, transforms, title, chart_warnings
        )

    if plan.chart_type == "geo_scatter":
        lat_name = next(k for k, v in assignment.items() if v == "lat")
        lon_name = next(k for k, v in assignment.items() if v == "lon")
        plottable = []
        for row in rows:
            try:
                row[lat_name] = float(row[lat_name])
                row[lon_name] = float(row[lon_name])
            except ValueError:
                continue  # missing-coordinate rows cannot be placed
            plottable.append(row)
        rows = plottable
        spec["data"] = {"values": rows}
        tooltip = [
            {"field": lat_name, "type": "quantitative"},
            {"field": lon_name, "type": "quantitative"},
        ]
        if plan.has_unit:
            tooltip.append({"field": "unit", "type": "nominal"})
        tooltip.append({"field": "score", "type": "quantitative"})
        layer_spec = {
            "mark": {"type": "circle", "opacity": 0.85},
            "encoding": {
                "latitude": {"field": lat_name, "type": "quantitative"},
                "longitude": {"field": lon_name, "type": "quantitative"},
                "color": {
                    "field": "score",
                    "type": "quantitative",
                    "title": metric_id,
                    "scale": _score_scale(metric_id),
                },
                "tooltip": tooltip,
            },
        }
        if transforms:
            layer_spec["transform"] = transforms
        spec.pop("transform", None)
        if args.background:
            background = _load_geojson(args.background)
            spec["layer"] = [
                {
                    "data": {"values": background},
                    "mark": {"type": "geoshape", "fill": "#f0f0f0", "stroke": "#bbb"},
                },
                {**layer_spec, "data": {"values": rows}},
            ]
            spec.pop("data", None)
        else:
            spec.update(layer_spec)
        spec["projection"] = {"type": "mercator"}
        return spec, chart_warnings

    if plan.chart_type == "binned_map":
        lat_name = next(k for k, v in assignment.items() if v == "lat")
        lon_name = next(k for k, v in assignment.items() if v == "lon")
        plottable = []
        for row in rows:
            lat_bounds = parse_bin_label(str(row[lat_name]))
            lon_bounds = parse_bin_label(str(row[lon_name]))
            if lat_bounds is None or lon_bounds is None:
                continue  # missing-coordinate bins cannot be placed
            plottable.append(
                {
                    **row,
                    "__lat0": lat_bounds[0],
                    "__lat1": lat_bounds[1],
                    "__lon0": lon_bounds[0],
                    "__lon1": lon_bounds[1],
                }
            )
        tooltip = [
            {"field": lat_name, "type": "nominal"},
            {"field": lon_name, "type": "nominal"},
        ]
        if plan.has_unit:
            tooltip.append({"field": "unit", "type": "nominal"})
        tooltip.append({"field": "score", "type": "quantitative"})
        # bins drawn as geo-rectangles in projected space, so a geometry
        # background composes naturally underneath
        rect_layer = {
            "mark": {"type": "rect", "opacity": 0.85, "stroke": "#fff",
                     "strokeWidth": 0.3},
            "encoding": {
                "longitude": {"field": "__lon0", "type": "quantitative"},
                "longitude2": {"field": "__lon1"},
                "latitude": {"field": "__lat0", "type": "quantitative"},
                "latitude2": {"field": "__lat1"},
                "color": {
                    "field": "score",
                    "type": "quantitative",
                    "title": metric_id,
                    "scale": _score_scale(metric_id),
                },
                "tooltip": tooltip,
            },
        }
        if transforms:
            rect_layer["transform"] = transforms
        spec.pop("transform", None)
        if args.background:
            background = _load_geojson(args.background)
            spec["layer"] = [
                {
                    "data": {"values": background},
                    "mark": {"type": "geoshape", "fill": "#f0f0f0", "stroke": "#bbb"},
                },
                {**rect_layer, "data": {"values": plottable}},
            ]
            spec.pop("data", None)
        else:
            spec["data"] = {"values": plottable}
            spec.update(rect_layer)
        spec["projection"] = {"type": "mercator"}
        return spec, chart_warnings

    spec["mark"] = _MARKS[plan.chart_type]
    spec["encoding"] = _encoding_for(plan, doc, metric_id)
    return spec, chart_warnings


def self_contained_choropleth(
    plan: ChartPlan,
    doc: ResultsDocument,
    args: VisualizerArgs,
    rows: list[dict],
    params: list,
    transforms: list,
    title: str,
    chart_warnings: list[str],
) -> tuple[dict, list[str]]:
    """Layered geoshape chart joining score rows onto geometry features."""
    if not args.geometry:
        raise MissingGeometryError(
            "choropleth rendering needs a region geometry file"
        )
    features = _load_geojson(args.geometry)
    prop = args.geometry_property
    key_of = lambda feat: str(feat.get("properties", {}).get(prop, "")).lower()

    feature_keys = {key_of(f) for f in features}
    join_field = plan.geometry_key or ""
    matched_rows = []
    unmatched_values = set()
    for row in rows:
        region = str(row.get(join_field, ""))
        if region.lower() in feature_keys:
            matched_rows.append({**row, "__match": region.lower()})
        else:
            unmatched_values.add(region)
    for value in sorted(unmatched_values):
        chart_warnings.append(
            f"no geometry feature matches {join_field}={value!r}"
        )

    keyed_features = [
        {**feat, "__match": key_of(feat)} for feat in features
    ]
    score_layer = {
        "data": {"values": matched_rows},
        "transform": transforms
        + [
            {
                "lookup": "__match",
                "from": {"data": {"values": keyed_features}, "key": "__match"},
                "as": "geo",
            },
            {"filter": "isValid(datum.geo)"},
        ],
        "mark": {"type": "geoshape", "stroke": "#fff", "strokeWidth": 0.5},
        "encoding": {
            "shape": {"field": "geo", "type": "geojson"},
            "color": {
                "field": "score",
                "type": "quantitative",
                "title": plan.metric_id,
                "scale": _score_scale(plan.metric_id),
            },
            "tooltip": [
                {"field": join_field, "type": "nominal"},
                {"field": "score", "type": "quantitative"},
            ],
        },
    }
    spec = {
        "$schema": VEGA_LITE_SCHEMA,
        "title": title,
        "layer": [
            {
                "data": {"values": keyed_features},
                "mark": {"type": "geoshape", "fill": "#f0f0f0", "stroke": "#bbb"},
            },
            score_layer,
        ],
        "projection": {"type": "mercator"},
    }
    if params:
        spec["params"] = params
    return spec, chart_warnings


_HTML_TEMPLATE = """<!DOCTYPE html>
<html>
<head>
<meta charset="utf-8">
<title>{title}</title>
<script src="https://cdn.jsdelivr.net/npm/vega@5"></script>
<script src="https://cdn.jsdelivr.net/npm/vega-lite@5"></script>
<script src="https://cdn.jsdelivr.net/npm/vega-embed@6"></script>
<style>body {{ font-family: sans-serif; margin: 2em; }}</style>
</head>
<body>
<h2>{title}</h2>
<div id="view"></div>
<script type="text/javascript">
const spec = {spec_json};
vegaEmbed("#view", spec, {{actions: false}});
</script>
</body>
</html>
"""


def chart_json(spec: dict) -> str:
    return json.dumps(spec, sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def render_chart(
    plan: ChartPlan,
    doc: ResultsDocument,
    args: VisualizerArgs,
) -> list[ChartDocument]:
    """Render one plan to chart documents and write the requested files.

    Returns an empty list (after warning) when filtering leaves no data.
    """
    spec, chart_warnings = build_chart_spec(plan, doc, args)
    if spec is None:
        return []
    name = f"{plan.metric_id}__{plan.chart_type}"
    document = ChartDocument(name=name, spec=spec, warnings=chart_warnings)
    os.makedirs(args.output_dir, exist_ok=True)
    if "json" in args.formats:
        path = os.path.join(args.output_dir, f"{name}.json")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(chart_json(spec))
    if "html" in args.formats:
        path = os.path.join(args.output_dir, f"{name}.html")
        # "</" inside embedded JSON strings would terminate the script tag;
        # "<\/" is the same JSON value and inert in HTML
        embedded = chart_json(spec).strip().replace("</", "<\\/")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(
                _HTML_TEMPLATE.format(title=spec.get("title", name), spec_json=embedded)
            )
    return [document]


def render_stats_report(doc: ResultsDocument, args: VisualizerArgs) -> list[str]:
    """Write the descriptive-statistics table as a report file."""
    table = doc.metrics.get(STATS_METRIC)
    if table is None:
        return []
    os.makedirs(args.output_dir, exist_ok=True)
    names = [v["name"] for v in doc.variables]
    header = names + [
        "num_texts", "num_units", "num_duplicates", "avg_text_length", "vocab_size",
    ]
    lines = [
        "| " + " | ".join(header) + " |",
        "| " + " | ".join("---" for _ in header) + " |",
    ]
    ordered = sorted(k for k in table if k != GLOBAL_STATS_KEY)
    for tuple_key in ordered + [GLOBAL_STATS_KEY]:
        if tuple_key not in table:
            continue
        record = table[tuple_key]
        if tuple_key == GLOBAL_STATS_KEY:
            values = ["(all)"] * len(names) if names else []
            if not names:
                values = []
        else:
            values = list(deserialize_tuple(tuple_key, len(names)))
        cells = values + [
            str(record["num_texts"]),
            str(record["num_units"]),
            str(record["num_duplicates"]),
            f"{record['avg_text_length']:.2f}",
            str(record["vocab_size"]),
        ]
        lines.append("| " + " | ".join(cells) + " |")
    written = []
    md_path = os.path.join(args.output_dir, "stats__report.md")
    with open(md_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    written.append(md_path)
    if "json" in args.formats:
        json_path = os.path.join(args.output_dir, "stats__report.json")
        with open(json_path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(table, sort_keys=True, ensure_ascii=False, indent=2) + "\n")
        written.append(json_path)
    return written


def visualize_document(doc: ResultsDocument, args: VisualizerArgs) -> list[ChartDocument]:
    """Plan and render every metric of a results document."""
    documents: list[ChartDocument] = []
    for metric_id in doc.metric_ids:
        if metric_id == STATS_METRIC:
            render_stats_report(doc, args)
            continue
        plans = plan_charts(
            metric_id, doc.variables, geometry_available=args.geometry is not None
        )
        for plan in plans:
            documents.extend(render_chart(plan, doc, args))
    return documents
