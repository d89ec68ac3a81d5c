// Vega-Lite v5 spec construction, mirroring the engine's renderer: the same
// marks, encodings, unit-filter params and layered geoshape construction, so
// a chart in the explorer looks like the chart files the pipeline writes.

import {
  AssociationTable,
  ChartPlan,
  DiversityTable,
  FeatureCollection,
  ResultsDocument,
  VariableInfo,
  isAssociationMetric,
  metricIsNonNegative,
} from './types.js';
import { deserializeTuple } from './tuples.js';
import { filterTable, restrictTable, topK } from './filter.js';

export const VEGA_LITE_SCHEMA = 'https://vega.github.io/schema/vega-lite/v5.json';

export interface ChartFilters {
  pattern?: string | null;
  units?: string[] | null;
  topK?: number | null;
  geometry?: FeatureCollection | null;
  geometryProperty?: string;
  background?: FeatureCollection | null;
}

type Row = Record<string, string | number>;

interface PreparedData {
  rows: Row[];
  units: string[];
  bestUnit: string;
}

function variableByName(doc: ResultsDocument, name: string): VariableInfo | undefined {
  return doc.metadata.variables.find((v) => v.name === name);
}

function variableValues(doc: ResultsDocument, name: string): string[] {
  return variableByName(doc, name)?.values ?? [];
}

function scoreScale(metricId: string): Record<string, unknown> {
  return metricIsNonNegative(metricId)
    ? { scheme: 'blues' }
    : { scheme: 'redblue', domainMid: 0, reverse: true };
}

function temporalOrder(values: string[]): string[] {
  const key = (value: string): [number, string] => {
    const time = Date.parse(value);
    if (!Number.isNaN(time) && /^\d{4}/.test(value)) {
      return [0, new Date(time).toISOString()];
    }
    const num = Number(value);
    if (value !== '' && Number.isFinite(num)) {
      return [1, (num + 1e12).toFixed(6).padStart(30, '0')];
    }
    return [2, value];
  };
  return [...values].sort((a, b) => {
    const ka = key(a);
    const kb = key(b);
    if (ka[0] !== kb[0]) return ka[0] - kb[0];
    return ka[1] < kb[1] ? -1 : ka[1] > kb[1] ? 1 : 0;
  });
}

function associationRows(doc: ResultsDocument, table: AssociationTable): PreparedData {
  const names = doc.metadata.variables.map((v) => v.name);
  const rows: Row[] = [];
  const units = new Set<string>();
  let bestUnit = '';
  let bestScore = -Infinity;
  for (const tupleKey of Object.keys(table).sort()) {
    const values = deserializeTuple(tupleKey, names.length);
    for (const unit of Object.keys(table[tupleKey]).sort()) {
      const score = table[tupleKey][unit];
      const row: Row = {};
      names.forEach((name, i) => {
        row[name] = values[i];
      });
      row.unit = unit;
      row.score = score;
      rows.push(row);
      units.add(unit);
      if (score > bestScore || (score === bestScore && unit < bestUnit)) {
        bestScore = score;
        bestUnit = unit;
      }
    }
  }
  return { rows, units: [...units].sort(), bestUnit };
}

function diversityRows(doc: ResultsDocument, table: DiversityTable): Row[] {
  const names = doc.metadata.variables.map((v) => v.name);
  const rows: Row[] = [];
  for (const tupleKey of Object.keys(table).sort()) {
    const score = table[tupleKey];
    if (score === null) continue;
    const values = deserializeTuple(tupleKey, names.length);
    const row: Row = {};
    names.forEach((name, i) => {
      row[name] = values[i];
    });
    row.score = score;
    rows.push(row);
  }
  return rows;
}

function unitParams(
  plan: ChartPlan,
  units: string[],
  bestUnit: string,
): { params: unknown[]; transforms: unknown[] } {
  if (plan.unitWidget === 'dropdown') {
    return {
      params: [
        {
          name: 'unit_selection',
          value: bestUnit,
          bind: { input: 'select', options: units, name: 'unit: ' },
        },
      ],
      transforms: [{ filter: 'datum.unit == unit_selection' }],
    };
  }
  if (plan.unitWidget === 'regex_search') {
    return {
      params: [
        {
          name: 'unit_search',
          value: '',
          bind: { input: 'text', name: 'unit search: ', placeholder: 'regular expression' },
        },
      ],
      transforms: [
        { filter: "unit_search == '' || test(regexp(unit_search), datum.unit)" },
      ],
    };
  }
  return { params: [], transforms: [] };
}

function variableDropdownParams(
  plan: ChartPlan,
  doc: ResultsDocument,
): { params: unknown[]; transforms: unknown[] } {
  const params: unknown[] = [];
  const transforms: unknown[] = [];
  for (const [fieldName, channel] of Object.entries(plan.assignments)) {
    if (channel !== 'dropdown' || fieldName === 'unit' || fieldName === 'score') continue;
    const options = variableValues(doc, fieldName);
    params.push({
      name: `select_${fieldName}`,
      value: options[0] ?? '',
      bind: { input: 'select', options, name: `${fieldName}: ` },
    });
    transforms.push({ filter: `datum['${fieldName}'] == select_${fieldName}` });
  }
  return { params, transforms };
}

const MARKS: Record<string, unknown> = {
  bar: { type: 'bar' },
  line: { type: 'line', point: true },
  heatmap: { type: 'rect' },
  scatter: { type: 'point', filled: true },
};

// Equal-width bin labels as the engine renders them: 6-decimal bounds,
// last bin right-closed.
const BIN_LABEL = /^\[(-?\d+(?:\.\d+)?), (-?\d+(?:\.\d+)?)[)\]]$/;

export function parseBinLabel(label: string): [number, number] | null {
  const match = BIN_LABEL.exec(label);
  if (!match) return null;
  return [Number(match[1]), Number(match[2])];
}

function encodingFor(plan: ChartPlan, doc: ResultsDocument): Record<string, unknown> {
  const encoding: Record<string, unknown> = {};
  const tooltip: unknown[] = [];
  for (const [fieldName, channel] of Object.entries(plan.assignments)) {
    if (fieldName === 'score') {
      const enc: Record<string, unknown> = {
        field: 'score',
        type: 'quantitative',
        title: plan.metricId,
      };
      if (channel === 'color') enc.scale = scoreScale(plan.metricId);
      encoding[channel] = enc;
      tooltip.push({ field: 'score', type: 'quantitative' });
      continue;
    }
    if (fieldName === 'unit') {
      encoding[channel] = { field: 'unit', type: 'nominal' };
      tooltip.push({ field: 'unit', type: 'nominal' });
      continue;
    }
    if (channel === 'lat' || channel === 'lon' || channel === 'dropdown') continue;
    const variable = variableByName(doc, fieldName);
    if (variable?.vtype === 'quantitative' && plan.chartType === 'scatter') {
      encoding[channel] = { field: fieldName, type: 'quantitative' };
    } else {
      const sort =
        variable?.semantics === 'temporal'
          ? temporalOrder(variable.values)
          : variableValues(doc, fieldName);
      encoding[channel] = { field: fieldName, type: 'nominal', sort };
    }
    tooltip.push({ field: fieldName, type: 'nominal' });
  }
  if (!('unit' in plan.assignments) && plan.unitWidget !== null) {
    tooltip.push({ field: 'unit', type: 'nominal' });
  }
  encoding.tooltip = tooltip;
  return encoding;
}

export interface BuiltChart {
  spec: Record<string, unknown> | null;
  warnings: string[];
}

export function buildChartSpec(
  plan: ChartPlan,
  doc: ResultsDocument,
  filters: ChartFilters = {},
): BuiltChart {
  const metricId = plan.metricId;
  const warnings: string[] = [];
  let rows: Row[];
  let params: unknown[] = [];
  let transforms: unknown[] = [];

  if (isAssociationMetric(metricId)) {
    let table = doc.metrics[metricId] as AssociationTable;
    if (filters.pattern) table = filterTable(table, filters.pattern);
    if (filters.units && filters.units.length > 0) table = restrictTable(table, filters.units);
    if (filters.topK) table = topK(table, filters.topK);
    const prepared = associationRows(doc, table);
    rows = prepared.rows;
    if (rows.length === 0) {
      return { spec: null, warnings: [`${metricId}: empty slice, chart skipped`] };
    }
    const unit = unitParams(plan, prepared.units, prepared.bestUnit);
    params = unit.params;
    transforms = unit.transforms;
  } else {
    rows = diversityRows(doc, doc.metrics[metricId] as DiversityTable);
    if (rows.length === 0) {
      return { spec: null, warnings: [`${metricId}: empty slice, chart skipped`] };
    }
  }

  const varWidgets = variableDropdownParams(plan, doc);
  params = [...params, ...varWidgets.params];
  transforms = [...transforms, ...varWidgets.transforms];

  const title = `${metricId} — ${plan.chartType}`;
  const spec: Record<string, unknown> = {
    $schema: VEGA_LITE_SCHEMA,
    title,
    data: { values: rows },
  };
  if (params.length > 0) spec.params = params;
  if (transforms.length > 0) spec.transform = transforms;

  if (plan.chartType === 'choropleth') {
    return buildChoropleth(plan, doc, filters, rows, params, transforms, title, warnings);
  }

  const assignment = plan.assignments;

  if (plan.chartType === 'geo_scatter') {
    const latName = Object.keys(assignment).find((k) => assignment[k] === 'lat')!;
    const lonName = Object.keys(assignment).find((k) => assignment[k] === 'lon')!;
    const plottable: Row[] = [];
    for (const row of rows) {
      const lat = Number(row[latName]);
      const lon = Number(row[lonName]);
      if (!Number.isFinite(lat) || !Number.isFinite(lon)) continue;
      plottable.push({ ...row, [latName]: lat, [lonName]: lon });
    }
    spec.data = { values: plottable };
    delete spec.transform;
    const hasUnit = 'unit' in plan.assignments || plan.unitWidget !== null;
    const geoTooltip: unknown[] = [
      { field: latName, type: 'quantitative' },
      { field: lonName, type: 'quantitative' },
    ];
    if (hasUnit) geoTooltip.push({ field: 'unit', type: 'nominal' });
    geoTooltip.push({ field: 'score', type: 'quantitative' });
    const layerSpec: Record<string, unknown> = {
      mark: { type: 'circle', opacity: 0.85 },
      encoding: {
        latitude: { field: latName, type: 'quantitative' },
        longitude: { field: lonName, type: 'quantitative' },
        color: {
          field: 'score',
          type: 'quantitative',
          title: metricId,
          scale: scoreScale(metricId),
        },
        tooltip: geoTooltip,
      },
    };
    if (transforms.length > 0) layerSpec.transform = transforms;
    if (filters.background) {
      spec.layer = [
        {
          data: { values: filters.background.features },
          mark: { type: 'geoshape', fill: '#f0f0f0', stroke: '#bbb' },
        },
        { ...layerSpec, data: { values: plottable } },
      ];
      delete spec.data;
    } else {
      Object.assign(spec, layerSpec);
    }
    spec.projection = { type: 'mercator' };
    return { spec, warnings };
  }

  if (plan.chartType === 'binned_map') {
    const latName = Object.keys(assignment).find((k) => assignment[k] === 'lat')!;
    const lonName = Object.keys(assignment).find((k) => assignment[k] === 'lon')!;
    const plottable: Row[] = [];
    for (const row of rows) {
      const latBounds = parseBinLabel(String(row[latName]));
      const lonBounds = parseBinLabel(String(row[lonName]));
      if (!latBounds || !lonBounds) continue; // missing-coordinate bins
      plottable.push({
        ...row,
        __lat0: latBounds[0],
        __lat1: latBounds[1],
        __lon0: lonBounds[0],
        __lon1: lonBounds[1],
      });
    }
    const hasUnit = 'unit' in plan.assignments || plan.unitWidget !== null;
    const binTooltip: unknown[] = [
      { field: latName, type: 'nominal' },
      { field: lonName, type: 'nominal' },
    ];
    if (hasUnit) binTooltip.push({ field: 'unit', type: 'nominal' });
    binTooltip.push({ field: 'score', type: 'quantitative' });
    // bins drawn as geo-rectangles in projected space, so a geometry
    // background composes naturally underneath
    const rectLayer: Record<string, unknown> = {
      mark: { type: 'rect', opacity: 0.85, stroke: '#fff', strokeWidth: 0.3 },
      encoding: {
        longitude: { field: '__lon0', type: 'quantitative' },
        longitude2: { field: '__lon1' },
        latitude: { field: '__lat0', type: 'quantitative' },
        latitude2: { field: '__lat1' },
        color: {
          field: 'score',
          type: 'quantitative',
          title: metricId,
          scale: scoreScale(metricId),
        },
        tooltip: binTooltip,
      },
    };
    if (transforms.length > 0) rectLayer.transform = transforms;
    delete spec.transform;
    if (filters.background) {
      spec.layer = [
        {
          data: { values: filters.background.features },
          mark: { type: 'geoshape', fill: '#f0f0f0', stroke: '#bbb' },
        },
        { ...rectLayer, data: { values: plottable } },
      ];
      delete spec.data;
    } else {
      spec.data = { values: plottable };
      Object.assign(spec, rectLayer);
    }
    spec.projection = { type: 'mercator' };
    return { spec, warnings };
  }

  spec.mark = MARKS[plan.chartType];
  spec.encoding = encodingFor(plan, doc);
  return { spec, warnings };
}

function buildChoropleth(
  plan: ChartPlan,
  doc: ResultsDocument,
  filters: ChartFilters,
  rows: Row[],
  params: unknown[],
  transforms: unknown[],
  title: string,
  warnings: string[],
): BuiltChart {
  const geometry = filters.geometry;
  if (!geometry) {
    return { spec: null, warnings: ['choropleth needs a region geometry file'] };
  }
  const prop = filters.geometryProperty ?? 'name';
  const keyOf = (feature: { properties: Record<string, unknown> }): string =>
    String(feature.properties?.[prop] ?? '').toLowerCase();

  const featureKeys = new Set(geometry.features.map(keyOf));
  const joinField = plan.geometryKey ?? '';
  const matchedRows: Row[] = [];
  const unmatched = new Set<string>();
  for (const row of rows) {
    const region = String(row[joinField] ?? '');
    if (featureKeys.has(region.toLowerCase())) {
      matchedRows.push({ ...row, __match: region.toLowerCase() });
    } else {
      unmatched.add(region);
    }
  }
  for (const value of [...unmatched].sort()) {
    warnings.push(`no geometry feature matches ${joinField}=${JSON.stringify(value)}`);
  }

  const keyedFeatures = geometry.features.map((feature) => ({
    ...feature,
    __match: keyOf(feature),
  }));
  const spec: Record<string, unknown> = {
    $schema: VEGA_LITE_SCHEMA,
    title,
    layer: [
      {
        data: { values: keyedFeatures },
        mark: { type: 'geoshape', fill: '#f0f0f0', stroke: '#bbb' },
      },
      {
        data: { values: matchedRows },
        transform: [
          ...transforms,
          {
            lookup: '__match',
            from: { data: { values: keyedFeatures }, key: '__match' },
            as: 'geo',
          },
          { filter: 'isValid(datum.geo)' },
        ],
        mark: { type: 'geoshape', stroke: '#fff', strokeWidth: 0.5 },
        encoding: {
          shape: { field: 'geo', type: 'geojson' },
          color: {
            field: 'score',
            type: 'quantitative',
            title: plan.metricId,
            scale: scoreScale(plan.metricId),
          },
          tooltip: [
            { field: joinField, type: 'nominal' },
            { field: 'score', type: 'quantitative' },
          ],
        },
      },
    ],
    projection: { type: 'mercator' },
  };
  if (params.length > 0) spec.params = params;
  return { spec, warnings };
}
