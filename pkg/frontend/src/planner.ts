// Chart planning, ported rule-for-rule from the engine so the explorer
// derives the same charts from a document's metadata that the pipeline
// writes to disk. One latitude/longitude coordinate pair consumes two
// declarations but one planning slot; signatures outside the matrix raise
// UnsupportedCombination with remediation text.

import {
  Channel,
  ChartPlan,
  ChartType,
  STATS_METRIC,
  VariableInfo,
  isAssociationMetric,
} from './types.js';

export class UnsupportedCombinationError extends Error {
  readonly remediation: string;

  constructor(message: string, remediation: string) {
    super(`${message} (${remediation})`);
    this.name = 'UnsupportedCombinationError';
    this.remediation = remediation;
  }
}

// Up to 3 total dimensions (variables + score + unit) the unit widget is a
// regex search box; beyond that a dropdown keeps filtering responsive.
const REGEX_WIDGET_MAX_DIMS = 3;

function widgetFor(nVariables: number): 'regex_search' | 'dropdown' {
  return nVariables + 2 <= REGEX_WIDGET_MAX_DIMS ? 'regex_search' : 'dropdown';
}

export function planCharts(
  metricId: string,
  variables: VariableInfo[],
  geometryAvailable = false,
): ChartPlan[] {
  if (metricId === STATS_METRIC) return [];
  const isAssoc = isAssociationMetric(metricId);
  const widget = isAssoc ? widgetFor(variables.length) : null;

  const plan = (
    chartType: ChartType,
    assignments: Record<string, Channel>,
    geometryKey: string | null = null,
  ): ChartPlan => ({
    chartType,
    metricId,
    assignments,
    unitWidget: widget,
    geometryKey,
  });

  const coords = variables.filter((v) => v.vtype === 'coordinate');
  const others = variables.filter((v) => v.vtype !== 'coordinate');

  if (coords.length > 0) {
    if (others.length > 0 || coords.length !== 2) {
      throw new UnsupportedCombinationError(
        'coordinate variables must come as exactly one latitude/longitude pair with no other variables',
        'declare one latitude and one longitude coordinate, and analyze other variables in separate runs',
      );
    }
    const lat = coords.find((v) => v.axis === 'latitude');
    const lon = coords.find((v) => v.axis === 'longitude');
    if (!lat || !lon) {
      throw new UnsupportedCombinationError(
        'coordinate pair needs one latitude and one longitude axis',
        'flag one declaration with axis=latitude and the other with axis=longitude',
      );
    }
    const binned = coords.map((v) => v.bins !== null && v.bins !== undefined);
    let chartType: ChartType;
    if (binned.every(Boolean)) chartType = 'binned_map';
    else if (!binned.some(Boolean)) chartType = 'geo_scatter';
    else {
      throw new UnsupportedCombinationError(
        'latitude and longitude disagree about binning',
        'bin both coordinates or neither',
      );
    }
    return [plan(chartType, { [lat.name]: 'lat', [lon.name]: 'lon', score: 'color' })];
  }

  if (others.length === 0) {
    return isAssoc
      ? [plan('bar', { unit: 'x', score: 'y' })]
      : [plan('bar', { score: 'y' })];
  }

  if (others.length === 1) {
    const v = others[0];
    if (v.vtype === 'nominal' || v.vtype === 'ordinal') {
      const assignments: Record<string, Channel> = { [v.name]: 'x', score: 'y' };
      if (isAssoc) assignments.unit = 'color';
      if (v.semantics === 'temporal') return [plan('line', assignments)];
      const plans = [plan('bar', assignments)];
      if (v.semantics === 'spatial' && geometryAvailable) {
        plans.push(plan('choropleth', { score: 'color' }, v.name));
      }
      return plans;
    }
    const chartType: ChartType = v.semantics === 'temporal' ? 'line' : 'scatter';
    return [plan(chartType, { [v.name]: 'x', score: 'y' })];
  }

  if (others.length === 2) {
    if (others.some((v) => v.vtype === 'quantitative')) {
      throw new UnsupportedCombinationError(
        'two-variable charts cannot place a quantitative variable on a categorical axis',
        'bin the quantitative variable or declare it ordinal',
      );
    }
    const temporal = others.filter((v) => v.semantics === 'temporal');
    if (temporal.length === 2) {
      throw new UnsupportedCombinationError(
        'a chart can order at most one axis by time',
        'keep one temporal variable per run',
      );
    }
    if (temporal.length === 1) {
      const other = others.find((v) => v.semantics !== 'temporal')!;
      return [plan('line', { [temporal[0].name]: 'x', [other.name]: 'color', score: 'y' })];
    }
    return [plan('heatmap', { [others[0].name]: 'x', [others[1].name]: 'y', score: 'color' })];
  }

  if (others.length === 3) {
    const axisCandidates = others.filter(
      (v) => (v.vtype === 'nominal' || v.vtype === 'ordinal') && v.semantics !== 'temporal',
    );
    if (axisCandidates.length < 2) {
      throw new UnsupportedCombinationError(
        'three-variable charts need two non-temporal nominal/ordinal variables for the heatmap axes',
        're-declare variables or split the analysis into separate runs',
      );
    }
    const [xVar, yVar] = axisCandidates;
    const third = others.find((v) => v !== xVar && v !== yVar)!;
    return [
      plan('heatmap', {
        [xVar.name]: 'x',
        [yVar.name]: 'y',
        [third.name]: 'dropdown',
        score: 'color',
      }),
    ];
  }

  throw new UnsupportedCombinationError(
    `${others.length} variables exceed the 5-dimension budget`,
    'analyze at most 3 non-coordinate variables per run',
  );
}
