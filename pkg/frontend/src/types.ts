// Shared shapes for the results interchange document (schema "1") and the
// explorer's chart plans. The document is the only data source: everything
// the explorer needs (config echo, variable inventories, scores) is inside.

export interface VariableInfo {
  name: string;
  vtype: 'nominal' | 'ordinal' | 'quantitative' | 'coordinate';
  semantics: 'temporal' | 'spatial' | 'general';
  bins: number | null;
  axis: 'latitude' | 'longitude' | null;
  values: string[];
}

export interface StatsRecord {
  num_texts: number;
  num_units: number;
  num_duplicates: number;
  avg_text_length: number;
  vocab_size: number;
}

// association metrics: tuple key -> unit -> score
export type AssociationTable = Record<string, Record<string, number>>;
// diversity metrics: tuple key -> score (null where undefined)
export type DiversityTable = Record<string, number | null>;
export type StatsTable = Record<string, StatsRecord>;

export interface DocumentMetadata {
  version: string;
  created_at: string;
  config: { metrics: string[]; [key: string]: unknown };
  variables: VariableInfo[];
  summary?: { rows: number; tuples: number; vocab: number };
  [key: string]: unknown;
}

export interface ResultsDocument {
  schema: string;
  metadata: DocumentMetadata;
  metrics: Record<string, AssociationTable | DiversityTable | StatsTable>;
  [key: string]: unknown;
}

export type ChartType =
  | 'bar'
  | 'line'
  | 'heatmap'
  | 'scatter'
  | 'geo_scatter'
  | 'binned_map'
  | 'choropleth';

export type Channel = 'x' | 'y' | 'color' | 'size' | 'lat' | 'lon' | 'dropdown';

export interface ChartPlan {
  chartType: ChartType;
  metricId: string;
  // variable names plus the reserved roles "score" and "unit" -> channel
  assignments: Record<string, Channel>;
  unitWidget: 'regex_search' | 'dropdown' | null;
  geometryKey: string | null;
}

export interface GeoFeature {
  type: 'Feature';
  properties: Record<string, unknown>;
  geometry: unknown;
  [key: string]: unknown;
}

export interface FeatureCollection {
  type: 'FeatureCollection';
  features: GeoFeature[];
}

export const PMI_METRICS = [
  'pmi', 'p_pmi', 'n_pmi', 'w_pmi', 'np_pmi', 'nw_pmi', 'pw_pmi', 'npw_pmi',
] as const;

export const RELEVANCE_METRICS = [
  'relevance', 'p_relevance', 'w_relevance', 'pw_relevance',
] as const;

export const DIVERSITY_METRICS = ['ttr', 'root_ttr', 'log_ttr', 'maas'] as const;

export const STATS_METRIC = 'stats';

export function isAssociationMetric(metricId: string): boolean {
  return (
    (PMI_METRICS as readonly string[]).includes(metricId) ||
    (RELEVANCE_METRICS as readonly string[]).includes(metricId)
  );
}

export function isDiversityMetric(metricId: string): boolean {
  return (DIVERSITY_METRICS as readonly string[]).includes(metricId);
}

export function metricIsNonNegative(metricId: string): boolean {
  if ((PMI_METRICS as readonly string[]).includes(metricId)) {
    const prefix = metricId.slice(0, -'pmi'.length).replace(/_+$/, '');
    return prefix.includes('p');
  }
  if ((RELEVANCE_METRICS as readonly string[]).includes(metricId)) {
    const prefix = metricId.slice(0, -'relevance'.length).replace(/_+$/, '');
    return prefix.includes('p');
  }
  return isDiversityMetric(metricId);
}
