// Parsing and validation of interchange documents. Validation mirrors the
// engine's deserializer: the first violation is reported with its JSON path
// so the error panel can point at the exact spot.

import {
  DIVERSITY_METRICS,
  ResultsDocument,
  STATS_METRIC,
  StatsRecord,
} from './types.js';
import { deserializeTuple } from './tuples.js';

export const SCHEMA_VERSION = '1';

const STATS_FIELDS: (keyof StatsRecord)[] = [
  'num_texts', 'num_units', 'num_duplicates', 'avg_text_length', 'vocab_size',
];

export class SchemaError extends Error {
  readonly path: string;

  constructor(path: string, message: string) {
    super(`${path}: ${message}`);
    this.name = 'SchemaError';
    this.path = path;
  }
}

function check(condition: boolean, path: string, message: string): asserts condition {
  if (!condition) throw new SchemaError(path, message);
}

function isObject(value: unknown): value is Record<string, unknown> {
  return typeof value === 'object' && value !== null && !Array.isArray(value);
}

function isFiniteNumber(value: unknown): value is number {
  return typeof value === 'number' && Number.isFinite(value);
}

export function validatePayload(payload: unknown): asserts payload is ResultsDocument {
  check(isObject(payload), '$', 'document must be a JSON object');
  check('schema' in payload, '$.schema', 'missing schema version');
  check(
    payload.schema === SCHEMA_VERSION,
    '$.schema',
    `unsupported schema version ${JSON.stringify(payload.schema)}`,
  );
  check('metadata' in payload, '$.metadata', 'missing metadata');
  const meta = payload.metadata;
  check(isObject(meta), '$.metadata', 'metadata must be an object');
  for (const field of ['version', 'created_at', 'config', 'variables']) {
    check(field in meta, `$.metadata.${field}`, `missing metadata.${field}`);
  }
  check(Array.isArray(meta.variables), '$.metadata.variables', 'variables must be an array');
  (meta.variables as unknown[]).forEach((variable, i) => {
    const path = `$.metadata.variables[${i}]`;
    check(isObject(variable), path, 'variable entry must be an object');
    for (const field of ['name', 'vtype', 'semantics', 'values']) {
      check(field in variable, `${path}.${field}`, `missing ${field}`);
    }
  });
  const config = meta.config;
  check(isObject(config), '$.metadata.config', 'config must be an object');
  check(
    Array.isArray(config.metrics),
    '$.metadata.config.metrics',
    'config.metrics must be an array',
  );
  check('metrics' in payload, '$.metrics', 'missing metrics');
  const tables = payload.metrics;
  check(isObject(tables), '$.metrics', 'metrics must be an object');

  const arity = (meta.variables as unknown[]).length;
  for (const metricId of config.metrics as string[]) {
    check(
      metricId in tables,
      `$.metrics.${metricId}`,
      `configured metric ${JSON.stringify(metricId)} has no entry`,
    );
  }
  for (const [metricId, table] of Object.entries(tables)) {
    const path = `$.metrics.${metricId}`;
    check(isObject(table), path, 'metric table must be an object');
    for (const [tupleKey, value] of Object.entries(table)) {
      const tpath = `${path}.${tupleKey || '<global>'}`;
      if (!(metricId === STATS_METRIC && tupleKey === '')) {
        try {
          deserializeTuple(tupleKey, arity);
        } catch (err) {
          throw new SchemaError(tpath, (err as Error).message);
        }
      }
      if (metricId === STATS_METRIC) {
        check(isObject(value), tpath, 'stats record must be an object');
        for (const field of STATS_FIELDS) {
          check(
            field in value && isFiniteNumber(value[field]),
            `${tpath}.${field}`,
            `stats field ${JSON.stringify(field)} missing or not a number`,
          );
        }
      } else if ((DIVERSITY_METRICS as readonly string[]).includes(metricId)) {
        check(
          value === null || isFiniteNumber(value),
          tpath,
          'diversity score must be a number or null',
        );
      } else {
        check(isObject(value), tpath, 'score table must be an object');
        for (const [unit, score] of Object.entries(value)) {
          check(isFiniteNumber(score), `${tpath}.${unit}`, 'score must be a finite number');
        }
      }
    }
  }
}

export function parseDocument(text: string): ResultsDocument {
  let payload: unknown;
  try {
    payload = JSON.parse(text);
  } catch (err) {
    throw new SchemaError('$', `not valid JSON: ${(err as Error).message}`);
  }
  validatePayload(payload);
  return payload;
}

export function metricIds(doc: ResultsDocument): string[] {
  return [...doc.metadata.config.metrics];
}
