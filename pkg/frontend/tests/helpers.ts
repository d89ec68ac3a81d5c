import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';

import { parseDocument } from '../src/document.js';
import { FeatureCollection, ResultsDocument } from '../src/types.js';

const HERE = dirname(fileURLToPath(import.meta.url));
// golden fixtures are shared with the engine's test suite
export const GOLDEN_DIR = join(HERE, '..', '..', 'tests', 'data', 'golden');
export const SOURCE_DIR = join(HERE, '..', '..', 'tests', 'data', 'source');

export function goldenText(name: string): string {
  return readFileSync(join(GOLDEN_DIR, name), 'utf-8');
}

export function goldenDocument(name: string): ResultsDocument {
  return parseDocument(goldenText(name));
}

export function regionGeometry(): FeatureCollection {
  return JSON.parse(
    readFileSync(join(SOURCE_DIR, 'regions_mini.geojson'), 'utf-8'),
  ) as FeatureCollection;
}
