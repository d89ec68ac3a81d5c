// Unit filtering with the same semantics as the engine: unanchored regex
// search over the unit key, restricted to the portable dialect (literals,
// classes, anchors, quantifiers, alternation) that both regex engines share.

import { AssociationTable } from './types.js';

export function compilePattern(pattern: string): RegExp {
  // no flags: case-sensitive, unanchored via .test (mirrors re.search)
  return new RegExp(pattern);
}

export function patternError(pattern: string): string | null {
  try {
    compilePattern(pattern);
    return null;
  } catch (err) {
    return (err as Error).message;
  }
}

export function filterUnitKeys(units: string[], pattern: string): string[] {
  const re = compilePattern(pattern);
  return units.filter((unit) => re.test(unit));
}

export function filterTable(table: AssociationTable, pattern: string): AssociationTable {
  const re = compilePattern(pattern);
  const out: AssociationTable = {};
  for (const tupleKey of Object.keys(table).sort()) {
    const kept: Record<string, number> = {};
    for (const [unit, score] of Object.entries(table[tupleKey])) {
      if (re.test(unit)) kept[unit] = score;
    }
    if (Object.keys(kept).length > 0) out[tupleKey] = kept;
  }
  return out;
}

export function restrictTable(table: AssociationTable, units: string[]): AssociationTable {
  const keep = new Set(units);
  const out: AssociationTable = {};
  for (const tupleKey of Object.keys(table).sort()) {
    const kept: Record<string, number> = {};
    for (const [unit, score] of Object.entries(table[tupleKey])) {
      if (keep.has(unit)) kept[unit] = score;
    }
    if (Object.keys(kept).length > 0) out[tupleKey] = kept;
  }
  return out;
}

export function topK(table: AssociationTable, k: number): AssociationTable {
  // ties break by (score descending, unit key ascending), as in the engine
  const out: AssociationTable = {};
  for (const tupleKey of Object.keys(table).sort()) {
    const ranked = Object.entries(table[tupleKey]).sort(
      ([ua, sa], [ub, sb]) => (sb - sa) || (ua < ub ? -1 : ua > ub ? 1 : 0),
    );
    const kept: Record<string, number> = {};
    for (const [unit, score] of ranked.slice(0, k).sort(([a], [b]) => (a < b ? -1 : 1))) {
      kept[unit] = score;
    }
    out[tupleKey] = kept;
  }
  return out;
}
