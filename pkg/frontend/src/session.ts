// Explorer session state and its URL-fragment codec. The whole view is
// reproducible from the fragment, so sessions are shareable links: the
// fragment holds compact JSON, percent-encoded.

import { ResultsDocument } from './types.js';
import { metricIds } from './document.js';

export interface SessionState {
  metric: string;
  // active unit filter: a regex pattern, an explicit unit list, or neither
  pattern: string | null;
  units: string[] | null;
  topK: number | null;
  planIndex: number;
  // dropdown-channel variable selections, variable name -> value
  slice: Record<string, string>;
}

export interface ExplorerSession {
  document: ResultsDocument;
  state: SessionState;
}

export const DEFAULT_TOP_K = 20;

export function defaultState(doc: ResultsDocument): SessionState {
  return {
    metric: metricIds(doc)[0],
    pattern: null,
    units: null,
    topK: DEFAULT_TOP_K,
    planIndex: 0,
    slice: {},
  };
}

export function createSession(doc: ResultsDocument): ExplorerSession {
  return { document: doc, state: defaultState(doc) };
}

export function clearFilters(state: SessionState): SessionState {
  // back to the default top-k view
  return { ...state, pattern: null, units: null, topK: DEFAULT_TOP_K };
}

export function encodeFragment(state: SessionState): string {
  const compact: Record<string, unknown> = { m: state.metric, i: state.planIndex };
  if (state.pattern !== null) compact.p = state.pattern;
  if (state.units !== null) compact.u = state.units;
  if (state.topK !== null) compact.k = state.topK;
  if (Object.keys(state.slice).length > 0) compact.s = state.slice;
  return '#' + encodeURIComponent(JSON.stringify(compact));
}

export function decodeFragment(fragment: string): SessionState | null {
  const raw = fragment.startsWith('#') ? fragment.slice(1) : fragment;
  if (!raw) return null;
  let compact: Record<string, unknown>;
  try {
    compact = JSON.parse(decodeURIComponent(raw));
  } catch {
    return null;
  }
  if (typeof compact !== 'object' || compact === null) return null;
  if (typeof compact.m !== 'string') return null;
  return {
    metric: compact.m,
    pattern: typeof compact.p === 'string' ? compact.p : null,
    units: Array.isArray(compact.u) ? compact.u.map(String) : null,
    topK: typeof compact.k === 'number' ? compact.k : null,
    planIndex: typeof compact.i === 'number' ? compact.i : 0,
    slice:
      typeof compact.s === 'object' && compact.s !== null
        ? Object.fromEntries(
            Object.entries(compact.s as Record<string, unknown>).map(([k, v]) => [k, String(v)]),
          )
        : {},
  };
}

export function applyFragment(session: ExplorerSession, fragment: string): ExplorerSession {
  const state = decodeFragment(fragment);
  if (state === null) return session;
  if (!metricIds(session.document).includes(state.metric)) return session;
  return { document: session.document, state };
}
