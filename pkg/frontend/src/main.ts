// Browser wiring for the explorer page. Static by design: the results
// document (file picker or ?doc= URL) is the only data source, charts render
// through the vega-embed script loaded in index.html, and the whole view
// state lives in the URL fragment so sessions are shareable links.

import { parseDocument, validatePayload, SchemaError, metricIds } from './document.js';
import { planCharts, UnsupportedCombinationError } from './planner.js';
import { buildChartSpec } from './charts.js';
import { patternError } from './filter.js';
import {
  ExplorerSession,
  applyFragment,
  clearFilters,
  createSession,
  encodeFragment,
} from './session.js';
import { FeatureCollection, ResultsDocument, STATS_METRIC, StatsRecord } from './types.js';

const LARGE_DOCUMENT_BYTES = 5 * 1024 * 1024;

type VegaEmbed = (el: HTMLElement, spec: unknown, opts: unknown) => Promise<unknown>;

let session: ExplorerSession | null = null;
let geometry: FeatureCollection | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function showError(message: string): void {
  const panel = el<HTMLDivElement>('error-panel');
  panel.textContent = message;
  panel.hidden = false;
}

function clearError(): void {
  el<HTMLDivElement>('error-panel').hidden = true;
}

function setProgress(message: string | null): void {
  const node = el<HTMLDivElement>('progress');
  node.textContent = message ?? '';
  node.hidden = message === null;
}

// Documents above the size budget parse off the main thread so the page
// stays responsive; the worker is built from an inline blob, keeping the
// explorer a single static bundle.
function parseInWorker(text: string): Promise<unknown> {
  return new Promise((resolve, reject) => {
    const source =
      'self.onmessage = (e) => {' +
      '  try { self.postMessage({ ok: true, payload: JSON.parse(e.data) }); }' +
      '  catch (err) { self.postMessage({ ok: false, error: String(err) }); }' +
      '};';
    const worker = new Worker(URL.createObjectURL(new Blob([source], { type: 'text/javascript' })));
    worker.onmessage = (event: MessageEvent) => {
      worker.terminate();
      if (event.data.ok) resolve(event.data.payload);
      else reject(new Error(event.data.error));
    };
    worker.onerror = (err) => {
      worker.terminate();
      reject(new Error(String(err.message)));
    };
    worker.postMessage(text);
  });
}

async function loadDocumentText(text: string): Promise<void> {
  clearError();
  try {
    let doc: ResultsDocument;
    if (text.length > LARGE_DOCUMENT_BYTES && typeof Worker !== 'undefined') {
      setProgress('parsing large document…');
      const payload = await parseInWorker(text);
      validatePayload(payload);
      doc = payload;
    } else {
      doc = parseDocument(text);
    }
    setProgress(null);
    session = createSession(doc);
    if (window.location.hash) {
      session = applyFragment(session, window.location.hash);
    }
    populateControls();
    render();
  } catch (err) {
    setProgress(null);
    if (err instanceof SchemaError) {
      showError(`invalid document at ${err.path}: ${err.message}`);
    } else {
      showError(`could not load document: ${(err as Error).message}`);
    }
  }
}

function populateControls(): void {
  if (!session) return;
  const metricSelect = el<HTMLSelectElement>('metric-select');
  metricSelect.innerHTML = '';
  for (const id of metricIds(session.document)) {
    const option = document.createElement('option');
    option.value = id;
    option.textContent = id;
    metricSelect.appendChild(option);
  }
  metricSelect.value = session.state.metric;
  syncInputs();
}

function syncInputs(): void {
  if (!session) return;
  el<HTMLInputElement>('pattern-input').value = session.state.pattern ?? '';
  el<HTMLInputElement>('topk-input').value =
    session.state.topK === null ? '' : String(session.state.topK);
}

function updateFragment(): void {
  if (!session) return;
  history.replaceState(null, '', encodeFragment(session.state));
}

function renderStats(doc: ResultsDocument): void {
  const container = el<HTMLDivElement>('chart');
  const table = doc.metrics[STATS_METRIC] as Record<string, StatsRecord>;
  const names = doc.metadata.variables.map((v) => v.name);
  const header = [...names, 'num_texts', 'num_units', 'num_duplicates', 'avg_text_length', 'vocab_size'];
  const rows = Object.keys(table)
    .sort()
    .map((key) => {
      const record = table[key];
      const label = key === '' ? names.map(() => '(all)') : key.split('::');
      return [...label, record.num_texts, record.num_units, record.num_duplicates,
              record.avg_text_length.toFixed(2), record.vocab_size];
    });
  const html = [
    '<table><thead><tr>',
    ...header.map((h) => `<th>${h}</th>`),
    '</tr></thead><tbody>',
    ...rows.map((cells) => `<tr>${cells.map((c) => `<td>${c}</td>`).join('')}</tr>`),
    '</tbody></table>',
  ].join('');
  container.innerHTML = html;
}

function render(): void {
  if (!session) return;
  const doc = session.document;
  const state = session.state;
  const container = el<HTMLDivElement>('chart');
  updateFragment();

  if (state.metric === STATS_METRIC) {
    renderStats(doc);
    return;
  }

  let plans;
  try {
    plans = planCharts(state.metric, doc.metadata.variables, geometry !== null);
  } catch (err) {
    if (err instanceof UnsupportedCombinationError) {
      showError(err.message);
      return;
    }
    throw err;
  }
  if (plans.length === 0) {
    container.textContent = 'nothing to chart for this metric';
    return;
  }
  const planSelect = el<HTMLSelectElement>('plan-select');
  planSelect.innerHTML = '';
  plans.forEach((plan, i) => {
    const option = document.createElement('option');
    option.value = String(i);
    option.textContent = plan.chartType;
    planSelect.appendChild(option);
  });
  const planIndex = Math.min(state.planIndex, plans.length - 1);
  planSelect.value = String(planIndex);

  const built = buildChartSpec(plans[planIndex], doc, {
    pattern: state.pattern,
    units: state.units,
    topK: state.topK,
    geometry,
  });
  const warningsNode = el<HTMLDivElement>('warnings');
  warningsNode.textContent = built.warnings.join('; ');
  warningsNode.hidden = built.warnings.length === 0;
  if (built.spec === null) {
    container.textContent = 'no data after filtering';
    return;
  }
  const embed = (window as unknown as { vegaEmbed?: VegaEmbed }).vegaEmbed;
  if (!embed) {
    container.textContent = 'chart renderer not loaded';
    return;
  }
  container.innerHTML = '';
  void embed(container, built.spec, { actions: false });
}

function wireEvents(): void {
  el<HTMLInputElement>('file-input').addEventListener('change', async (event) => {
    const input = event.target as HTMLInputElement;
    const file = input.files?.[0];
    if (file) await loadDocumentText(await file.text());
  });

  el<HTMLInputElement>('geometry-input').addEventListener('change', async (event) => {
    const input = event.target as HTMLInputElement;
    const file = input.files?.[0];
    if (!file) return;
    try {
      geometry = JSON.parse(await file.text()) as FeatureCollection;
      render();
    } catch (err) {
      showError(`could not read geometry: ${(err as Error).message}`);
    }
  });

  el<HTMLSelectElement>('metric-select').addEventListener('change', (event) => {
    if (!session) return;
    session.state.metric = (event.target as HTMLSelectElement).value;
    session.state.planIndex = 0;
    render();
  });

  el<HTMLSelectElement>('plan-select').addEventListener('change', (event) => {
    if (!session) return;
    session.state.planIndex = Number((event.target as HTMLSelectElement).value);
    render();
  });

  el<HTMLInputElement>('pattern-input').addEventListener('input', (event) => {
    if (!session) return;
    const pattern = (event.target as HTMLInputElement).value;
    const message = el<HTMLDivElement>('pattern-message');
    if (pattern === '') {
      message.hidden = true;
      session.state = clearFilters(session.state);
      syncInputs();
      render();
      return;
    }
    const error = patternError(pattern);
    if (error !== null) {
      // invalid pattern: show the message, keep the previous view
      message.textContent = error;
      message.hidden = false;
      return;
    }
    message.hidden = true;
    session.state.pattern = pattern;
    session.state.units = null;
    render();
  });

  el<HTMLInputElement>('topk-input').addEventListener('change', (event) => {
    if (!session) return;
    const raw = (event.target as HTMLInputElement).value;
    session.state.topK = raw === '' ? null : Math.max(1, Number(raw) || 1);
    render();
  });

  window.addEventListener('hashchange', () => {
    if (!session) return;
    session = applyFragment(session, window.location.hash);
    populateControls();
    render();
  });
}

async function boot(): Promise<void> {
  wireEvents();
  const params = new URLSearchParams(window.location.search);
  const url = params.get('doc');
  if (url) {
    try {
      setProgress('fetching document…');
      const response = await fetch(url);
      await loadDocumentText(await response.text());
    } catch (err) {
      setProgress(null);
      showError(`could not fetch ${url}: ${(err as Error).message}`);
    }
  }
}

if (typeof document !== 'undefined' && document.readyState !== 'loading') {
  void boot();
} else if (typeof document !== 'undefined') {
  document.addEventListener('DOMContentLoaded', () => void boot());
}
