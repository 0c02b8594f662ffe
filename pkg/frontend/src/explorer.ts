// Forecast explorer: posts forecast requests, renders the band chart with
// redefinition markers and traded-area overlays, and offers the payload
// as a CSV download. Requests per target are debounced to one in flight;
// edits during a run are queued and the latest wins.

import { ApiClient } from './api.js';
import { drawBandChart, type ChartData, type OverlaySeries } from './chart.js';
import { forecastCsv, meanBandWidth } from './normalize.js';
import type { Area, ForecastPayload, ForecastRequest, PanelSummary } from './types.js';

const OVERLAY_COLORS = ['#c0392b', '#2471a3', '#1e8449', '#9a7d0a'];

type ForecastHandler = (payload: ForecastPayload) => void;

/** One request in flight per target; the newest queued request wins. */
export class ForecastRunner {
  private inFlight = new Set<string>();
  private pending = new Map<string, ForecastRequest>();

  constructor(
    private api: ApiClient,
    private onResult: ForecastHandler,
    private onError: (error: unknown) => void = () => undefined,
    private onBusy: (target: string, busy: boolean) => void = () => undefined,
  ) {}

  isBusy(target: string): boolean {
    return this.inFlight.has(target);
  }

  async request(req: ForecastRequest): Promise<void> {
    if (this.inFlight.has(req.target)) {
      this.pending.set(req.target, req);
      return;
    }
    this.inFlight.add(req.target);
    this.onBusy(req.target, true);
    try {
      const payload = await this.api.postForecast(req);
      this.onResult(payload);
    } catch (error) {
      this.onError(error);
    } finally {
      this.inFlight.delete(req.target);
      this.onBusy(req.target, false);
      const queued = this.pending.get(req.target);
      if (queued) {
        this.pending.delete(req.target);
        void this.request(queued); // superseding run; not awaited by this caller
      }
    }
  }
}

export function chartDataFrom(payload: ForecastPayload, summary: PanelSummary,
                              overlays: OverlaySeries[]): ChartData {
  const levels = Object.keys(payload.quantiles).sort((a, b) => Number(a) - Number(b));
  const lo = payload.quantiles[levels[0]];
  const hi = payload.quantiles[levels[levels.length - 1]];
  const midKey = levels.includes('0.5') ? '0.5' : levels[Math.floor(levels.length / 2)];
  return {
    dates: payload.dates,
    mean: payload.mean,
    lo,
    mid: payload.quantiles[midKey],
    hi,
    markers: summary.redefinitions,
    overlays,
  };
}

export interface ExplorerDeps {
  api: ApiClient;
  summary: PanelSummary;
  areas: Area[];
  download?: (name: string, text: string) => void;
}

function defaultDownload(name: string, text: string): void {
  const blob = new Blob([text], { type: 'text/csv' });
  const link = document.createElement('a');
  link.href = URL.createObjectURL(blob);
  link.download = name;
  link.click();
  URL.revokeObjectURL(link.href);
}

export function renderExplorer(root: HTMLElement, deps: ExplorerDeps): void {
  const { api, summary, areas } = deps;
  const download = deps.download ?? defaultDownload;
  const targets = areas.filter((a) => !a.observed_cfd).map((a) => a.code);
  const observed = areas.filter((a) => a.observed_cfd).map((a) => a.code);
  const horizons = Object.keys(summary.coverage.forward);

  root.innerHTML = '';
  const controls = document.createElement('div');
  controls.className = 'explorer-controls';

  const targetSelect = document.createElement('select');
  targetSelect.className = 'explorer-target';
  for (const code of targets) {
    const option = document.createElement('option');
    option.value = code;
    option.textContent = code;
    targetSelect.appendChild(option);
  }

  const horizonSelect = document.createElement('select');
  horizonSelect.className = 'explorer-horizon';
  for (const h of horizons) {
    const option = document.createElement('option');
    option.value = h;
    option.textContent = h;
    horizonSelect.appendChild(option);
  }

  const nInput = document.createElement('input');
  nInput.type = 'number';
  nInput.value = '2000';
  nInput.min = '1';
  nInput.className = 'explorer-n';

  const seedInput = document.createElement('input');
  seedInput.type = 'number';
  seedInput.value = '0';
  seedInput.className = 'explorer-seed';

  const runButton = document.createElement('button');
  runButton.textContent = 'Run forecast';
  runButton.className = 'explorer-run';

  const csvButton = document.createElement('button');
  csvButton.textContent = 'Download CSV';
  csvButton.className = 'explorer-csv';
  csvButton.disabled = true;

  const staleBadge = document.createElement('span');
  staleBadge.className = 'explorer-stale';
  staleBadge.hidden = true;
  staleBadge.textContent = 'running…';

  const overlayBoxes: Record<string, HTMLInputElement> = {};
  const overlayWrap = document.createElement('span');
  overlayWrap.className = 'explorer-overlays';
  for (const code of observed) {
    const box = document.createElement('input');
    box.type = 'checkbox';
    box.dataset.overlay = code;
    const label = document.createElement('label');
    label.textContent = code;
    overlayWrap.append(box, label);
    overlayBoxes[code] = box;
  }

  controls.append(targetSelect, horizonSelect, nInput, seedInput, runButton,
                  csvButton, overlayWrap, staleBadge);
  root.appendChild(controls);

  const status = document.createElement('p');
  status.className = 'explorer-status';
  root.appendChild(status);

  const canvas = document.createElement('canvas');
  canvas.width = 900;
  canvas.height = 380;
  canvas.className = 'explorer-chart';
  root.appendChild(canvas);

  const provenance = document.createElement('p');
  provenance.className = 'explorer-provenance';
  root.appendChild(provenance);

  let lastPayload: ForecastPayload | null = null;

  const redraw = async () => {
    if (!lastPayload) return;
    const overlays: OverlaySeries[] = [];
    let colorIdx = 0;
    for (const code of observed) {
      if (!overlayBoxes[code].checked) continue;
      try {
        const series = await api.getCfd(code, lastPayload.horizon);
        overlays.push({
          label: code,
          dates: series.dates,
          values: series.prices,
          color: OVERLAY_COLORS[colorIdx++ % OVERLAY_COLORS.length],
        });
      } catch {
        // missing series: skip the overlay rather than failing the chart
      }
    }
    drawBandChart(canvas, chartDataFrom(lastPayload, summary, overlays));
  };

  const runner = new ForecastRunner(
    api,
    (payload) => {
      lastPayload = payload;
      csvButton.disabled = false;
      status.textContent =
        `mean 95% band width ${meanBandWidth(payload).toFixed(3)} over ` +
        `${payload.dates.length} days`;
      provenance.textContent =
        `profile ${payload.provenance.profile_hash.slice(0, 12)}…, ` +
        `seed ${payload.provenance.seed}, N=${payload.provenance.n_draws}, ` +
        `epochs ${payload.provenance.epoch_ids.join(', ')}`;
      void redraw();
    },
    (error) => {
      status.textContent = String(error instanceof Error ? error.message : error);
    },
    (_target, busy) => {
      staleBadge.hidden = !busy;
      canvas.classList.toggle('stale', busy);
    },
  );

  runButton.addEventListener('click', () => {
    void runner.request({
      target: targetSelect.value,
      horizon: horizonSelect.value,
      n_draws: Number(nInput.value),
      seed: Number(seedInput.value),
    });
  });
  csvButton.addEventListener('click', () => {
    if (!lastPayload) return;
    download(
      `${lastPayload.target}_${lastPayload.horizon}_forecast.csv`,
      forecastCsv(lastPayload),
    );
  });
  for (const box of Object.values(overlayBoxes)) {
    box.addEventListener('change', () => void redraw());
  }
}
