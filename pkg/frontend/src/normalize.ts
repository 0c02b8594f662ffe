// Pure helpers shared by the wizard and the explorer: share normalization
// previews, band-width summaries, CSV export of a forecast payload.

import type { ForecastPayload } from './types.js';

/** Rescale nonnegative raw scores to shares summing to 1; zeros stay zero. */
export function normalizeShares(raw: number[]): number[] {
  if (raw.some((v) => !Number.isFinite(v) || v < 0)) {
    throw new Error('scores must be finite and nonnegative');
  }
  const total = raw.reduce((acc, v) => acc + v, 0);
  if (total <= 0) throw new Error('at least one score must be positive');
  return raw.map((v) => v / total);
}

export function sharesToPercent(shares: number[]): number[] {
  return shares.map((v) => 100 * v);
}

export function formatPercent(share: number, decimals = 1): string {
  return `${(100 * share).toFixed(decimals)}%`;
}

/** Per-date interval widths between two quantile keys of the payload. */
export function bandWidths(payload: ForecastPayload, lo = '0.025', hi = '0.975'): number[] {
  const low = payload.quantiles[lo];
  const high = payload.quantiles[hi];
  if (!low || !high) {
    throw new Error(`payload is missing quantile levels ${lo}/${hi}`);
  }
  return high.map((v, i) => v - low[i]);
}

export function meanBandWidth(payload: ForecastPayload, lo = '0.025', hi = '0.975'): number {
  const widths = bandWidths(payload, lo, hi);
  return widths.reduce((acc, v) => acc + v, 0) / widths.length;
}

/** Same column contract as the engine's forecast CSV export. */
export function forecastCsv(payload: ForecastPayload): string {
  const levels = Object.keys(payload.quantiles).sort((a, b) => Number(a) - Number(b));
  const header = ['date', 'mean', ...levels.map((l) => `q${100 * Number(l)}`), 'n_draws'];
  const lines = [header.join(',')];
  payload.dates.forEach((date, i) => {
    const cells = [date, String(payload.mean[i])];
    for (const level of levels) cells.push(String(payload.quantiles[level][i]));
    cells.push(String(payload.n_draws));
    lines.push(cells.join(','));
  });
  return lines.join('\n') + '\n';
}
