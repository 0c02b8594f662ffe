// @vitest-environment happy-dom
import { describe, expect, it, vi } from 'vitest';

import type { ApiClient } from './api.js';
import { chartLayout, linearScale, valueRange, type ChartData } from './chart.js';
import { ForecastRunner, chartDataFrom, renderExplorer } from './explorer.js';
import type { Area, ForecastPayload, PanelSummary } from './types.js';

const SUMMARY: PanelSummary = {
  start: '2009-01-05',
  end: '2009-12-31',
  n_dates: 361,
  epochs: ['2009-01-05..2009-06-30', '2009-07-01..2009-12-31'],
  redefinitions: ['2009-07-01'],
  areas: {},
  coverage: { cfd: { 'NO1/M1': 200 }, forward: { M1: 250 }, reservoir: { NO1: 52 } },
  n_diagnostics: 0,
};

const AREAS: Area[] = [
  { code: 'NO1', has_hydro: true, observed_cfd: true },
  { code: 'SE', has_hydro: true, observed_cfd: true },
  { code: 'NO2', has_hydro: true, observed_cfd: false },
];

function payloadFor(target: string, seed: number): ForecastPayload {
  return {
    target,
    horizon: 'M1',
    dates: ['2009-01-05', '2009-01-06', '2009-01-07'],
    mean: [1 + seed, 2 + seed, 3 + seed],
    quantiles: {
      '0.025': [0 + seed, 1 + seed, 2 + seed],
      '0.5': [1 + seed, 2 + seed, 3 + seed],
      '0.975': [2 + seed, 3 + seed, 4 + seed],
    },
    n_draws: 100,
    provenance: {
      profile_hash: 'h', epoch_ids: ['e'], seed, n_draws: 100,
      levels: [0.025, 0.5, 0.975], noise: false, days_per_month: 21,
    },
  };
}

describe('ForecastRunner', () => {
  it('keeps one request in flight per target; the newest queued wins', async () => {
    const resolvers: Array<(p: ForecastPayload) => void> = [];
    const api = {
      postForecast: vi.fn(
        (req: { target: string; seed?: number }) =>
          new Promise<ForecastPayload>((resolve) => {
            resolvers.push(() => resolve(payloadFor(req.target, req.seed ?? 0)));
          }),
      ),
    } as unknown as ApiClient;
    const results: ForecastPayload[] = [];
    const busy: boolean[] = [];
    const runner = new ForecastRunner(api, (p) => results.push(p), () => undefined,
                                      (_t, b) => busy.push(b));

    const first = runner.request({ target: 'NO2', horizon: 'M1', seed: 1 });
    void runner.request({ target: 'NO2', horizon: 'M1', seed: 2 });
    void runner.request({ target: 'NO2', horizon: 'M1', seed: 3 });
    expect(api.postForecast).toHaveBeenCalledTimes(1);
    expect(runner.isBusy('NO2')).toBe(true);

    resolvers[0](payloadFor('NO2', 1));
    await first;
    await vi.waitFor(() => expect(api.postForecast).toHaveBeenCalledTimes(2));
    resolvers[1](payloadFor('NO2', 3));
    await vi.waitFor(() => expect(results).toHaveLength(2));
    // seed 2 was superseded by seed 3 before the first run finished
    expect((api.postForecast as any).mock.calls.map((c: any[]) => c[0].seed)).toEqual([1, 3]);
    expect(busy).toEqual([true, false, true, false]);
  });

  it('different targets run concurrently', async () => {
    const api = {
      postForecast: vi.fn(async (req: { target: string }) => payloadFor(req.target, 0)),
    } as unknown as ApiClient;
    const runner = new ForecastRunner(api, () => undefined);
    await Promise.all([
      runner.request({ target: 'NO2', horizon: 'M1' }),
      runner.request({ target: 'NO3', horizon: 'M1' }),
    ]);
    expect(api.postForecast).toHaveBeenCalledTimes(2);
  });

  it('reports errors through the error callback and clears the busy flag', async () => {
    const api = {
      postForecast: vi.fn(async () => {
        throw new Error('boom');
      }),
    } as unknown as ApiClient;
    const errors: unknown[] = [];
    const runner = new ForecastRunner(api, () => undefined, (e) => errors.push(e));
    await runner.request({ target: 'NO2', horizon: 'M1' });
    expect(errors).toHaveLength(1);
    expect(runner.isBusy('NO2')).toBe(false);
  });
});

describe('chart data', () => {
  it('maps payload quantiles onto the band and keeps markers', () => {
    const data = chartDataFrom(payloadFor('NO2', 0), SUMMARY, []);
    expect(data.lo).toEqual([0, 1, 2]);
    expect(data.mid).toEqual([1, 2, 3]);
    expect(data.hi).toEqual([2, 3, 4]);
    expect(data.markers).toEqual(['2009-07-01']);
  });

  it('linear scale maps domain ends onto range ends', () => {
    const scale = linearScale(0, 10, 100, 200);
    expect(scale(0)).toBe(100);
    expect(scale(10)).toBe(200);
    expect(scale(5)).toBe(150);
  });

  it('value range covers band and overlays with padding', () => {
    const data: ChartData = {
      dates: ['2009-01-05', '2009-01-06'],
      mean: [1, 2], lo: [0, 1], mid: [1, 2], hi: [2, 3],
      markers: [],
      overlays: [{ label: 'NO1', dates: ['2009-01-05'], values: [10], color: '#f00' }],
    };
    const [lo, hi] = valueRange(data);
    expect(lo).toBeLessThan(0);
    expect(hi).toBeGreaterThan(10);
    const layout = chartLayout(data, 900, 380);
    expect(layout.y(lo)).toBeGreaterThan(layout.y(hi)); // canvas y grows downward
  });
});

describe('renderExplorer', () => {
  it('renders numbers straight from the payload and downloads its CSV', async () => {
    const payload = payloadFor('NO2', 5);
    const api = {
      postForecast: vi.fn(async () => payload),
      getCfd: vi.fn(async () => ({ area: 'NO1', horizon: 'M1', dates: [], prices: [] })),
    } as unknown as ApiClient;
    document.body.innerHTML = '<div id="x"></div>';
    const root = document.getElementById('x')!;
    const downloads: Array<{ name: string; text: string }> = [];
    renderExplorer(root, {
      api, summary: SUMMARY, areas: AREAS,
      download: (name, text) => downloads.push({ name, text }),
    });
    expect((root.querySelector('.explorer-target') as HTMLSelectElement).value).toBe('NO2');
    (root.querySelector('.explorer-run') as HTMLButtonElement).click();
    await vi.waitFor(() =>
      expect((root.querySelector('.explorer-csv') as HTMLButtonElement).disabled).toBe(false));
    // band width shown = mean of (q0.975 - q0.025) from the payload, 2.000
    expect(root.querySelector('.explorer-status')!.textContent).toContain('2.000');
    expect(root.querySelector('.explorer-provenance')!.textContent).toContain('seed 5');
    (root.querySelector('.explorer-csv') as HTMLButtonElement).click();
    expect(downloads).toHaveLength(1);
    expect(downloads[0].name).toBe('NO2_M1_forecast.csv');
    expect(downloads[0].text.split('\n')[1]).toBe('2009-01-05,6,5,6,7,100');
  });
});
