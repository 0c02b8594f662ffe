// Payload shapes of the cfdcast HTTP API. Field names mirror the server
// exactly; the UI never invents or recomputes statistics (thin client).

export interface Area {
  code: string;
  has_hydro: boolean;
  observed_cfd: boolean;
}

export interface ProfileRowPayload {
  rho: number[];
  months: number;
}

export interface ProfilePayload {
  target: string;
  observed_order: string[];
  rows: Record<string, ProfileRowPayload>;
}

export interface ProfileEcho {
  profile: ProfilePayload;
  version: string;
}

export interface Provenance {
  profile_hash: string;
  epoch_ids: string[];
  seed: number;
  n_draws: number;
  levels: number[];
  noise: boolean;
  days_per_month: number;
}

export interface ForecastPayload {
  target: string;
  horizon: string;
  dates: string[];
  mean: number[];
  quantiles: Record<string, number[]>;
  n_draws: number;
  provenance: Provenance;
  draws?: number[][];
}

export interface ForecastRequest {
  target: string;
  horizon: string;
  n_draws?: number;
  seed?: number;
  levels?: number[];
  include_draws?: boolean;
}

export interface PanelSummary {
  start: string;
  end: string;
  n_dates: number;
  epochs: string[];
  redefinitions: string[];
  areas: Record<string, { has_hydro: boolean; observed_cfd: boolean }>;
  coverage: {
    cfd: Record<string, number>;
    forward: Record<string, number>;
    reservoir: Record<string, number>;
  };
  n_diagnostics: number;
}

export interface CfdSeries {
  area: string;
  horizon: string;
  dates: string[];
  prices: number[];
}

export interface BacktestRecordPayload {
  area: string;
  horizon: string;
  period_start: string;
  period_end: string;
  quote_date: string;
  quote: number;
  realised: number;
  difference: number;
}

export const COVARIATE_LABELS: Record<string, string> = {
  FW: 'System forward price',
  SA: 'Area spot price',
  SS: 'System spot price',
  WA: 'Reservoir deviation (hydrological balance)',
};
