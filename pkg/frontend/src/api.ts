// Typed client for the cfdcast service. All errors surface as ApiError
// with the server's module-qualified code when one was provided.

import type {
  Area,
  BacktestRecordPayload,
  CfdSeries,
  ForecastPayload,
  ForecastRequest,
  PanelSummary,
  ProfileEcho,
  ProfilePayload,
} from './types.js';

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
    public code?: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function parseError(response: Response): Promise<ApiError> {
  let code: string | undefined;
  let message = `${response.status} ${response.statusText}`;
  try {
    const body = await response.json();
    // engine errors arrive as {error, message}; FastAPI wraps some in {detail}
    const payload = body?.detail ?? body;
    if (payload?.error) code = payload.error;
    if (payload?.message) message = payload.message;
    else if (typeof payload === 'string') message = payload;
  } catch {
    // non-JSON body: keep the status text
  }
  return new ApiError(response.status, message, code);
}

export class ApiClient {
  constructor(
    private baseUrl: string = '',
    private fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (!response.ok) throw await parseError(response);
    return (await response.json()) as T;
  }

  getAreas(): Promise<Area[]> {
    return this.request('/areas');
  }

  getPanelSummary(): Promise<PanelSummary> {
    return this.request('/panel/summary');
  }

  getProfile(target: string): Promise<ProfileEcho> {
    return this.request(`/profiles/${encodeURIComponent(target)}`);
  }

  putProfile(target: string, body: Omit<ProfilePayload, 'target'> & { transcript?: unknown }): Promise<ProfileEcho> {
    return this.request(`/profiles/${encodeURIComponent(target)}`, {
      method: 'PUT',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
  }

  postForecast(body: ForecastRequest): Promise<ForecastPayload> {
    return this.request('/forecast', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
  }

  getCfd(area: string, horizon: string): Promise<CfdSeries> {
    const params = new URLSearchParams({ area, horizon });
    return this.request(`/cfd?${params}`);
  }

  getBacktest(area: string, horizon: string): Promise<{ records: BacktestRecordPayload[] }> {
    const params = new URLSearchParams({ area, horizon });
    return this.request(`/backtest?${params}`);
  }
}
