// Canvas band chart: grey prediction band, median line, dashed vertical
// markers at area-redefinition dates, optional overlay curves of traded
// areas' recorded CfDs. Layout math is exported for tests; drawing is a
// thin pass over it.

export interface OverlaySeries {
  label: string;
  dates: string[];
  values: number[];
  color: string;
}

export interface ChartData {
  dates: string[];
  mean: number[];
  lo: number[];
  mid: number[];
  hi: number[];
  markers: string[];
  overlays: OverlaySeries[];
}

export interface Margins {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

export const MARGINS: Margins = { top: 16, right: 12, bottom: 28, left: 48 };

export type Scale = (value: number) => number;

export function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0;
  if (span === 0) return () => (r0 + r1) / 2;
  return (value: number) => r0 + ((value - d0) / span) * (r1 - r0);
}

export function valueRange(data: ChartData): [number, number] {
  let min = Infinity;
  let max = -Infinity;
  const scan = (values: number[]) => {
    for (const v of values) {
      if (v < min) min = v;
      if (v > max) max = v;
    }
  };
  scan(data.lo);
  scan(data.hi);
  for (const overlay of data.overlays) scan(overlay.values);
  if (!Number.isFinite(min)) return [0, 1];
  if (min === max) return [min - 1, max + 1];
  const pad = 0.05 * (max - min);
  return [min - pad, max + pad];
}

export function timeRange(data: ChartData): [number, number] {
  const first = Date.parse(data.dates[0]);
  const last = Date.parse(data.dates[data.dates.length - 1]);
  return [first, last];
}

export interface ChartLayout {
  x: Scale;
  y: Scale;
  width: number;
  height: number;
}

export function chartLayout(data: ChartData, width: number, height: number,
                            margins: Margins = MARGINS): ChartLayout {
  const [t0, t1] = timeRange(data);
  const [v0, v1] = valueRange(data);
  return {
    x: linearScale(t0, t1, margins.left, width - margins.right),
    y: linearScale(v0, v1, height - margins.bottom, margins.top),
    width,
    height,
  };
}

function tracePath(ctx: CanvasRenderingContext2D, layout: ChartLayout,
                   dates: string[], values: number[]): void {
  dates.forEach((date, i) => {
    const px = layout.x(Date.parse(date));
    const py = layout.y(values[i]);
    if (i === 0) ctx.moveTo(px, py);
    else ctx.lineTo(px, py);
  });
}

export function drawBandChart(canvas: HTMLCanvasElement, data: ChartData): void {
  const ctx = canvas.getContext('2d');
  if (!ctx) return;
  const layout = chartLayout(data, canvas.width, canvas.height);
  ctx.clearRect(0, 0, canvas.width, canvas.height);

  // band between the outer quantiles
  ctx.beginPath();
  tracePath(ctx, layout, data.dates, data.hi);
  for (let i = data.dates.length - 1; i >= 0; i--) {
    ctx.lineTo(layout.x(Date.parse(data.dates[i])), layout.y(data.lo[i]));
  }
  ctx.closePath();
  ctx.fillStyle = 'rgba(128, 128, 128, 0.35)';
  ctx.fill();

  // median
  ctx.beginPath();
  tracePath(ctx, layout, data.dates, data.mid);
  ctx.strokeStyle = '#1a1a1a';
  ctx.lineWidth = 1.5;
  ctx.stroke();

  // overlays of recorded series
  for (const overlay of data.overlays) {
    ctx.beginPath();
    tracePath(ctx, layout, overlay.dates, overlay.values);
    ctx.strokeStyle = overlay.color;
    ctx.lineWidth = 1;
    ctx.stroke();
  }

  // redefinition markers
  ctx.save();
  ctx.setLineDash([4, 4]);
  ctx.strokeStyle = '#555';
  for (const marker of data.markers) {
    const ts = Date.parse(marker);
    const [t0, t1] = timeRange(data);
    if (ts < t0 || ts > t1) continue;
    const px = layout.x(ts);
    ctx.beginPath();
    ctx.moveTo(px, MARGINS.top);
    ctx.lineTo(px, canvas.height - MARGINS.bottom);
    ctx.stroke();
  }
  ctx.restore();

  drawAxes(ctx, layout, data);
  drawLegend(ctx, data);
}

function drawAxes(ctx: CanvasRenderingContext2D, layout: ChartLayout, data: ChartData): void {
  const [v0, v1] = valueRange(data);
  ctx.strokeStyle = '#999';
  ctx.fillStyle = '#333';
  ctx.font = '10px sans-serif';
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(MARGINS.left, MARGINS.top);
  ctx.lineTo(MARGINS.left, layout.height - MARGINS.bottom);
  ctx.lineTo(layout.width - MARGINS.right, layout.height - MARGINS.bottom);
  ctx.stroke();
  const ticks = 5;
  for (let i = 0; i <= ticks; i++) {
    const value = v0 + ((v1 - v0) * i) / ticks;
    const py = layout.y(value);
    ctx.fillText(value.toFixed(1), 4, py + 3);
  }
  const n = data.dates.length;
  const step = Math.max(1, Math.floor(n / 6));
  for (let i = 0; i < n; i += step) {
    const px = layout.x(Date.parse(data.dates[i]));
    ctx.fillText(data.dates[i], px - 26, layout.height - 10);
  }
}

function drawLegend(ctx: CanvasRenderingContext2D, data: ChartData): void {
  ctx.font = '11px sans-serif';
  let px = MARGINS.left + 8;
  const py = MARGINS.top + 10;
  const entries = [
    { label: 'median', color: '#1a1a1a' },
    ...data.overlays.map((o) => ({ label: o.label, color: o.color })),
  ];
  for (const entry of entries) {
    ctx.fillStyle = entry.color;
    ctx.fillRect(px, py - 7, 14, 3);
    ctx.fillStyle = '#333';
    ctx.fillText(entry.label, px + 18, py - 2);
    px += 18 + ctx.measureText(entry.label).width + 16;
  }
}
