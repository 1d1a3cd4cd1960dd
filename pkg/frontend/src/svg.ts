import { SeriesBundle } from './bundle.js';

export type PlotStyle = 'log-N' | 'linear-N';

export interface PlotOptions {
  width?: number;
  height?: number;
  title?: string;
}

// fixed cycle so re-renders of the same bundle are byte-identical
const COLORS = ['#1f77b4', '#d62728', '#2ca02c', '#9467bd', '#ff7f0e', '#8c564b'];
const MARGIN = { left: 72, right: 24, top: 36, bottom: 54 };

export interface Scale {
  (x: number): number;
  ticks(): number[];
}

export function linearScale(lo: number, hi: number, rLo: number, rHi: number): Scale {
  const span = hi - lo || 1;
  const fn = ((x: number) => rLo + ((x - lo) / span) * (rHi - rLo)) as Scale;
  fn.ticks = () => {
    const step = niceStep(span / 6);
    const out: number[] = [];
    for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12 * span; v += step) {
      out.push(Number(v.toPrecision(12)));
    }
    return out;
  };
  return fn;
}

export function logScale(lo: number, hi: number, rLo: number, rHi: number): Scale {
  if (lo <= 0 || hi <= 0) {
    throw new Error('log scale needs positive bounds');
  }
  const lLo = Math.log10(lo);
  const lHi = Math.log10(hi);
  const span = lHi - lLo || 1;
  const fn = ((x: number) => rLo + ((Math.log10(x) - lLo) / span) * (rHi - rLo)) as Scale;
  fn.ticks = () => {
    const out: number[] = [];
    for (let e = Math.ceil(lLo); e <= Math.floor(lHi); e++) {
      out.push(10 ** e);
    }
    if (out.length === 0) out.push(10 ** Math.round(lLo));
    return out;
  };
  return fn;
}

function niceStep(raw: number): number {
  const mag = 10 ** Math.floor(Math.log10(raw));
  const frac = raw / mag;
  if (frac < 1.5) return mag;
  if (frac < 3.5) return 2 * mag;
  if (frac < 7.5) return 5 * mag;
  return 10 * mag;
}

function fmtTick(v: number): string {
  if (v !== 0 && (Math.abs(v) >= 1e4 || Math.abs(v) < 1e-3)) {
    return v.toExponential(0).replace('+', '');
  }
  return String(Number(v.toPrecision(6)));
}

function escapeXml(s: string): string {
  return s.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

/** Render the bundle as an SVG document string. */
export function render(bundle: SeriesBundle, style: PlotStyle, opts: PlotOptions = {}): string {
  if (bundle.series.length === 0) {
    throw new Error('empty bundle');
  }
  const width = opts.width ?? 960;
  const height = opts.height ?? 600;
  const x0 = MARGIN.left;
  const x1 = width - MARGIN.right;
  const y0 = height - MARGIN.bottom;
  const y1 = MARGIN.top;

  const log = style === 'log-N';
  let tMin = Infinity;
  let tMax = -Infinity;
  let nMin = Infinity;
  let nMax = -Infinity;
  for (const s of bundle.series) {
    for (let i = 0; i < s.t.length; i++) {
      const n = s.n[i];
      if (log && n <= 0) continue;
      tMin = Math.min(tMin, s.t[i]);
      tMax = Math.max(tMax, s.t[i]);
      nMin = Math.min(nMin, n);
      nMax = Math.max(nMax, n);
    }
  }
  if (!Number.isFinite(tMin) || !Number.isFinite(nMin)) {
    throw new Error('no plottable samples (log style drops nonpositive values)');
  }
  const tScale = linearScale(tMin, tMax, x0, x1);
  const nScale = log
    ? logScale(nMin, nMax * 1.05, y0, y1)
    : linearScale(Math.min(nMin, 0), nMax * 1.05, y0, y1);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="14">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  if (opts.title) {
    parts.push(
      `<text x="${(x0 + x1) / 2}" y="${y1 - 12}" text-anchor="middle" font-size="16">` +
        `${escapeXml(opts.title)}</text>`,
    );
  }

  for (const tv of tScale.ticks()) {
    const x = tScale(tv);
    parts.push(`<line x1="${x.toFixed(2)}" y1="${y0}" x2="${x.toFixed(2)}" y2="${y0 + 6}" stroke="black"/>`);
    parts.push(
      `<text x="${x.toFixed(2)}" y="${y0 + 22}" text-anchor="middle">${fmtTick(tv)}</text>`,
    );
  }
  for (const nv of nScale.ticks()) {
    const y = nScale(nv);
    parts.push(`<line x1="${x0 - 6}" y1="${y.toFixed(2)}" x2="${x0}" y2="${y.toFixed(2)}" stroke="black"/>`);
    parts.push(
      `<text x="${x0 - 10}" y="${(y + 5).toFixed(2)}" text-anchor="end">${fmtTick(nv)}</text>`,
    );
    parts.push(
      `<line x1="${x0}" y1="${y.toFixed(2)}" x2="${x1}" y2="${y.toFixed(2)}" stroke="#dddddd" stroke-width="0.5"/>`,
    );
  }
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="black"/>`);
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="black"/>`);
  parts.push(
    `<text x="${(x0 + x1) / 2}" y="${height - 12}" text-anchor="middle">t</text>`,
  );
  parts.push(
    `<text x="18" y="${(y0 + y1) / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 18 ${(y0 + y1) / 2})">N(t)${log ? ' (log scale)' : ''}</text>`,
  );

  bundle.series.forEach((s, idx) => {
    const color = COLORS[idx % COLORS.length];
    const pts: string[] = [];
    let last: { x: number; y: number } | null = null;
    for (let i = 0; i < s.t.length; i++) {
      if (log && s.n[i] <= 0) continue;
      const x = tScale(s.t[i]);
      const y = nScale(s.n[i]);
      pts.push(`${x.toFixed(2)},${y.toFixed(2)}`);
      last = { x, y };
    }
    parts.push(
      `<polyline fill="none" stroke="${color}" stroke-width="1.8" points="${pts.join(' ')}"/>`,
    );
    if (s.blowup && last) {
      // divergence marker at the last finite sample
      parts.push(
        `<path d="M ${last.x.toFixed(2)} ${(last.y - 10).toFixed(2)} l 7 14 l -14 0 Z" ` +
          `fill="${color}" class="blowup-marker"/>`,
      );
    }
  });

  const legendX = x0 + 14;
  bundle.series.forEach((s, idx) => {
    const y = y1 + 12 + idx * 20;
    const color = COLORS[idx % COLORS.length];
    parts.push(
      `<line x1="${legendX}" y1="${y}" x2="${legendX + 26}" y2="${y}" stroke="${color}" stroke-width="3"/>`,
    );
    parts.push(
      `<text x="${legendX + 34}" y="${y + 5}">${escapeXml(s.label)}${s.blowup ? ' ▲' : ''}</text>`,
    );
  });

  parts.push('</svg>');
  return parts.join('\n');
}
