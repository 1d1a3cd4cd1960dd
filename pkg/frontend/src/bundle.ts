import { existsSync, readFileSync, readdirSync } from 'fs';
import { join } from 'path';

import { Series, loadSeriesFile } from './csv.js';

export interface SeriesBundle {
  series: Series[];
}

export type BundleKind = 'figure1' | 'figure2' | 'custom';

const EPS_FILE = /^series_eps_([0-9.eE+-]+)\.csv$/;

/**
 * Assemble the overlay bundle from a run directory.
 *
 * Figure bundles take every `series_eps_<x>.csv` (labelled by its timescale
 * ratio, largest first) plus `fcl_trace.csv` as the limit trace; the limit's
 * blow-up flag comes from `fcl_outcome.json`.  Custom bundles take every CSV
 * in the directory that has t and N columns.
 */
export function loadBundle(dir: string, kind: BundleKind): SeriesBundle {
  if (!existsSync(dir)) {
    throw new Error(`input directory not found: ${dir}`);
  }
  const names = readdirSync(dir).sort();
  const series: Series[] = [];
  if (kind === 'custom') {
    for (const name of names) {
      if (!name.endsWith('.csv')) continue;
      try {
        series.push(loadSeriesFile(join(dir, name), name.replace(/\.csv$/, '')));
      } catch (err) {
        if (String(err).includes('missing required column')) continue;
        throw err;
      }
    }
  } else {
    const epsEntries: Array<{ eps: number; name: string }> = [];
    for (const name of names) {
      const m = EPS_FILE.exec(name);
      if (m) epsEntries.push({ eps: Number(m[1]), name });
    }
    epsEntries.sort((a, b) => b.eps - a.eps);
    for (const { eps, name } of epsEntries) {
      series.push(loadSeriesFile(join(dir, name), `ε=${eps}`));
    }
    const tracePath = join(dir, 'fcl_trace.csv');
    if (existsSync(tracePath)) {
      let blowup = false;
      const outcomePath = join(dir, 'fcl_outcome.json');
      if (existsSync(outcomePath)) {
        const outcome = JSON.parse(readFileSync(outcomePath, 'utf8')) as { type?: string };
        blowup = outcome.type === 'blowup';
      }
      series.push(loadSeriesFile(tracePath, 'ε=0 (limit)', blowup));
    }
  }
  if (series.length === 0) {
    throw new Error(`no firing-rate series found in ${dir}`);
  }
  const labels = new Set(series.map((s) => s.label));
  if (labels.size !== series.length) {
    throw new Error('series labels are not unique');
  }
  return { series };
}
