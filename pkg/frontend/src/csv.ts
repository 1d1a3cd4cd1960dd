import { readFileSync } from 'fs';

export interface Series {
  label: string;
  t: number[];
  n: number[];
  /** the trace ends at a finite-time divergence and gets a marker */
  blowup: boolean;
}

export interface Table {
  header: string[];
  rows: number[][];
}

/** Parse a plain numeric CSV (no quoting; CRLF or LF line endings). */
export function parseCsv(text: string, source = '<string>'): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length < 2) {
    throw new Error(`${source}: expected a header row and at least one data row`);
  }
  const header = lines[0].split(',').map((h) => h.trim());
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(',');
    if (cells.length !== header.length) {
      throw new Error(
        `${source}: ragged row ${i + 1}: ${cells.length} cells, expected ${header.length}`,
      );
    }
    rows.push(cells.map(Number));
  }
  return { header, rows };
}

export function column(table: Table, name: string, source = '<table>'): number[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new Error(`${source}: missing required column "${name}" (has ${table.header.join(', ')})`);
  }
  return table.rows.map((r) => r[idx]);
}

/** Load one firing-rate series (columns t and N) from a CSV file. */
export function loadSeriesFile(path: string, label: string, blowup = false): Series {
  let text: string;
  try {
    text = readFileSync(path, 'utf8');
  } catch (err) {
    throw new Error(`cannot read series file ${path}: ${(err as Error).message}`);
  }
  const table = parseCsv(text, path);
  const tRaw = column(table, 't', path);
  const nRaw = column(table, 'N', path);
  const t: number[] = [];
  const n: number[] = [];
  for (let i = 0; i < tRaw.length; i++) {
    if (Number.isFinite(tRaw[i]) && Number.isFinite(nRaw[i])) {
      t.push(tRaw[i]);
      n.push(nRaw[i]);
    }
  }
  if (t.length === 0) {
    throw new Error(`${path}: no finite samples`);
  }
  for (let i = 1; i < t.length; i++) {
    if (!(t[i] > t[i - 1])) {
      throw new Error(`${path}: time axis not strictly increasing at row ${i + 1}`);
    }
  }
  return { label, t, n, blowup };
}
