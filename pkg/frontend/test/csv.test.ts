import { mkdtempSync, writeFileSync } from 'fs';
import { tmpdir } from 'os';
import { join } from 'path';
import { describe, expect, it } from 'vitest';

import { column, loadSeriesFile, parseCsv } from '../src/csv.js';

const GOOD = 't,N,B\r\n0.0,1.5,0.0\r\n1.0,2.5,0.1\r\n2.0,3.5,0.2\r\n';

function writeTemp(name: string, text: string): string {
  const dir = mkdtempSync(join(tmpdir(), 'vclab-plot-'));
  const path = join(dir, name);
  writeFileSync(path, text);
  return path;
}

describe('parseCsv', () => {
  it('parses CRLF files with headers', () => {
    const table = parseCsv(GOOD);
    expect(table.header).toEqual(['t', 'N', 'B']);
    expect(table.rows).toHaveLength(3);
    expect(table.rows[1][1]).toBe(2.5);
  });

  it('parses LF files too', () => {
    expect(parseCsv(GOOD.replace(/\r\n/g, '\n')).rows).toHaveLength(3);
  });

  it('rejects ragged rows with a row number', () => {
    const bad = 't,N\r\n0,1\r\n1,2,3\r\n';
    expect(() => parseCsv(bad, 'bad.csv')).toThrow(/bad\.csv: ragged row 3/);
  });

  it('rejects empty input', () => {
    expect(() => parseCsv('', 'empty.csv')).toThrow(/empty\.csv/);
  });

  it('names missing columns', () => {
    expect(() => column(parseCsv(GOOD), 'rho', 'x.csv')).toThrow(/missing required column "rho"/);
  });
});

describe('loadSeriesFile', () => {
  it('loads t and N and keeps the label', () => {
    const path = writeTemp('s.csv', GOOD);
    const s = loadSeriesFile(path, 'eps=1');
    expect(s.label).toBe('eps=1');
    expect(s.t).toEqual([0, 1, 2]);
    expect(s.n).toEqual([1.5, 2.5, 3.5]);
    expect(s.blowup).toBe(false);
  });

  it('drops non-finite samples', () => {
    const path = writeTemp('s.csv', 't,N\r\n0,1\r\n1,nan\r\n2,3\r\n');
    const s = loadSeriesFile(path, 'x');
    expect(s.t).toEqual([0, 2]);
  });

  it('requires a strictly increasing time axis', () => {
    const path = writeTemp('s.csv', 't,N\r\n0,1\r\n2,2\r\n1,3\r\n');
    expect(() => loadSeriesFile(path, 'x')).toThrow(/not strictly increasing/);
  });

  it('reports unreadable files descriptively', () => {
    expect(() => loadSeriesFile('/no/such/file.csv', 'x')).toThrow(/cannot read series file/);
  });
});
