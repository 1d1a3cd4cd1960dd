#!/usr/bin/env node
import { DEFAULT_STYLE, renderFile } from './render.js';
import { BundleKind } from './bundle.js';
import { PlotStyle } from './svg.js';

const USAGE = `usage: plot <figure1|figure2|custom> --in <dir> --out <file> [--style log-N|linear-N]

Reads firing-rate CSV outputs from <dir> and writes one overlay image to
<file> (.png at 200 dpi by default; .svg for vector output).`;

function parseArgs(argv: string[]) {
  const [kind, ...rest] = argv;
  if (!kind || !['figure1', 'figure2', 'custom'].includes(kind)) {
    throw new Error(USAGE);
  }
  let inDir: string | undefined;
  let outPath: string | undefined;
  let style: PlotStyle | undefined;
  for (let i = 0; i < rest.length; i += 2) {
    const flag = rest[i];
    const value = rest[i + 1];
    if (value === undefined) throw new Error(`missing value for ${flag}\n${USAGE}`);
    if (flag === '--in') inDir = value;
    else if (flag === '--out') outPath = value;
    else if (flag === '--style') {
      if (value !== 'log-N' && value !== 'linear-N') {
        throw new Error(`unknown style ${value}\n${USAGE}`);
      }
      style = value;
    } else throw new Error(`unknown flag ${flag}\n${USAGE}`);
  }
  if (!inDir || !outPath) throw new Error(USAGE);
  return { kind: kind as BundleKind, inDir, outPath, style };
}

async function main(): Promise<number> {
  try {
    const { kind, inDir, outPath, style } = parseArgs(process.argv.slice(2));
    await renderFile(kind, inDir, outPath, style);
    console.log(`wrote ${outPath} (${style ?? DEFAULT_STYLE[kind]})`);
    return 0;
  } catch (err) {
    console.error((err as Error).message);
    return 1;
  }
}

main().then((code) => {
  process.exitCode = code;
});
