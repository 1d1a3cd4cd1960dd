import { writeFileSync } from 'fs';

import { BundleKind, loadBundle } from './bundle.js';
import { PlotStyle, render } from './svg.js';

export const DEFAULT_STYLE: Record<BundleKind, PlotStyle> = {
  figure1: 'log-N',
  figure2: 'linear-N',
  custom: 'linear-N',
};

const TITLES: Record<BundleKind, string> = {
  figure1: 'Firing rate vs time: strong feedback (limit blows up)',
  figure2: 'Firing rate vs time: moderate feedback (limit is periodic)',
  custom: 'Firing rate vs time',
};

/** Render a bundle directory to an image file (PNG by default, SVG by extension). */
export async function renderFile(
  kind: BundleKind,
  inDir: string,
  outPath: string,
  style?: PlotStyle,
): Promise<void> {
  const bundle = loadBundle(inDir, kind);
  const svg = render(bundle, style ?? DEFAULT_STYLE[kind], { title: TITLES[kind] });
  if (outPath.toLowerCase().endsWith('.svg')) {
    writeFileSync(outPath, svg, 'utf8');
    return;
  }
  const sharp = (await import('sharp')).default;
  const png = await sharp(Buffer.from(svg), { density: 200 }).png().toBuffer();
  writeFileSync(outPath, png);
}
