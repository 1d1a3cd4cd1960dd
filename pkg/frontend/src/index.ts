export { Series, Table, column, loadSeriesFile, parseCsv } from './csv.js';
export { BundleKind, SeriesBundle, loadBundle } from './bundle.js';
export { PlotOptions, PlotStyle, Scale, linearScale, logScale, render } from './svg.js';
export { DEFAULT_STYLE, renderFile } from './render.js';
