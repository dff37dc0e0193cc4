import { Series } from "./csv";

/** Fixed geometry and palette so identical input renders identical bytes. */
const WIDTH = 860;
const HEIGHT = 540;
const MARGIN = { top: 32, right: 28, bottom: 58, left: 76 };
const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const CAP_HALF = 5;
const MARKER_RADIUS = 3.2;

interface Scale {
  lo: number;
  hi: number;
  apply(value: number): number;
}

function linearScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const span = hi - lo || 1;
  return {
    lo,
    hi,
    apply: (value) => outLo + ((value - lo) / span) * (outHi - outLo),
  };
}

/** Classic nice-number ticks: deterministic, roughly `count` steps. */
export function niceTicks(lo: number, hi: number, count = 6): number[] {
  if (lo === hi) {
    hi = lo + 1;
  }
  const rawStep = (hi - lo) / count;
  const power = Math.floor(Math.log10(rawStep));
  const base = Math.pow(10, power);
  const candidates = [1, 2, 2.5, 5, 10];
  const unit = candidates.find((c) => c * base >= rawStep) ?? 10;
  const step = unit * base;
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let value = start; value <= hi + step * 1e-9; value += step) {
    ticks.push(Math.abs(value) < step * 1e-9 ? 0 : value);
  }
  return ticks;
}

function formatTick(value: number): string {
  const text = value.toPrecision(10);
  return text.includes(".") ? text.replace(/\.?0+$/, "") : text;
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function coordinate(value: number): string {
  return value.toFixed(2);
}

/**
 * Render the sweep series as an SVG line figure: one line per scheme, x is
 * the blockage probability, y the mean reward, whiskers span two standard
 * errors each way, legend labels are the scheme names.
 */
export function renderFigure(seriesList: Series[]): string {
  if (seriesList.length === 0 || seriesList.every((s) => s.points.length === 0)) {
    throw new Error("nothing to plot: no series with data points");
  }
  const xs = seriesList.flatMap((s) => s.points.map((p) => p.x));
  const lows = seriesList.flatMap((s) => s.points.map((p) => p.y - p.halfWidth));
  const highs = seriesList.flatMap((s) => s.points.map((p) => p.y + p.halfWidth));
  const yLo = Math.min(0, ...lows);
  const yHi = Math.max(...highs) * 1.04 || 1;
  const x = linearScale(Math.min(...xs), Math.max(...xs), MARGIN.left, WIDTH - MARGIN.right);
  const y = linearScale(yLo, yHi, HEIGHT - MARGIN.bottom, MARGIN.top);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);

  for (const tick of niceTicks(y.lo, y.hi)) {
    const py = coordinate(y.apply(tick));
    parts.push(
      `<line x1="${MARGIN.left}" y1="${py}" x2="${WIDTH - MARGIN.right}" y2="${py}" ` +
        `stroke="#dddddd" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${MARGIN.left - 8}" y="${py}" text-anchor="end" dominant-baseline="middle" ` +
        `font-size="12" fill="#333333">${formatTick(tick)}</text>`,
    );
  }
  for (const tick of niceTicks(x.lo, x.hi, 10)) {
    const px = coordinate(x.apply(tick));
    parts.push(
      `<line x1="${px}" y1="${HEIGHT - MARGIN.bottom}" x2="${px}" ` +
        `y2="${HEIGHT - MARGIN.bottom + 5}" stroke="#333333" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${px}" y="${HEIGHT - MARGIN.bottom + 20}" text-anchor="middle" ` +
        `font-size="12" fill="#333333">${formatTick(tick)}</text>`,
    );
  }
  const axisY = HEIGHT - MARGIN.bottom;
  parts.push(
    `<line x1="${MARGIN.left}" y1="${axisY}" x2="${WIDTH - MARGIN.right}" y2="${axisY}" ` +
      `stroke="#333333" stroke-width="1.5"/>`,
  );
  parts.push(
    `<line x1="${MARGIN.left}" y1="${MARGIN.top}" x2="${MARGIN.left}" y2="${axisY}" ` +
      `stroke="#333333" stroke-width="1.5"/>`,
  );
  parts.push(
    `<text x="${(MARGIN.left + WIDTH - MARGIN.right) / 2}" y="${HEIGHT - 14}" ` +
      `text-anchor="middle" font-size="14" fill="#111111">blockage probability</text>`,
  );
  parts.push(
    `<text x="20" y="${(MARGIN.top + axisY) / 2}" text-anchor="middle" font-size="14" ` +
      `fill="#111111" transform="rotate(-90 20 ${(MARGIN.top + axisY) / 2})">` +
      `average network reward</text>`,
  );

  seriesList.forEach((series, idx) => {
    const color = PALETTE[idx % PALETTE.length];
    const path = series.points
      .map((p) => `${coordinate(x.apply(p.x))},${coordinate(y.apply(p.y))}`)
      .join(" ");
    parts.push(
      `<polyline class="series-line" data-scheme="${escapeXml(series.scheme)}" ` +
        `points="${path}" fill="none" stroke="${color}" stroke-width="2"/>`,
    );
    for (const point of series.points) {
      const px = coordinate(x.apply(point.x));
      const top = coordinate(y.apply(point.y + point.halfWidth));
      const bottom = coordinate(y.apply(point.y - point.halfWidth));
      parts.push(
        `<line class="error-bar" x1="${px}" y1="${top}" x2="${px}" y2="${bottom}" ` +
          `stroke="${color}" stroke-width="1.4"/>`,
      );
      for (const cap of [top, bottom]) {
        parts.push(
          `<line x1="${Number(px) - CAP_HALF}" y1="${cap}" x2="${Number(px) + CAP_HALF}" ` +
            `y2="${cap}" stroke="${color}" stroke-width="1.4"/>`,
        );
      }
      parts.push(
        `<circle cx="${px}" cy="${coordinate(y.apply(point.y))}" r="${MARKER_RADIUS}" ` +
          `fill="${color}"/>`,
      );
    }
  });

  const legendX = MARGIN.left + 14;
  let legendY = MARGIN.top + 10;
  seriesList.forEach((series, idx) => {
    const color = PALETTE[idx % PALETTE.length];
    parts.push(
      `<line x1="${legendX}" y1="${legendY}" x2="${legendX + 26}" y2="${legendY}" ` +
        `stroke="${color}" stroke-width="2"/>`,
    );
    parts.push(
      `<text class="legend-label" x="${legendX + 32}" y="${legendY + 4}" font-size="13" ` +
        `fill="#111111">${escapeXml(series.scheme)}</text>`,
    );
    legendY += 20;
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
