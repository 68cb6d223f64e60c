/**
 * Card rendering: turns one server card payload into a DOM element.
 *
 * Charts are drawn as plain SVG sized by the surrounding frame. This is a
 * deliberately small renderer; it shows shape and trend, not publication
 * graphics. Null points split line segments and leave gaps in bars.
 */

import type { CardPayload, SeriesPayload } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const VIEW_W = 100;
const VIEW_H = 56;
const PAD = 4;

function svgEl(tag: string, attrs: Record<string, string>): SVGElement {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) el.setAttribute(key, value);
  return el;
}

function baseSvg(): SVGElement {
  return svgEl("svg", {
    viewBox: `0 0 ${VIEW_W} ${VIEW_H}`,
    preserveAspectRatio: "none",
    class: "chart",
  });
}

function yRange(seriesList: SeriesPayload[]): [number, number] {
  const values: number[] = [];
  for (const s of seriesList) {
    for (const [, y] of s.points) if (y !== null) values.push(y);
  }
  if (!values.length) return [0, 1];
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  return lo === hi ? [lo - 1, hi + 1] : [lo, hi];
}

function scaleY(value: number, lo: number, hi: number): number {
  const t = (value - lo) / (hi - lo);
  return VIEW_H - PAD - t * (VIEW_H - 2 * PAD);
}

function scaleX(index: number, count: number): number {
  if (count <= 1) return VIEW_W / 2;
  return PAD + (index / (count - 1)) * (VIEW_W - 2 * PAD);
}

function renderLine(svg: SVGElement, seriesList: SeriesPayload[]): void {
  const [lo, hi] = yRange(seriesList);
  seriesList.forEach((series, si) => {
    let segment: string[] = [];
    const flush = () => {
      if (segment.length > 1) {
        svg.appendChild(
          svgEl("polyline", {
            points: segment.join(" "),
            class: `series series-${si}`,
            fill: "none",
          }),
        );
      }
      segment = [];
    };
    series.points.forEach(([, y], i) => {
      if (y === null) {
        flush();
        return;
      }
      segment.push(`${scaleX(i, series.points.length)},${scaleY(y, lo, hi)}`);
    });
    flush();
  });
}

function renderBars(svg: SVGElement, series: SeriesPayload): void {
  const [lo, hi] = yRange([series]);
  const floor = Math.min(lo, 0);
  const n = series.points.length || 1;
  const band = (VIEW_W - 2 * PAD) / n;
  series.points.forEach(([, y], i) => {
    if (y === null) return;
    const top = scaleY(Math.max(y, floor), floor, hi);
    const bottom = scaleY(floor, floor, hi);
    svg.appendChild(
      svgEl("rect", {
        x: String(PAD + i * band + band * 0.1),
        y: String(Math.min(top, bottom)),
        width: String(band * 0.8),
        height: String(Math.max(Math.abs(bottom - top), 0.5)),
        class: "series series-0",
      }),
    );
  });
}

function renderScatter(svg: SVGElement, points: [number, number, string][]): void {
  const xs = points.map((p) => p[0]);
  const ys = points.map((p) => p[1]);
  const [xlo, xhi] = xs.length ? [Math.min(...xs), Math.max(...xs)] : [0, 1];
  const [ylo, yhi] = ys.length ? [Math.min(...ys), Math.max(...ys)] : [0, 1];
  const spanX = xhi - xlo || 1;
  for (const [x, y, key] of points) {
    const cx = PAD + ((x - xlo) / spanX) * (VIEW_W - 2 * PAD);
    const dot = svgEl("circle", {
      cx: String(cx),
      cy: String(scaleY(y, ylo, yhi === ylo ? ylo + 1 : yhi)),
      r: "1.6",
      class: "series series-0",
    });
    const label = document.createElementNS(SVG_NS, "title");
    label.textContent = key;
    dot.appendChild(label);
    svg.appendChild(dot);
  }
}

/** Render one card body (no frame chrome; the reader adds that). */
export function renderCard(card: CardPayload): HTMLElement {
  const root = document.createElement("div");
  root.className = `card-body card-${card.type}`;

  const title = document.createElement("div");
  title.className = "card-title";
  title.textContent = card.title;
  root.appendChild(title);

  if (card.annotation) {
    const note = document.createElement("div");
    note.className = "card-annotation";
    note.textContent = card.annotation;
    root.appendChild(note);
  }

  if (card.archetypeOf) {
    const badge = document.createElement("div");
    badge.className = "archetype-badge";
    badge.textContent = `shows ${card.archetypeOf} for the whole pile`;
    root.appendChild(badge);
  }

  if (card.type === "label") {
    const text = document.createElement("div");
    text.className = "label-text";
    text.textContent = card.text ?? "";
    root.appendChild(text);
    if (card.stat && card.stat !== "custom") {
      const stat = document.createElement("div");
      stat.className = "label-stat";
      stat.textContent = card.stat;
      root.appendChild(stat);
    }
    return root;
  }

  if (card.type === "grid") {
    const grid = document.createElement("div");
    grid.className = "mini-grid";
    const n = card.cells?.length ?? 0;
    grid.style.gridTemplateColumns = `repeat(${Math.ceil(Math.sqrt(Math.max(n, 1)))}, 1fr)`;
    for (const cell of card.cells ?? []) {
      const wrap = document.createElement("div");
      wrap.className = "mini-cell";
      wrap.appendChild(renderCard(cell));
      grid.appendChild(wrap);
    }
    root.appendChild(grid);
    return root;
  }

  const svg = baseSvg();
  if (card.type === "scatter") {
    renderScatter(svg, card.points ?? []);
  } else if (card.type === "bar") {
    const series = card.series ?? [];
    if (series.length) renderBars(svg, series[0]);
  } else {
    // line and overlay cards both draw polylines, one per series
    renderLine(svg, card.series ?? []);
  }
  root.appendChild(svg);

  if (card.type === "overlay" && card.axisPolicy === "dualY") {
    const badge = document.createElement("div");
    badge.className = "axis-badge";
    badge.textContent = "2 y-axes";
    root.appendChild(badge);
  }
  return root;
}
