/**
 * Sparklines: two thin line strips under the timeline, horizontally aligned
 * with it. The blue line shows frame-to-frame change in track location, the
 * red line change in box area. Each series is independently scaled to its
 * own maximum for display; raw values surface via tooltips.
 */

import type { SparklineState } from "./api.js";
import { AREA_SPARK_COLOR, LOCATION_SPARK_COLOR } from "./overlays.js";
import { frameToX } from "./timeline.js";

const SVG_NS = "http://www.w3.org/2000/svg";

/**
 * Map raw non-negative values to display y coordinates (baseline = height,
 * series max = 0). An all-zero series stays flat on the baseline. Scaling
 * never changes where the maximum sits.
 */
export function scaleSeries(series: number[], height: number): number[] {
  const max = series.reduce((a, b) => Math.max(a, b), 0);
  if (max <= 0) return series.map(() => height);
  return series.map((v) => height - (v / max) * height);
}

export function polylinePoints(series: number[], width: number, height: number): string {
  const ys = scaleSeries(series, height);
  return ys
    .map((y, i) => `${frameToX(i, series.length, width).toFixed(2)},${y.toFixed(2)}`)
    .join(" ");
}

export class Sparklines {
  readonly svg: SVGSVGElement;
  readonly width: number;
  readonly rowHeight: number;

  constructor(root: HTMLElement, width: number, rowHeight = 18) {
    this.width = width;
    this.rowHeight = rowHeight;
    this.svg = document.createElementNS(SVG_NS, "svg");
    this.svg.setAttribute("width", String(width));
    this.svg.setAttribute("height", String(rowHeight * 2 + 4));
    this.svg.classList.add("sparklines");
    root.append(this.svg);
  }

  render(state: SparklineState): void {
    this.svg.replaceChildren();
    this.svg.classList.toggle("dirty-track", state.dirty_track);
    const rows: Array<[string, number[], string, number]> = [
      ["sparkline-location", state.location_delta, LOCATION_SPARK_COLOR, 0],
      ["sparkline-area", state.area_delta, AREA_SPARK_COLOR, this.rowHeight + 4],
    ];
    for (const [cls, series, color, offset] of rows) {
      if (series.length === 0) continue;
      const line = document.createElementNS(SVG_NS, "polyline");
      line.setAttribute("class", cls);
      line.setAttribute("fill", "none");
      line.setAttribute("stroke", color);
      line.setAttribute("stroke-width", "1");
      line.setAttribute("transform", `translate(0 ${offset})`);
      line.setAttribute("points", polylinePoints(series, this.width, this.rowHeight));
      const tooltip = document.createElementNS(SVG_NS, "title");
      tooltip.textContent = `max ${series.reduce((a, b) => Math.max(a, b), 0).toPrecision(4)}`;
      line.append(tooltip);
      this.svg.append(line);
    }
    if (state.dirty_track) {
      const badge = document.createElementNS(SVG_NS, "text");
      badge.setAttribute("class", "dirty-indicator");
      badge.setAttribute("x", String(this.width - 4));
      badge.setAttribute("y", "10");
      badge.setAttribute("text-anchor", "end");
      badge.setAttribute("fill", "#aa3333");
      badge.textContent = "stale";
      this.svg.append(badge);
    }
  }
}
