/**
 * Viewport: the frame image plus SVG overlays for annotations, predictions,
 * and pending extreme clicks. All drawn geometry comes straight from server
 * responses, scaled to display pixels.
 */

import type { BoxDoc, FrameState, PointDoc, StyleDoc } from "./api.js";
import { ANNOTATION_COLOR, PREDICTION_COLOR, overlayVisibility } from "./overlays.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface ViewportClick {
  x: number; // normalized [0, 1]
  y: number;
  button: number; // 0 = left (annotate), 1 = middle (clear)
}

function svgElement<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number>,
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    el.setAttribute(key, String(value));
  }
  return el;
}

export class Viewport {
  readonly root: HTMLElement;
  readonly image: HTMLImageElement;
  readonly svg: SVGSVGElement;
  readonly errorBanner: HTMLElement;
  readonly width: number;
  readonly height: number;
  private clickHandler: ((click: ViewportClick) => void) | null = null;

  constructor(root: HTMLElement, width: number, height: number) {
    this.root = root;
    this.width = width;
    this.height = height;
    root.classList.add("viewport");
    root.style.position = "relative";
    root.style.width = `${width}px`;
    root.style.height = `${height}px`;

    this.image = document.createElement("img");
    this.image.className = "viewport-frame";
    this.image.width = width;
    this.image.height = height;
    this.image.draggable = false;
    this.image.addEventListener("error", () => this.showError("frame image failed to load"));
    this.image.addEventListener("load", () => this.hideError());

    this.svg = svgElement("svg", { width, height, viewBox: `0 0 ${width} ${height}` });
    this.svg.classList.add("viewport-overlays");
    this.svg.style.position = "absolute";
    this.svg.style.left = "0";
    this.svg.style.top = "0";

    this.errorBanner = document.createElement("div");
    this.errorBanner.className = "viewport-error";
    this.errorBanner.style.display = "none";

    root.append(this.image, this.svg, this.errorBanner);
    // mousedown (not click): middle-button presses must clear annotations
    // even in browsers that never emit click events for button 1.
    this.svg.addEventListener("mousedown", (event) => this.emitClick(event));
  }

  onClick(handler: (click: ViewportClick) => void): void {
    this.clickHandler = handler;
  }

  private emitClick(event: MouseEvent): void {
    if (!this.clickHandler) return;
    const bounds = this.svg.getBoundingClientRect();
    const width = bounds.width || this.width;
    const height = bounds.height || this.height;
    const x = Math.min(Math.max((event.clientX - bounds.left) / width, 0), 1);
    const y = Math.min(Math.max((event.clientY - bounds.top) / height, 0), 1);
    this.clickHandler({ x, y, button: event.button });
    event.preventDefault();
  }

  showError(message: string): void {
    this.errorBanner.textContent = message;
    this.errorBanner.style.display = "block";
  }

  hideError(): void {
    this.errorBanner.style.display = "none";
  }

  private toPixelX(x: number): number {
    return x * this.width;
  }

  private toPixelY(y: number): number {
    return y * this.height;
  }

  private drawPoint(point: PointDoc, color: string, cls: string): void {
    this.svg.append(
      svgElement("circle", {
        class: cls,
        cx: this.toPixelX(point.x),
        cy: this.toPixelY(point.y),
        r: 4,
        fill: color,
        stroke: "#111",
        "stroke-width": 1,
      }),
    );
  }

  private drawBox(box: BoxDoc, color: string, cls: string): void {
    this.svg.append(
      svgElement("rect", {
        class: cls,
        x: this.toPixelX(box.x_min),
        y: this.toPixelY(box.y_min),
        width: this.toPixelX(box.x_max) - this.toPixelX(box.x_min),
        height: this.toPixelY(box.y_max) - this.toPixelY(box.y_min),
        fill: "none",
        stroke: color,
        "stroke-width": 2,
      }),
    );
  }

  render(state: FrameState, style: StyleDoc, imageUrl: string | null): void {
    if (imageUrl && this.image.getAttribute("src") !== imageUrl) {
      this.image.setAttribute("src", imageUrl);
    }
    this.svg.replaceChildren();
    const visible = overlayVisibility(style, state);
    this.root.style.cursor = visible.crosshairCursor ? "crosshair" : "default";

    if (visible.predictedBox && state.predicted) {
      this.drawBox(state.predicted.box, PREDICTION_COLOR, "prediction-box");
    }
    if (visible.predictedPoint && state.predicted) {
      this.drawPoint(state.predicted.point, PREDICTION_COLOR, "prediction-point");
    }
    if (visible.annotationBox && state.annotation?.box) {
      this.drawBox(state.annotation.box, ANNOTATION_COLOR, "annotation-box");
    }
    if (visible.annotationPoint && state.annotation) {
      this.drawPoint(state.annotation.point, ANNOTATION_COLOR, "annotation-point");
    }
    if (visible.pendingPoints) {
      for (const point of state.pending_points) {
        this.drawPoint(point, ANNOTATION_COLOR, "pending-point");
      }
    }
  }
}
