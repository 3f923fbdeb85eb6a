/**
 * Timeline strip: a cursor above showing the current frame, one marker
 * below per annotated frame, and scrubber-style seeking on click/drag.
 */

import type { TimelineState } from "./api.js";

const SVG_NS = "http://www.w3.org/2000/svg";

/** Horizontal pixel of a frame; frame 0 at the left edge, the last frame at the right. */
export function frameToX(frame: number, frameCount: number, width: number): number {
  if (frameCount <= 1) return 0;
  return (frame / (frameCount - 1)) * width;
}

/** Inverse scrubber mapping: a click at x seeks to the nearest frame. */
export function xToFrame(x: number, frameCount: number, width: number): number {
  if (frameCount <= 1 || width <= 0) return 0;
  const frame = Math.round((x / width) * (frameCount - 1));
  return Math.min(Math.max(frame, 0), frameCount - 1);
}

export class Timeline {
  readonly svg: SVGSVGElement;
  readonly width: number;
  readonly height: number;
  private seekHandler: ((frame: number) => void) | null = null;
  private frameCount = 1;
  private scrubbing = false;

  constructor(root: HTMLElement, width: number, height = 26) {
    this.width = width;
    this.height = height;
    this.svg = document.createElementNS(SVG_NS, "svg");
    this.svg.setAttribute("width", String(width));
    this.svg.setAttribute("height", String(height));
    this.svg.classList.add("timeline");
    root.append(this.svg);

    this.svg.addEventListener("mousedown", (event) => {
      this.scrubbing = true;
      this.emitSeek(event);
    });
    this.svg.addEventListener("mousemove", (event) => {
      if (this.scrubbing) this.emitSeek(event);
    });
    for (const kind of ["mouseup", "mouseleave"]) {
      this.svg.addEventListener(kind, () => {
        this.scrubbing = false;
      });
    }
  }

  onSeek(handler: (frame: number) => void): void {
    this.seekHandler = handler;
  }

  private emitSeek(event: MouseEvent): void {
    if (!this.seekHandler) return;
    const bounds = this.svg.getBoundingClientRect();
    const width = bounds.width || this.width;
    this.seekHandler(xToFrame(event.clientX - bounds.left, this.frameCount, width));
  }

  render(state: TimelineState): void {
    this.frameCount = state.frame_count;
    this.svg.replaceChildren();
    const mid = this.height / 2;

    const strip = document.createElementNS(SVG_NS, "rect");
    strip.setAttribute("class", "timeline-strip");
    strip.setAttribute("x", "0");
    strip.setAttribute("y", String(mid - 3));
    strip.setAttribute("width", String(this.width));
    strip.setAttribute("height", "6");
    strip.setAttribute("fill", "#d0d0d0");
    this.svg.append(strip);

    for (const frame of state.annotated_frames) {
      const marker = document.createElementNS(SVG_NS, "rect");
      const x = frameToX(frame, state.frame_count, this.width);
      marker.setAttribute("class", "timeline-marker");
      marker.setAttribute("data-frame", String(frame));
      marker.setAttribute("x", String(x - 1.5));
      marker.setAttribute("y", String(mid + 4));
      marker.setAttribute("width", "3");
      marker.setAttribute("height", "8");
      marker.setAttribute("fill", "#333");
      this.svg.append(marker);
    }

    const cursorX = frameToX(state.current_frame, state.frame_count, this.width);
    const cursor = document.createElementNS(SVG_NS, "polygon");
    cursor.setAttribute("class", "timeline-cursor");
    cursor.setAttribute(
      "points",
      `${cursorX - 4},${mid - 10} ${cursorX + 4},${mid - 10} ${cursorX},${mid - 3}`,
    );
    cursor.setAttribute("fill", "#111");
    this.svg.append(cursor);
  }
}
