/**
 * Timeline geometry, scrubber mapping, sparkline scaling, and the
 * cursor/sparkline horizontal alignment invariant.
 */

import { describe, expect, it } from "vitest";

import { Sparklines, polylinePoints, scaleSeries } from "../src/sparklines.js";
import { Timeline, frameToX, xToFrame } from "../src/timeline.js";

describe("timeline mapping", () => {
  it("markers for {0, 150, 299} of 300 land at 0%, ~50%, 100%", () => {
    const width = 600;
    expect(frameToX(0, 300, width)).toBe(0);
    expect(frameToX(150, 300, width) / width).toBeCloseTo(0.5017, 3);
    expect(frameToX(299, 300, width)).toBe(width);
  });

  it("a click at 50% of the strip on a 300-frame video seeks to frame 150", () => {
    expect(xToFrame(300, 300, 600)).toBe(150);
    expect(xToFrame(0, 300, 600)).toBe(0);
    expect(xToFrame(600, 300, 600)).toBe(299);
    expect(xToFrame(-20, 300, 600)).toBe(0);
    expect(xToFrame(9999, 300, 600)).toBe(299);
  });

  it("mapping roundtrips on every frame of a short video", () => {
    for (let frame = 0; frame < 40; frame += 1) {
      expect(xToFrame(frameToX(frame, 40, 512), 40, 512)).toBe(frame);
    }
  });

  it("renders one marker per annotated frame and a cursor at the current frame", () => {
    const host = document.createElement("div");
    const timeline = new Timeline(host, 600);
    timeline.render({ frame_count: 300, current_frame: 150, annotated_frames: [0, 150, 299] });
    const markers = [...timeline.svg.querySelectorAll("rect.timeline-marker")];
    expect(markers.map((m) => m.getAttribute("data-frame"))).toEqual(["0", "150", "299"]);
    expect(timeline.svg.querySelector("polygon.timeline-cursor")).not.toBeNull();
    timeline.render({ frame_count: 300, current_frame: 10, annotated_frames: [] });
    expect(timeline.svg.querySelectorAll("rect.timeline-marker").length).toBe(0);
  });

  it("seek callback fires with the scrubbed frame", () => {
    const host = document.createElement("div");
    const timeline = new Timeline(host, 600);
    timeline.render({ frame_count: 300, current_frame: 0, annotated_frames: [] });
    const seen: number[] = [];
    timeline.onSeek((frame) => seen.push(frame));
    timeline.svg.dispatchEvent(new MouseEvent("mousedown", { clientX: 300, clientY: 10 }));
    expect(seen).toEqual([150]);
  });
});

describe("sparkline scaling", () => {
  it("flat series stays on the baseline", () => {
    expect(scaleSeries([0, 0, 0], 18)).toEqual([18, 18, 18]);
  });

  it("per-series max normalization puts the max at the top", () => {
    const ys = scaleSeries([0, 2, 1], 18);
    expect(ys[0]).toBe(18);
    expect(ys[1]).toBe(0);
    expect(ys[2]).toBe(9);
  });

  it("display scaling never moves the argmax", () => {
    const series = [0, 0.1, 0.9, 0.3, 0.9001, 0.2];
    const ys = scaleSeries(series, 18);
    const argmaxRaw = series.indexOf(Math.max(...series));
    const argmaxScaled = ys.indexOf(Math.min(...ys));
    expect(argmaxScaled).toBe(argmaxRaw);
  });

  it("a spike at frame k peaks at the same x as the timeline position of k", () => {
    const width = 512;
    const series = Array(40).fill(0.0);
    series[17] = 0.5;
    const points = polylinePoints(series, width, 18)
      .split(" ")
      .map((pair) => pair.split(",").map(Number));
    const peak = points.reduce((best, p) => (p[1] < best[1] ? p : best));
    expect(peak[0]).toBeCloseTo(frameToX(17, 40, width), 1);
  });

  it("renders both lines plus the dirty indicator", () => {
    const host = document.createElement("div");
    const strip = new Sparklines(host, 512);
    strip.render({ location_delta: [0, 0.1, 0.2], area_delta: [0, 0.05, 0.0], dirty_track: true });
    expect(strip.svg.querySelector("polyline.sparkline-location")).not.toBeNull();
    expect(strip.svg.querySelector("polyline.sparkline-area")).not.toBeNull();
    expect(strip.svg.querySelector("text.dirty-indicator")).not.toBeNull();
    strip.render({ location_delta: [0, 0.1], area_delta: [0, 0.1], dirty_track: false });
    expect(strip.svg.querySelector("text.dirty-indicator")).toBeNull();
  });
});
