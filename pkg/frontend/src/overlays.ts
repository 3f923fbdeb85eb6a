/**
 * Overlay visibility rules: a pure function of the style flags and the
 * server-provided frame state, exhaustively testable over the presets.
 *
 * Annotations are always shown and use the annotation color; predictions
 * use a visually distinct color and appear only for styles that surface
 * them (autotrack tracks, or predicted boxes for clicked points).
 */

import type { FrameState, StyleDoc } from "./api.js";

// Okabe-Ito palette: distinguishable under common color-vision deficiencies.
export const ANNOTATION_COLOR = "#e69f00"; // orange
export const PREDICTION_COLOR = "#56b4e9"; // sky blue
export const LOCATION_SPARK_COLOR = "#0072b2"; // blue line: location change
export const AREA_SPARK_COLOR = "#d55e00"; // red line: box-area change

export interface OverlayVisibility {
  annotationPoint: boolean;
  annotationBox: boolean;
  predictedPoint: boolean;
  predictedBox: boolean;
  pendingPoints: boolean;
  crosshairCursor: boolean;
}

/** May this style ever surface prediction overlays? Pure in the flags. */
export function predictionsEnabled(style: StyleDoc): boolean {
  return style.autotrack || style.show_boxes_on_annotations;
}

export function overlayVisibility(style: StyleDoc, frame: FrameState): OverlayVisibility {
  const predictions = predictionsEnabled(style);
  return {
    annotationPoint: frame.annotation !== null,
    annotationBox: frame.annotation !== null && frame.annotation.box !== null,
    predictedPoint: predictions && frame.predicted !== null,
    predictedBox: predictions && frame.predicted !== null,
    pendingPoints: style.click_mode === "xclick" && frame.pending_points.length > 0,
    crosshairCursor: style.click_mode === "xclick",
  };
}
