/**
 * Keyboard control table. Each row is gated by which features it needs:
 * timeline (T) for navigation, timeline+autotrack (T+A) for track refresh.
 * Keys whose gate fails are inert. The jump key is ungated and switches
 * from random to smart jumping when smartjump is enabled.
 *
 *   T    | key         | action
 *   yes  | left        | step back 1 frame
 *   yes  | right       | step forward 1 frame
 *   yes  | shift+left  | step back 10 frames
 *   yes  | shift+right | step forward 10 frames
 *   yes  | ctrl+left   | previous annotated frame
 *   yes  | ctrl+right  | next annotated frame
 *   -    | f           | jump to an unannotated frame (random/smart)
 *   T+A  | r           | refresh the track
 */

import type { StyleDoc } from "./api.js";

export type KeyboardAction =
  | { kind: "step"; delta: -10 | -1 | 1 | 10 }
  | { kind: "prev_annotated" }
  | { kind: "next_annotated" }
  | { kind: "jump"; smart: boolean }
  | { kind: "refresh" };

export interface KeyStroke {
  key: string;
  shiftKey?: boolean;
  ctrlKey?: boolean;
}

/**
 * Decode a keystroke into an action, or null when the key is unbound or its
 * feature gate fails for this style. Pure: same stroke + flags, same result.
 */
export function decodeKey(stroke: KeyStroke, style: StyleDoc): KeyboardAction | null {
  const shift = stroke.shiftKey === true;
  const ctrl = stroke.ctrlKey === true;
  switch (stroke.key) {
    case "ArrowLeft":
    case "ArrowRight": {
      if (!style.timeline) return null;
      const forward = stroke.key === "ArrowRight";
      if (ctrl) return forward ? { kind: "next_annotated" } : { kind: "prev_annotated" };
      const magnitude = shift ? 10 : 1;
      return { kind: "step", delta: (forward ? magnitude : -magnitude) as -10 | -1 | 1 | 10 };
    }
    case "f":
      if (shift || ctrl) return null;
      return { kind: "jump", smart: style.smartjump };
    case "r":
      if (shift || ctrl) return null;
      if (!style.timeline || !style.autotrack) return null;
      return { kind: "refresh" };
    default:
      return null;
  }
}
