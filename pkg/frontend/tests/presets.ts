/** The seven annotation-style presets as the server serializes them. */

import type { StyleDoc } from "../src/api.js";

function style(
  name: string,
  flags: Partial<Omit<StyleDoc, "name" | "presentation" | "click_mode">> & {
    click_mode?: StyleDoc["click_mode"];
  } = {},
): StyleDoc {
  const timeline = flags.timeline ?? false;
  return {
    name,
    timeline,
    autotrack: flags.autotrack ?? false,
    show_boxes_on_annotations: flags.show_boxes_on_annotations ?? false,
    sparklines: flags.sparklines ?? false,
    smartjump: flags.smartjump ?? false,
    presentation: timeline ? "timeline" : "random_order",
    click_mode: flags.click_mode ?? "point",
  };
}

export const PRESETS: StyleDoc[] = [
  style("xclick", { click_mode: "xclick" }),
  style("click"),
  style("boxes", { show_boxes_on_annotations: true }),
  style("autotrack", { timeline: true, autotrack: true }),
  style("autotrack-boxes", { timeline: true, autotrack: true, show_boxes_on_annotations: true }),
  style("autotrack-boxes-sparklines", {
    timeline: true,
    autotrack: true,
    show_boxes_on_annotations: true,
    sparklines: true,
  }),
  style("autotrack-boxes-sparklines-smartjump", {
    timeline: true,
    autotrack: true,
    show_boxes_on_annotations: true,
    sparklines: true,
    smartjump: true,
  }),
];
