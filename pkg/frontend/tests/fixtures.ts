import { ScaleDoc } from "../src/types.js";

/** The scale document the demo service publishes at /api/scale. The
 * round-trip suite asserts the live doc equals this literal, so widget
 * tests rendering from it render from what the service serves. */
export const demoScaleDoc: ScaleDoc = {
  anchors: [
    { position: 0.0, kind: "verbal", label: "(almost) impossible" },
    { position: 0.0, kind: "numeric", label: "0" },
    { position: 0.15, kind: "verbal", label: "improbable" },
    { position: 0.25, kind: "verbal", label: "uncertain" },
    { position: 0.25, kind: "numeric", label: "25" },
    { position: 0.5, kind: "verbal", label: "fifty-fifty" },
    { position: 0.5, kind: "numeric", label: "50" },
    { position: 0.75, kind: "verbal", label: "expected" },
    { position: 0.75, kind: "numeric", label: "75" },
    { position: 0.85, kind: "verbal", label: "probable" },
    { position: 1.0, kind: "verbal", label: "(almost) certain" },
    { position: 1.0, kind: "numeric", label: "100" },
  ],
  rounding_grid: 0.05,
};
