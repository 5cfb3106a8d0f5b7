import { Snapshot } from "../src/types.js";

/** Server-shaped snapshot with overridable fields. */
export function makeSnapshot(over: Partial<Snapshot> = {}): Snapshot {
  return {
    tick: 0,
    t: 0,
    mode: "open_path",
    agent: { x: 0.889, y: 0.2667, heading: 1.5708 },
    obstacles: [{ x: 0.13, y: 1.3335, r: 0.0762 }],
    field: { width: 1.778, length: 2.667 },
    start: [0.889, 0.2667],
    goal: [0.889, 2.4003],
    layout: "easy-a",
    belt: [0, 0, 0, 0, 3, 3, 0, 0, 0, 0],
    grid: {
      kind: "open_path",
      raw: [
        [1, 1, 1, 1, 1, 1, 1],
        [1, 1, 1, 1, 1, 1, 1],
        [0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5],
      ],
      adjusted: [
        [1.05, 1.05, 1.1025, 1.05, 1.05],
        [0.95, 0.95, 1.0, 0.95, 0.95],
      ],
      selected_col: 3,
      top_high: true,
    },
    status: "outbound",
    ...over,
  };
}

export function snapshotLine(over: Partial<Snapshot> = {}): string {
  return JSON.stringify(makeSnapshot(over)) + "\n";
}
