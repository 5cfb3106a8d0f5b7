import { GridInfo } from "./types.js";

// One CSS state per intensity; keep the four names distinct so a glance at
// the strip reads like the wire payload.
export const INTENSITY_CLASSES = ["off", "low", "mid", "high"] as const;

export interface BeltCell {
  unit: number; // 1..5, left to right
  row: "top" | "bottom";
  intensity: number;
  cssClass: string;
  selected: boolean;
}

/** Column the open-path stage picked, if the snapshot carries one. */
export function selectedColumn(grid: GridInfo): number | null {
  if (grid && grid.kind === "open_path") {
    return grid.selected_col;
  }
  return null;
}

/**
 * Belt payload -> 10 cell view models. Payload order is client1 top,
 * client1 bottom, client2 top, ... matching the publisher wire format.
 */
export function beltStrip(belt: number[], selected: number | null): BeltCell[] {
  if (belt.length !== 10) {
    throw new Error(`belt must have 10 entries, got ${belt.length}`);
  }
  const cells: BeltCell[] = [];
  for (let unit = 1; unit <= 5; unit++) {
    for (const row of ["top", "bottom"] as const) {
      const idx = 2 * (unit - 1) + (row === "top" ? 0 : 1);
      const intensity = belt[idx];
      cells.push({
        unit,
        row,
        intensity,
        cssClass: INTENSITY_CLASSES[intensity],
        selected: selected !== null && unit === selected,
      });
    }
  }
  return cells;
}

/** Two-row strip, top motors above bottom motors, units left to right. */
export function beltStripHtml(belt: number[], selected: number | null): string {
  const cells = beltStrip(belt, selected);
  const rows = (["top", "bottom"] as const).map((row) => {
    const tds = cells
      .filter((c) => c.row === row)
      .map((c) => {
        const sel = c.selected ? " selected" : "";
        return `<div class="belt-cell ${c.cssClass}${sel}" data-unit="${c.unit}" data-row="${c.row}">${c.intensity}</div>`;
      })
      .join("");
    return `<div class="belt-row">${tds}</div>`;
  });
  return `<div class="belt-strip">${rows.join("")}</div>`;
}
