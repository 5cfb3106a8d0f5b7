import { DepthGrid, GridInfo, OpenPathGrid } from "./types.js";

function fmt(v: number): string {
  return v.toFixed(2);
}

function openPathHtml(grid: OpenPathGrid): string {
  // raw panel: 3x7, printed top row first
  const rawRows = [...grid.raw]
    .reverse()
    .map((row) => `<div class="score-row">${row.map((v) => `<span class="raw">${fmt(v)}</span>`).join("")}</div>`)
    .join("");
  const adjRows = [...grid.adjusted]
    .reverse()
    .map((row) => {
      const cells = row
        .map((v, i) => {
          const sel = grid.selected_col !== null && i + 1 === grid.selected_col ? " selected" : "";
          return `<span class="adjusted${sel}">${fmt(v)}</span>`;
        })
        .join("");
      return `<div class="score-row">${cells}</div>`;
    })
    .join("");
  const pick =
    grid.selected_col === null
      ? "no signal"
      : `column ${grid.selected_col}${grid.top_high ? " (far clear)" : ""}`;
  return `<div class="grid-open"><div class="raw-grid">${rawRows}</div><div class="adj-grid">${adjRows}</div><div class="pick">${pick}</div></div>`;
}

function depthHtml(grid: DepthGrid): string {
  const rows = grid.cells
    .map(
      (row) =>
        `<div class="score-row">${row
          .map(
            (c) =>
              `<span class="depth-cell i${c.intensity}">` +
              `${fmt(c.f_close)}/${fmt(c.f_medium)}/${fmt(c.f_far)}</span>`
          )
          .join("")}</div>`
    )
    .join("");
  return `<div class="grid-depth">${rows}</div>`;
}

export function gridHtml(grid: GridInfo): string {
  if (grid && grid.kind === "open_path") {
    return openPathHtml(grid);
  }
  if (grid && grid.kind === "depth") {
    return depthHtml(grid);
  }
  return `<div class="grid-none">warming up</div>`;
}
