"""Open path mode: floor bbox post-processing, 3x7 grid scoring, adjusted
scores, column selection, and belt-command emission.

The scoring grid spans the tight bounding box of the floor pixels.  Raw
scores are exact floor-pixel fractions per extended cell; each belt cell's
adjusted score is the weighted neighborhood sum

    0.4*C + 0.2*T + 0.1*(L + R + TR + TL)

with T/L/R/TL/TR the top/left/right/diagonal neighbors in the extended
grid (the margins exist precisely so every belt cell has all six terms).
A score above the boost gate is raised 5%, then the center column is
raised 5%; the winning column (highest top+bottom sum) signals the belt
unless its sum falls below the no-signal threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoFloor
from .grid import (
    DEFAULT_GRID,
    BeltCommand,
    BoundingBox,
    FloorMask,
    GridSpec,
    PixelRect,
    cell_rect,
    motor_index,
)


@dataclass(frozen=True)
class OpenPathConfig:
    confidence_floor: float = 0.02
    no_signal_sum: float = 0.8
    top_cell_gate: float = 0.9
    boost_gate: float = 0.95
    boost_factor: float = 1.05
    center_factor: float = 1.05

    def __post_init__(self) -> None:
        for name in ("confidence_floor", "no_signal_sum", "top_cell_gate", "boost_gate"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ValueError(f"{name} must be in (0,1]")
        if self.boost_factor < 1.0 or self.center_factor < 1.0:
            raise ValueError("boost factors must be >= 1")


DEFAULT_OPEN_PATH = OpenPathConfig()


@dataclass
class CellScoreGrid:
    """Raw 3x7 and adjusted 2x5 scores; arrays indexed [row_from_bottom, col]."""

    raw: np.ndarray
    adjusted: np.ndarray
    selected_col: int | None  # 1-based belt column
    top_high: bool
    span: PixelRect


def postprocess_bbox(
    raw: BoundingBox | None,
    frame_w: int,
    frame_h: int,
    prev: BoundingBox | None,
) -> BoundingBox | None:
    """Snap the detection to the frame's bottom-right corner and average it
    with the previous frame's box.

    Returns None when the detection is absent or its confidence falls below
    the floor (a valid "no floor" outcome); the returned box is what the
    caller should pass as prev next frame.
    """
    if raw is None or raw.confidence < DEFAULT_OPEN_PATH.confidence_floor:
        return None
    raw.clipped_to(frame_w, frame_h)
    snapped = BoundingBox(raw.x1, raw.y1, frame_w, frame_h, raw.confidence)
    if prev is None:
        return snapped
    # coordinate-wise mean, rounded half-up, in exact integer math
    def mean_up(a: int, b: int) -> int:
        return (a + b + 1) // 2

    return BoundingBox(
        mean_up(snapped.x1, prev.x1),
        mean_up(snapped.y1, prev.y1),
        mean_up(snapped.x2, prev.x2),
        mean_up(snapped.y2, prev.y2),
        snapped.confidence,
    )


class BBoxSmoother:
    """Two-frame averaging state; resets whenever a frame yields no floor."""

    def __init__(self) -> None:
        self.prev: BoundingBox | None = None

    def process(self, raw: BoundingBox | None, frame_w: int, frame_h: int) -> BoundingBox | None:
        out = postprocess_bbox(raw, frame_w, frame_h, self.prev)
        self.prev = out  # None resets: a stale box must not bridge a detection gap
        return out

    def reset(self) -> None:
        self.prev = None


def floor_span(mask: FloorMask) -> PixelRect:
    """Tight axis-aligned bounding box of the floor pixels."""
    rows = np.flatnonzero(mask.bits.any(axis=1))
    cols = np.flatnonzero(mask.bits.any(axis=0))
    if rows.size == 0:
        raise NoFloor("mask contains no floor pixels")
    return PixelRect(int(cols[0]), int(rows[0]), int(cols[-1]) + 1, int(rows[-1]) + 1)


def _fractions_over(mask: FloorMask, span: PixelRect, grid: GridSpec) -> np.ndarray:
    raw = np.zeros((grid.ext_rows, grid.ext_cols), dtype=np.float64)
    for j in range(grid.ext_rows):
        for i in range(grid.ext_cols):
            r = cell_rect(grid, span, i, j)
            cell = mask.bits[r.y0 : r.y1, r.x0 : r.x1]
            # spans narrower than the grid leave zero-area cells; no pixels, no floor
            raw[j, i] = int(cell.sum()) / cell.size if cell.size else 0.0
    return raw


def raw_scores(mask: FloorMask, grid: GridSpec = DEFAULT_GRID) -> np.ndarray:
    """Exact floor-pixel fraction per extended cell over the floor span.

    Returns raw[j, i] for row j (0 = bottom) and column i. Raises NoFloor
    when the mask is empty.
    """
    return _fractions_over(mask, floor_span(mask), grid)


def adjusted_scores(
    raw: np.ndarray,
    cfg: OpenPathConfig = DEFAULT_OPEN_PATH,
    grid: GridSpec = DEFAULT_GRID,
) -> np.ndarray:
    """Weighted neighborhood score per belt cell, then the two 5% boosts.

    Boost order: the >boost_gate raise first, then the center column, both
    multiplicative. Output indexed [row_from_bottom, belt_col - 1].
    """
    if raw.shape != (grid.ext_rows, grid.ext_cols):
        raise ValueError(f"raw grid must be {grid.ext_rows}x{grid.ext_cols}")
    adj = np.zeros((grid.belt_rows, grid.belt_cols), dtype=np.float64)
    for j in range(grid.belt_rows):
        for b in range(1, grid.belt_cols + 1):
            i = b  # belt column b sits at extended column i=b
            c = raw[j, i]
            t = raw[j + 1, i]
            l = raw[j, i - 1]
            r = raw[j, i + 1]
            tl = raw[j + 1, i - 1]
            tr = raw[j + 1, i + 1]
            score = 0.4 * c + 0.2 * t + 0.1 * (l + r + tr + tl)
            if score > cfg.boost_gate:
                score *= cfg.boost_factor
            if b == grid.center_col:
                score *= cfg.center_factor
            adj[j, b - 1] = score
    return adj


def select_column(
    adjusted: np.ndarray,
    cfg: OpenPathConfig = DEFAULT_OPEN_PATH,
    grid: GridSpec = DEFAULT_GRID,
) -> tuple[int, bool] | None:
    """Pick the belt column with the highest top+bottom adjusted sum.

    Ties break by proximity to the center column, then leftmost. Returns
    None when even the winning sum falls below the no-signal threshold;
    otherwise (column, top_high) with top_high true iff the column's top
    cell reaches the top-cell gate.
    """
    sums = adjusted.sum(axis=0)
    best = min(
        range(1, grid.belt_cols + 1),
        key=lambda b: (-sums[b - 1], abs(b - grid.center_col), b),
    )
    if sums[best - 1] < cfg.no_signal_sum:
        return None
    top_high = bool(adjusted[grid.belt_rows - 1, best - 1] >= cfg.top_cell_gate)
    return best, top_high


def score_mask(
    mask: FloorMask,
    cfg: OpenPathConfig = DEFAULT_OPEN_PATH,
    grid: GridSpec = DEFAULT_GRID,
) -> CellScoreGrid:
    span = floor_span(mask)
    raw = _fractions_over(mask, span, grid)
    adj = adjusted_scores(raw, cfg, grid)
    sel = select_column(adj, cfg, grid)
    if sel is None:
        return CellScoreGrid(raw, adj, None, False, span)
    col, top_high = sel
    return CellScoreGrid(raw, adj, col, top_high, span)


def command_from_scores(scores: CellScoreGrid) -> BeltCommand:
    """No selection means silence; otherwise the winning unit's bottom motor
    goes high, and the top motor too iff the top cell cleared its gate.
    Open path emits intensity 3 only."""
    if scores.selected_col is None:
        return BeltCommand.all_off()
    slots = [0] * 10
    slots[motor_index(scores.selected_col, "bottom")] = 3
    if scores.top_high:
        slots[motor_index(scores.selected_col, "top")] = 3
    return BeltCommand.of(slots)


def open_path_command(
    mask: FloorMask | None,
    cfg: OpenPathConfig = DEFAULT_OPEN_PATH,
    grid: GridSpec = DEFAULT_GRID,
) -> BeltCommand:
    """End-to-end open path: mask in, belt command out; silent on no floor."""
    if mask is None:
        return BeltCommand.all_off()
    try:
        scores = score_mask(mask, cfg, grid)
    except NoFloor:
        return BeltCommand.all_off()
    return command_from_scores(scores)


def dump_scores(scores: CellScoreGrid, grid: GridSpec = DEFAULT_GRID) -> str:
    """Text diagnostic: raw score per extended cell (small), adjusted score
    per belt cell (large), selected column marked."""
    lines = []
    lines.append(f"span: x[{scores.span.x0},{scores.span.x1}) y[{scores.span.y0},{scores.span.y1})")
    for j in reversed(range(grid.ext_rows)):  # print top row first
        raw_cells = "  ".join(f"{scores.raw[j, i]:4.2f}" for i in range(grid.ext_cols))
        lines.append(f"raw  j={j}:  {raw_cells}")
        if j < grid.belt_rows:
            adj_cells = []
            for b in range(1, grid.belt_cols + 1):
                mark = "*" if b == scores.selected_col else " "
                adj_cells.append(f"[{scores.adjusted[j, b - 1]:5.3f}]{mark}")
            lines.append(f"adj  j={j}:        " + " ".join(adj_cells))
    if scores.selected_col is None:
        lines.append("selected: none (no signal)")
    else:
        both = "top+bottom" if scores.top_high else "bottom only"
        lines.append(f"selected: column {scores.selected_col} ({both})")
    return "\n".join(lines)
