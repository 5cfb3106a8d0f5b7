"""Depth mode: per-frame min-max rescaling of relative closeness, three-bin
classification, and per-cell intensity rules over the full-frame 2x5 grid.

Closeness runs 0 (farthest) to 1 (closest). Bins partition (0.50, 1]:
close d > 0.80, medium 0.65 < d <= 0.80, far 0.50 < d <= 0.65; anything at
or below 0.50 is ignored. Cell intensity is decided in safety-priority
order: close fraction first, then medium, then far, all strict comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidDepth
from .grid import (
    DEFAULT_GRID,
    BeltCommand,
    DepthMap,
    GridSpec,
    PixelRect,
    motor_index,
    partition_bounds,
)


@dataclass(frozen=True)
class DepthBinConfig:
    close_gate: float = 0.80
    medium_gate: float = 0.65
    far_gate: float = 0.50
    far_frac: float = 0.50
    medium_frac: float = 0.40
    close_frac: float = 0.30

    def __post_init__(self) -> None:
        if not 0.0 < self.far_gate < self.medium_gate < self.close_gate < 1.0:
            raise ValueError("gates must satisfy 0 < far < medium < close < 1")
        for name in ("far_frac", "medium_frac", "close_frac"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must be in (0,1)")


DEFAULT_BINS = DepthBinConfig()


def rescale_depth(raw: np.ndarray) -> DepthMap:
    """Min-max rescale an arbitrary-range closeness matrix to [0,1].

    A constant matrix maps to all 0.0 (uniformly farthest: a featureless
    frame carries no proximity evidence). Non-finite input raises
    InvalidDepth.
    """
    arr = np.asarray(raw, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise InvalidDepth("depth matrix must be 2-D and non-empty")
    if not np.isfinite(arr).all():
        raise InvalidDepth("depth matrix contains non-finite values")
    lo = arr.min()
    hi = arr.max()
    if hi == lo:
        return DepthMap(np.zeros_like(arr))
    return DepthMap((arr - lo) / (hi - lo))


def bin_fractions(
    depth: DepthMap, cell: PixelRect, cfg: DepthBinConfig = DEFAULT_BINS
) -> tuple[float, float, float]:
    """Fractions of a cell's pixels in the close/medium/far bins.

    Raises IndexError for an empty cell or one outside the map.
    """
    if cell.is_empty():
        raise IndexError("empty cell")
    h, w = depth.closeness.shape
    if cell.x0 < 0 or cell.y0 < 0 or cell.x1 > w or cell.y1 > h:
        raise IndexError("cell outside depth map")
    d = depth.closeness[cell.y0 : cell.y1, cell.x0 : cell.x1]
    n = d.size
    f_close = int((d > cfg.close_gate).sum()) / n
    f_medium = int(((d > cfg.medium_gate) & (d <= cfg.close_gate)).sum()) / n
    f_far = int(((d > cfg.far_gate) & (d <= cfg.medium_gate)).sum()) / n
    return f_close, f_medium, f_far


def cell_intensity(
    f_close: float, f_medium: float, f_far: float, cfg: DepthBinConfig = DEFAULT_BINS
) -> int:
    """Safety-priority intensity: close outranks medium outranks far."""
    if f_close > cfg.close_frac:
        return 3
    if f_medium > cfg.medium_frac:
        return 2
    if f_far > cfg.far_frac:
        return 1
    return 0


def depth_cell_rect(depth: DepthMap, col: int, row: int, grid: GridSpec = DEFAULT_GRID) -> PixelRect:
    """Pixel rectangle of belt cell (col 1..5, row "top"/"bottom") over the
    full frame; no margins in depth mode. Top motor row reads the top image
    half."""
    if not 1 <= col <= grid.belt_cols:
        raise IndexError(f"col must be 1..{grid.belt_cols}")
    if row not in ("top", "bottom"):
        raise IndexError("row must be 'top' or 'bottom'")
    h, w = depth.closeness.shape
    xs = partition_bounds(w, grid.belt_cols)
    ys = partition_bounds(h, grid.belt_rows)
    r = 0 if row == "top" else 1  # image y grows downward
    return PixelRect(xs[col - 1], ys[r], xs[col], ys[r + 1])


def depth_command(depth: DepthMap, cfg: DepthBinConfig = DEFAULT_BINS, grid: GridSpec = DEFAULT_GRID) -> BeltCommand:
    """Partition the full map into the 2x5 grid and fill each motor slot
    with its cell's intensity."""
    slots = [0] * (grid.belt_rows * grid.belt_cols)
    for col in range(1, grid.belt_cols + 1):
        for row in ("top", "bottom"):
            cell = depth_cell_rect(depth, col, row, grid)
            slots[motor_index(col, row)] = cell_intensity(*bin_fractions(depth, cell, cfg), cfg)
    return BeltCommand.of(slots)


def dump_depth(depth: DepthMap, cfg: DepthBinConfig = DEFAULT_BINS, grid: GridSpec = DEFAULT_GRID) -> str:
    """Per-cell (f_close, f_medium, f_far, intensity) table, top row first."""
    lines = []
    for row in ("top", "bottom"):
        cells = []
        for col in range(1, grid.belt_cols + 1):
            fc, fm, ff = bin_fractions(depth, depth_cell_rect(depth, col, row, grid), cfg)
            cells.append(f"({fc:4.2f},{fm:4.2f},{ff:4.2f})->{cell_intensity(fc, fm, ff, cfg)}")
        lines.append(f"{row:>6}: " + "  ".join(cells))
    return "\n".join(lines)
