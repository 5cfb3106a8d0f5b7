"""Shared geometric and command types for both navigation modes and the belt.

Conventions used throughout:

* Grid row index j increases upward: j=0 is the bottom row (nearest the
  walker), so the neighbor above cell (i, j) is (i, j+1).  Column index i
  increases left to right.
* Pixel rectangles are half-open: x in [x0, x1), y in [y0, y1), with image
  y increasing downward (top row of the image is y=0).
* Cell boundaries use round(k * extent / n) with half-up rounding, computed
  in exact integer arithmetic, so the cells partition the span bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

INTENSITY_LEVELS = (0, 1, 2, 3)


@dataclass(frozen=True)
class GridSpec:
    """Belt grid (2x5) and its margin-extended counterpart (3x7).

    The belt occupies the bottom 2 rows and middle 5 columns of the
    extended grid; margins sit on the left, top, and right only.
    Belt column b (1-based, 1..belt_cols) is extended column i=b
    (0-based, thanks to the single left margin column).
    """

    belt_rows: int = 2
    belt_cols: int = 5
    ext_rows: int = 3
    ext_cols: int = 7
    center_col: int = 3  # 1-based belt column

    def __post_init__(self) -> None:
        if self.ext_rows != self.belt_rows + 1 or self.ext_cols != self.belt_cols + 2:
            raise ValueError("extended grid must add margins on left, top and right only")
        if not 1 <= self.center_col <= self.belt_cols:
            raise ValueError("center_col out of range")


DEFAULT_GRID = GridSpec()


@dataclass(frozen=True)
class BeltCommand:
    """Ten motor intensities in {0,1,2,3}.

    Index k drives unit k//2 + 1 (client1..client5, left to right);
    even k is the unit's top-row motor, odd k the bottom-row motor.
    """

    intensities: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.intensities) != 10:
            raise ValueError(f"command must have exactly 10 intensities, got {len(self.intensities)}")
        for v in self.intensities:
            if not isinstance(v, int) or isinstance(v, bool) or v not in INTENSITY_LEVELS:
                raise ValueError(f"intensity {v!r} outside {{0,1,2,3}}")

    @classmethod
    def of(cls, values) -> "BeltCommand":
        return cls(tuple(int(v) for v in values))

    @classmethod
    def all_off(cls) -> "BeltCommand":
        return cls((0,) * 10)

    def motor(self, unit: int, row: str) -> int:
        """Intensity of one motor; unit is 1..5, row is 'top' or 'bottom'."""
        if not 1 <= unit <= 5:
            raise IndexError(f"unit {unit} out of range")
        return self.intensities[2 * (unit - 1) + (0 if row == "top" else 1)]

    def __iter__(self):
        return iter(self.intensities)


def motor_index(unit: int, row: str) -> int:
    """Slot in the 10-integer command for a unit's top or bottom motor."""
    if not 1 <= unit <= 5:
        raise IndexError(f"unit {unit} out of range")
    if row not in ("top", "bottom"):
        raise ValueError(f"row must be 'top' or 'bottom', got {row!r}")
    return 2 * (unit - 1) + (0 if row == "top" else 1)


@dataclass(frozen=True)
class PixelRect:
    """Half-open pixel rectangle [x0,x1) x [y0,y1)."""

    x0: int
    y0: int
    x1: int
    y1: int

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def height(self) -> int:
        return self.y1 - self.y0

    @property
    def area(self) -> int:
        return self.width * self.height

    def is_empty(self) -> bool:
        return self.x1 <= self.x0 or self.y1 <= self.y0


class FloorMask:
    """Binary per-pixel floor flags, row-major, top image row first."""

    def __init__(self, bits: np.ndarray) -> None:
        bits = np.asarray(bits, dtype=bool)
        if bits.ndim != 2 or bits.shape[0] < 1 or bits.shape[1] < 1:
            raise ValueError("mask must be a non-empty 2-D array")
        bits = bits.copy()
        bits.setflags(write=False)
        self.bits = bits

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    def floor_count(self) -> int:
        return int(self.bits.sum())


class DepthMap:
    """Per-pixel closeness in [0,1]: 0 is farthest, 1 is closest."""

    def __init__(self, closeness: np.ndarray) -> None:
        arr = np.asarray(closeness, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("depth map must be a non-empty 2-D array")
        if not np.isfinite(arr).all():
            raise ValueError("closeness contains non-finite values")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("closeness outside [0,1]; rescale first")
        arr = arr.copy()
        arr.setflags(write=False)
        self.closeness = arr

    @property
    def height(self) -> int:
        return self.closeness.shape[0]

    @property
    def width(self) -> int:
        return self.closeness.shape[1]


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box: (x1,y1) top-left inclusive, (x2,y2) bottom-right exclusive."""

    x1: int
    y1: int
    x2: int
    y2: int
    confidence: float = 1.0

    def __post_init__(self) -> None:
        if not (self.x1 < self.x2 and self.y1 < self.y2):
            raise ValueError("box must have positive extent")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence outside [0,1]")

    def clipped_to(self, frame_w: int, frame_h: int) -> "BoundingBox":
        if self.x1 < 0 or self.y1 < 0 or self.x2 > frame_w or self.y2 > frame_h:
            raise ValueError("box outside frame bounds")
        return self


def partition_bounds(extent: int, n: int) -> list[int]:
    """Boundaries round(k*extent/n), k=0..n, half-up, exact integer math."""
    if extent <= 0 or n <= 0:
        raise ValueError("extent and n must be positive")
    return [(2 * k * extent + n) // (2 * n) for k in range(n + 1)]


def cell_rect(grid: GridSpec, span: PixelRect, col: int, row: int) -> PixelRect:
    """Pixel rectangle of extended-grid cell (col, row); row 0 is the bottom.

    The ext_cols columns and ext_rows rows partition the span exactly:
    every span pixel belongs to exactly one cell.
    """
    if not 0 <= col < grid.ext_cols:
        raise IndexError(f"col {col} outside 0..{grid.ext_cols - 1}")
    if not 0 <= row < grid.ext_rows:
        raise IndexError(f"row {row} outside 0..{grid.ext_rows - 1}")
    if span.is_empty():
        raise ValueError("span must be non-empty")
    xb = partition_bounds(span.width, grid.ext_cols)
    yb = partition_bounds(span.height, grid.ext_rows)
    # row 0 = bottom of the span = largest y block
    top_block = grid.ext_rows - 1 - row
    return PixelRect(
        x0=span.x0 + xb[col],
        y0=span.y0 + yb[top_block],
        x1=span.x0 + xb[col + 1],
        y1=span.y0 + yb[top_block + 1],
    )
