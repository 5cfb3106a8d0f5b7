import numpy as np
import pytest
from hypothesis import given, strategies as st

from vw.grid import (
    DEFAULT_GRID,
    BeltCommand,
    BoundingBox,
    DepthMap,
    FloorMask,
    GridSpec,
    PixelRect,
    cell_rect,
    motor_index,
    partition_bounds,
)

from conftest import oracle_bounds


def test_cell_rect_uniform_partition_corners():
    span = PixelRect(0, 0, 700, 300)
    r = cell_rect(DEFAULT_GRID, span, 0, 0)  # row 0 = bottom
    assert (r.x0, r.x1) == (0, 100)
    assert (r.y0, r.y1) == (200, 300)
    r = cell_rect(DEFAULT_GRID, span, 6, 2)
    assert (r.x0, r.x1) == (600, 700)
    assert (r.y0, r.y1) == (0, 100)


def test_cell_rect_rounding_rule():
    # round(3*701/7) = round(300.43) = 300, round(4*701/7) = round(400.57) = 401
    span = PixelRect(0, 0, 701, 300)
    r = cell_rect(DEFAULT_GRID, span, 3, 0)
    assert (r.x0, r.x1) == (300, 401)


def test_cell_rect_out_of_range():
    span = PixelRect(0, 0, 700, 300)
    with pytest.raises(IndexError):
        cell_rect(DEFAULT_GRID, span, 7, 0)
    with pytest.raises(IndexError):
        cell_rect(DEFAULT_GRID, span, 0, 3)


@given(st.integers(1, 2000), st.integers(1, 12))
def test_partition_matches_halfup_oracle(extent, n):
    assert partition_bounds(extent, n) == oracle_bounds(extent, n)


@given(st.integers(7, 900), st.integers(3, 400))
def test_cells_partition_span_exactly(w, h):
    span = PixelRect(3, 5, 3 + w, 5 + h)
    seen = np.zeros((h, w), dtype=int)
    for j in range(DEFAULT_GRID.ext_rows):
        for i in range(DEFAULT_GRID.ext_cols):
            r = cell_rect(DEFAULT_GRID, span, i, j)
            seen[r.y0 - 5 : r.y1 - 5, r.x0 - 3 : r.x1 - 3] += 1
    assert (seen == 1).all()


def test_grid_spec_margin_invariant():
    with pytest.raises(ValueError):
        GridSpec(belt_rows=2, belt_cols=5, ext_rows=4, ext_cols=7)


def test_belt_command_validation():
    BeltCommand.of([0, 1, 2, 3, 0, 1, 2, 3, 0, 1])
    with pytest.raises(ValueError):
        BeltCommand.of([0] * 9)
    with pytest.raises(ValueError):
        BeltCommand.of([0] * 11)
    with pytest.raises(ValueError):
        BeltCommand.of([0, 0, 0, 0, 0, 0, 0, 0, 0, 4])
    with pytest.raises(ValueError):
        BeltCommand.of([0, 0, 0, 0, -1, 0, 0, 0, 0, 0])


def test_motor_index_mapping():
    # first number = client1 top, second = client1 bottom
    assert motor_index(1, "top") == 0
    assert motor_index(1, "bottom") == 1
    assert motor_index(5, "top") == 8
    assert motor_index(5, "bottom") == 9
    with pytest.raises(IndexError):
        motor_index(6, "top")
    with pytest.raises(ValueError):
        motor_index(2, "middle")


def test_command_motor_accessor():
    cmd = BeltCommand.of([3, 1, 0, 0, 0, 0, 0, 0, 2, 3])
    assert cmd.motor(1, "top") == 3
    assert cmd.motor(1, "bottom") == 1
    assert cmd.motor(5, "top") == 2
    assert cmd.motor(5, "bottom") == 3


def test_mask_and_depth_validation():
    with pytest.raises(ValueError):
        FloorMask(np.ones(4, dtype=bool))
    m = FloorMask(np.ones((2, 3), dtype=bool))
    assert m.floor_count() == 6 and m.width == 3 and m.height == 2
    with pytest.raises(ValueError):
        DepthMap(np.array([[0.5, 1.2]]))
    with pytest.raises(ValueError):
        DepthMap(np.array([[np.nan, 0.1]]))


def test_bounding_box_invariants():
    with pytest.raises(ValueError):
        BoundingBox(10, 10, 10, 20)
    with pytest.raises(ValueError):
        BoundingBox(0, 0, 5, 5, confidence=1.5)
    with pytest.raises(ValueError):
        BoundingBox(0, 0, 700, 300).clipped_to(640, 360)
