"""Binary PGM (P5) fixture i/o.

Floor masks are 8-bit (255 = floor, 0 = non-floor); depth maps are 16-bit
big-endian with closeness = value / 65535. Both row-major, top row first.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .grid import DepthMap, FloorMask


def _read_header(data: bytes) -> tuple[int, int, int, int]:
    """Parse the P5 header; returns (width, height, maxval, data offset)."""
    if not data.startswith(b"P5"):
        raise ValueError("not a binary PGM (P5) file")
    fields: list[int] = []
    i = 2
    while len(fields) < 3:
        while i < len(data) and data[i : i + 1].isspace():
            i += 1
        if i < len(data) and data[i : i + 1] == b"#":
            while i < len(data) and data[i] != 0x0A:
                i += 1
            continue
        j = i
        while j < len(data) and not data[j : j + 1].isspace():
            j += 1
        if j == i:
            raise ValueError("truncated PGM header")
        fields.append(int(data[i:j]))
        i = j
    i += 1  # single whitespace byte after maxval
    return fields[0], fields[1], fields[2], i


def read_pgm(path: str | Path) -> tuple[np.ndarray, int]:
    """Read a P5 file; returns (array shape (h, w), maxval)."""
    data = Path(path).read_bytes()
    width, height, maxval, off = _read_header(data)
    if maxval <= 0 or maxval > 65535:
        raise ValueError(f"unsupported maxval {maxval}")
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    count = width * height
    pixels = np.frombuffer(data, dtype=dtype, count=count, offset=off)
    if pixels.size != count:
        raise ValueError("truncated PGM pixel data")
    return pixels.reshape(height, width).astype(np.uint16 if maxval > 255 else np.uint8), maxval


def write_pgm(path: str | Path, array: np.ndarray, maxval: int) -> None:
    arr = np.asarray(array)
    if arr.ndim != 2:
        raise ValueError("PGM array must be 2-D")
    header = f"P5\n{arr.shape[1]} {arr.shape[0]}\n{maxval}\n".encode("ascii")
    if maxval > 255:
        body = arr.astype(">u2").tobytes()
    else:
        body = arr.astype("u1").tobytes()
    Path(path).write_bytes(header + body)


def load_floor_mask(path: str | Path) -> FloorMask:
    arr, maxval = read_pgm(path)
    if maxval > 255:
        raise ValueError("floor mask fixtures are 8-bit PGM")
    return FloorMask(arr != 0)


def save_floor_mask(path: str | Path, mask: FloorMask) -> None:
    write_pgm(path, np.where(mask.bits, 255, 0).astype(np.uint8), maxval=255)


def load_depth_map(path: str | Path) -> DepthMap:
    arr, maxval = read_pgm(path)
    if maxval != 65535:
        raise ValueError("depth map fixtures are 16-bit PGM (maxval 65535)")
    return DepthMap(arr.astype(np.float64) / 65535.0)


def save_depth_map(path: str | Path, depth: DepthMap) -> None:
    write_pgm(path, np.round(depth.closeness * 65535.0).astype(np.uint16), maxval=65535)
