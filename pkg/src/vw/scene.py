"""Geometric stand-in for the perception models: obstacle-course scenes
built from the published course dimensions, rendered to ground-truth floor
masks and closeness maps through a pinhole camera.

World frame: x spans the field width, y the length (start side at y=0), z
up. Heading 0 points along +x; the usual start heading toward the goal is
pi/2. Closeness is affine in distance, c(d) = clamp01(0.95 - 0.15*d), so
the depth-mode bin boundaries land at exactly 1, 2, and 3 meters.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, SceneError
from .grid import DepthMap, FloorMask

FIELD_WIDTH_M = 1.778  # 70 in
FIELD_LENGTH_M = 2.667  # 105 in
DIVIDER_HEIGHT_M = 1.8288  # 72 in
NOODLE_RADIUS_M = 0.0762  # 6 in diameter
NOODLE_HEIGHT_M = 1.524  # 60 in
CAMERA_HEIGHT_M = 1.40
CAMERA_HFOV_RAD = 2.094
RENDER_W = 640
RENDER_H = 360

IN_TO_M = 0.0254


@dataclass(frozen=True)
class Cylinder:
    cx: float
    cy: float
    radius: float = NOODLE_RADIUS_M
    height: float = NOODLE_HEIGHT_M

    def __post_init__(self) -> None:
        if self.radius <= 0:
            raise ConfigError("cylinder radius must be positive")


@dataclass(frozen=True)
class Scene:
    field_width: float = FIELD_WIDTH_M
    field_length: float = FIELD_LENGTH_M
    divider_height: float = DIVIDER_HEIGHT_M
    obstacles: tuple[Cylinder, ...] = ()
    start: tuple[float, float] = (FIELD_WIDTH_M / 2, 0.20)
    goal: tuple[float, float] = (FIELD_WIDTH_M / 2, FIELD_LENGTH_M - 0.20)
    name: str = "custom"

    def __post_init__(self) -> None:
        for ob in self.obstacles:
            if not (
                ob.radius <= ob.cx <= self.field_width - ob.radius
                and ob.radius <= ob.cy <= self.field_length - ob.radius
            ):
                raise ConfigError(f"obstacle at ({ob.cx:.3f},{ob.cy:.3f}) outside the field")

    def contains(self, x: float, y: float) -> bool:
        return 0.0 <= x <= self.field_width and 0.0 <= y <= self.field_length


@dataclass(frozen=True)
class CameraModel:
    x: float
    y: float
    yaw: float  # heading of the optical axis in the x-y plane
    height: float = CAMERA_HEIGHT_M
    hfov: float = CAMERA_HFOV_RAD
    width: int = RENDER_W
    height_px: int = RENDER_H

    def __post_init__(self) -> None:
        if not 0 < self.hfov < math.pi:
            raise ValueError("hfov must be in (0, pi)")
        if self.width <= 0 or self.height_px <= 0:
            raise ValueError("resolution must be positive")


def closeness_of(distance: np.ndarray | float) -> np.ndarray | float:
    return np.clip(0.95 - 0.15 * np.asarray(distance, dtype=np.float64), 0.0, 1.0)


def _ray_grid(camera: CameraModel) -> np.ndarray:
    """Unit ray directions, shape (h, w, 3), row 0 = top of image."""
    w, h = camera.width, camera.height_px
    f = (w / 2) / math.tan(camera.hfov / 2)
    px = (np.arange(w) + 0.5 - w / 2) / f
    py = (np.arange(h) + 0.5 - h / 2) / f
    u, v = np.meshgrid(px, py)
    fwd = np.array([math.cos(camera.yaw), math.sin(camera.yaw), 0.0])
    right = np.array([math.sin(camera.yaw), -math.cos(camera.yaw), 0.0])
    down = np.array([0.0, 0.0, -1.0])
    dirs = fwd[None, None, :] + u[:, :, None] * right[None, None, :] + v[:, :, None] * down[None, None, :]
    return dirs / np.linalg.norm(dirs, axis=2, keepdims=True)


def render_views(scene: Scene, camera: CameraModel) -> tuple[FloorMask, DepthMap]:
    """Raycast every pixel against ground, dividers, and cylinders.

    A pixel is floor iff its nearest hit is the ground plane inside the
    field. Closeness maps the nearest-hit distance for every hit kind;
    sky and out-of-field ground read as non-floor with closeness 0.
    """
    if not scene.contains(camera.x, camera.y):
        raise SceneError("camera outside the field")
    dirs = _ray_grid(camera)
    ox, oy, oz = camera.x, camera.y, camera.height
    dx, dy, dz = dirs[..., 0], dirs[..., 1], dirs[..., 2]
    inf = np.inf
    best_t = np.full(dx.shape, inf)
    floor_hit = np.zeros(dx.shape, dtype=bool)

    # ground plane z=0
    with np.errstate(divide="ignore", invalid="ignore"):
        tg = np.where(dz < 0, -oz / dz, inf)
    gx = ox + tg * dx
    gy = oy + tg * dy
    in_field = (gx >= 0) & (gx <= scene.field_width) & (gy >= 0) & (gy <= scene.field_length)
    ground_valid = np.isfinite(tg)
    better = ground_valid & (tg < best_t)
    best_t = np.where(better, tg, best_t)
    floor_hit = better & in_field
    ground_out = better & ~in_field  # out-of-field ground: reads as empty sky

    # dividers: planes x=0 and x=field_width, y in [0,L], z in [0,H]
    for wall_x in (0.0, scene.field_width):
        with np.errstate(divide="ignore", invalid="ignore"):
            tw = np.where(dx != 0, (wall_x - ox) / dx, inf)
        tw = np.where(tw > 1e-9, tw, inf)
        wy = oy + tw * dy
        wz = oz + tw * dz
        ok = (
            np.isfinite(tw)
            & (wy >= 0)
            & (wy <= scene.field_length)
            & (wz >= 0)
            & (wz <= scene.divider_height)
        )
        better = ok & (tw < best_t)
        best_t = np.where(better, tw, best_t)
        floor_hit &= ~better
        ground_out &= ~better

    # cylinders: lateral surface (camera sits below every top cap)
    for ob in scene.obstacles:
        fx = ox - ob.cx
        fy = oy - ob.cy
        a = dx * dx + dy * dy
        b = 2 * (fx * dx + fy * dy)
        c = fx * fx + fy * fy - ob.radius * ob.radius
        disc = b * b - 4 * a * c
        with np.errstate(invalid="ignore", divide="ignore"):
            sq = np.sqrt(np.where(disc >= 0, disc, np.nan))
            t1 = (-b - sq) / (2 * a)
            t2 = (-b + sq) / (2 * a)
        for tc in (t1, t2):
            zc = oz + tc * dz
            ok = np.isfinite(tc) & (tc > 1e-9) & (zc >= 0) & (zc <= ob.height)
            better = ok & (tc < best_t)
            best_t = np.where(better, tc, best_t)
            floor_hit &= ~better
            ground_out &= ~better

    hit = np.isfinite(best_t) & ~ground_out
    closeness = np.where(hit, closeness_of(np.where(np.isfinite(best_t), best_t, 0.0)), 0.0)
    return FloorMask(floor_hit), DepthMap(closeness)


def camera_for_agent(
    scene: Scene, x: float, y: float, heading: float, width: int = RENDER_W, height_px: int = RENDER_H
) -> CameraModel:
    return CameraModel(x, y, heading, width=width, height_px=height_px)


# --- canonical course layouts ---------------------------------------------

# A row is 4 cylinders. Horizontal rows anchor to one wall and leave a
# passable gap at the other; gaps alternate sides where geometry allows, so
# a course reads as a slalom. Diagonal rows tilt 45 degrees about the row
# centroid; a tilted row's end pillars reach to within 0.35 m of the
# neighboring row lines, so a diagonal composes safely only when its open
# side faces its neighbors' gaps (every course below stays walkable for a
# 0.4 m wide body; in-row gaps never are).
_ROW_SPACING = 0.30
_ROW_MARGIN = 0.13


def _horizontal_row(y: float, anchor: str) -> list[Cylinder]:
    xs = [_ROW_MARGIN + k * _ROW_SPACING for k in range(4)]
    if anchor == "right":
        xs = [FIELD_WIDTH_M - x for x in xs]
    return [Cylinder(x, y) for x in xs]


def _diagonal_row(y: float, anchor: str, tilt: float) -> list[Cylinder]:
    """Horizontal row rotated 45 degrees about its center."""
    row = _horizontal_row(y, anchor)
    cx = sum(ob.cx for ob in row) / 4
    cy = sum(ob.cy for ob in row) / 4
    cos_t, sin_t = math.cos(tilt), math.sin(tilt)
    out = []
    for ob in row:
        rx = ob.cx - cx
        ry = ob.cy - cy
        out.append(Cylinder(cx + rx * cos_t - ry * sin_t, cy + rx * sin_t + ry * cos_t))
    return out


def _row_ys(n: int) -> list[float]:
    return [FIELD_LENGTH_M * (k + 1) / (n + 1) for k in range(n)]


def _rows(kinds: list[tuple[str, str, float]]) -> tuple[Cylinder, ...]:
    ys = _row_ys(len(kinds))
    obs: list[Cylinder] = []
    for y, (shape, anchor, tilt) in zip(ys, kinds):
        if shape == "h":
            obs.extend(_horizontal_row(y, anchor))
        else:
            obs.extend(_diagonal_row(y, anchor, tilt))
    return tuple(obs)


_QUARTER = math.pi / 4

CANONICAL_LAYOUTS: dict[str, list[tuple[str, str, float]]] = {
    "easy-a": [("h", "left", 0.0)],
    "easy-b": [("d", "left", _QUARTER)],
    "easy-c": [("d", "right", -_QUARTER)],
    "medium-d": [("h", "left", 0.0), ("h", "right", 0.0)],
    "medium-e": [("h", "right", 0.0), ("d", "left", _QUARTER)],
    "medium-f": [("d", "left", _QUARTER), ("d", "right", -_QUARTER)],
    "hard-g": [("h", "left", 0.0), ("h", "right", 0.0), ("h", "left", 0.0)],
    "hard-h": [("h", "right", 0.0), ("h", "left", 0.0), ("d", "left", _QUARTER)],
    "hard-i": [("d", "left", _QUARTER), ("h", "left", 0.0), ("h", "right", 0.0)],
}

DIFFICULTY_OF = {name: name.split("-")[0] for name in CANONICAL_LAYOUTS}


def build_course(layout: str | dict) -> Scene:
    """Build one of the nine canonical layouts by name, or a scene from an
    explicit description (dict with optional "units": "in" or "m")."""
    if isinstance(layout, str):
        kinds = CANONICAL_LAYOUTS.get(layout)
        if kinds is None:
            raise ConfigError(f"unknown layout {layout!r}")
        return Scene(obstacles=_rows(kinds), name=layout)
    return _scene_from_dict(layout)


def _scene_from_dict(doc: dict) -> Scene:
    if "layout" in doc:
        base = build_course(doc["layout"])
        return replace(base, name=doc.get("name", base.name))
    scale = IN_TO_M if doc.get("units", "m") == "in" else 1.0
    try:
        obstacles = tuple(
            Cylinder(
                o["cx"] * scale,
                o["cy"] * scale,
                o.get("radius", NOODLE_RADIUS_M / scale) * scale,
                o.get("height", NOODLE_HEIGHT_M / scale) * scale,
            )
            for o in doc.get("obstacles", [])
        )
        kwargs = {}
        for key in ("field_width", "field_length"):
            if key in doc:
                kwargs[key] = doc[key] * scale
        for key in ("start", "goal"):
            if key in doc:
                kwargs[key] = (doc[key][0] * scale, doc[key][1] * scale)
        return Scene(obstacles=obstacles, name=doc.get("name", "custom"), **kwargs)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad course description: {exc}") from exc


def load_course(path: str) -> Scene:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise ConfigError("course file must hold a JSON object")
    return _scene_from_dict(doc)
