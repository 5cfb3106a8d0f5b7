"""Session engine: perception input, mode selection, the 150 ms tick budget,
and the 300 ms publish cadence in one replayable loop.

Ticks land on exact 150 ms multiples and publishes on exact 300 ms
multiples of the session clock; when both land on the same instant the
tick runs first, so a publish always carries the freshest completed
command. Perception failures are fail-silent: the belt gets all zeros and
the log gets a diagnostic.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Protocol

import numpy as np

from .beltnet import DEFAULT_TOPIC, CommandSlot, InMemoryBus, Transport, encode_command
from .clock import Clock, EmulatedClock, RealClock
from .depthmode import depth_command
from .errors import ConfigError, NoFloor
from .grid import BeltCommand, BoundingBox, DepthMap, FloorMask
from .openpath import BBoxSmoother, command_from_scores, score_mask
from .pgm import load_depth_map, load_floor_mask
from .scene import CameraModel, Scene, render_views

TICK_BUDGET_MS = 150
PUBLISH_PERIOD_MS = 300

ModeStage = Callable[[FloorMask, DepthMap], BeltCommand]


class PerceptionBackend(Protocol):
    def frame(self) -> tuple[FloorMask, DepthMap]: ...


@dataclass(frozen=True)
class SessionConfig:
    mode: str = "open_path"
    tick_budget_ms: int = TICK_BUDGET_MS
    publish_period_ms: int = PUBLISH_PERIOD_MS
    perception: str = "synthetic"
    clock: str = "emulated"
    topic: str = DEFAULT_TOPIC

    def __post_init__(self) -> None:
        if self.mode not in ("open_path", "depth"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.tick_budget_ms > self.publish_period_ms:
            raise ConfigError("tick budget must not exceed the publish period")
        if self.tick_budget_ms <= 0:
            raise ConfigError("tick budget must be positive")


def tight_mask_bbox(mask: FloorMask) -> BoundingBox | None:
    """Detection stand-in: the tight floor bbox, None on an empty mask.

    Confidence is the floor's share of the frame, so marginal slivers of
    visible floor score low and the 0.02 confidence gate rejects them the
    way it would a real detector's doubtful output. Keeps the bbox
    post-processing stage live without a detector.
    """
    rows = np.flatnonzero(mask.bits.any(axis=1))
    cols = np.flatnonzero(mask.bits.any(axis=0))
    if rows.size == 0:
        return None
    conf = float(mask.bits.mean())
    return BoundingBox(int(cols[0]), int(rows[0]), int(cols[-1]) + 1, int(rows[-1]) + 1, conf)


class OpenPathStage:
    """Detection bbox -> two-frame smoothing -> mask windowing -> grid
    scoring -> command. Holds the per-session smoothing state."""

    def __init__(self) -> None:
        self.smoother = BBoxSmoother()
        self.last_scores = None

    def __call__(self, mask: FloorMask, depth: DepthMap) -> BeltCommand:
        h, w = mask.bits.shape
        box = self.smoother.process(tight_mask_bbox(mask), w, h)
        if box is None:
            self.last_scores = None
            return BeltCommand.all_off()
        windowed = np.zeros_like(mask.bits)
        windowed[box.y1 : box.y2, box.x1 : box.x2] = mask.bits[box.y1 : box.y2, box.x1 : box.x2]
        try:
            scores = score_mask(FloorMask(windowed))
        except NoFloor:
            self.last_scores = None
            return BeltCommand.all_off()
        self.last_scores = scores
        return command_from_scores(scores)


class DepthStage:
    """Stateless depth binning; fixtures and the renderer both deliver
    already-rescaled closeness."""

    def __init__(self) -> None:
        self.last_scores = None

    def __call__(self, mask: FloorMask, depth: DepthMap) -> BeltCommand:
        return depth_command(depth)


def make_mode_stage(mode: str) -> ModeStage:
    if mode == "open_path":
        return OpenPathStage()
    if mode == "depth":
        return DepthStage()
    raise ConfigError(f"unknown mode {mode!r}")


class SyntheticBackend:
    """Renders ground-truth views of a scene from a (possibly moving) pose."""

    def __init__(
        self,
        scene: Scene,
        pose: Callable[[], tuple[float, float, float]] | tuple[float, float, float] | None = None,
        width: int = 640,
        height: int = 360,
    ) -> None:
        self.scene = scene
        if pose is None:
            import math

            sx, sy = scene.start
            gx, gy = scene.goal
            pose = (sx, sy, math.atan2(gy - sy, gx - sx))
        self._pose = pose
        self.width = width
        self.height = height

    def frame(self) -> tuple[FloorMask, DepthMap]:
        pose = self._pose() if callable(self._pose) else self._pose
        x, y, heading = pose
        cam = CameraModel(x, y, heading, width=self.width, height_px=self.height)
        return render_views(self.scene, cam)


class FixtureBackend:
    """Replays PGM fixture pairs in a loop."""

    def __init__(self, mask_paths: list[str], depth_paths: list[str]) -> None:
        if not mask_paths and not depth_paths:
            raise ConfigError("no fixtures given")
        self.masks = [load_floor_mask(p) for p in mask_paths]
        self.depths = [load_depth_map(p) for p in depth_paths]
        self._i = 0

    def frame(self) -> tuple[FloorMask, DepthMap]:
        masks, depths = self.masks, self.depths
        if not masks:
            d = depths[self._i % len(depths)]
            m = FloorMask(np.zeros(d.closeness.shape, dtype=bool))
        else:
            m = masks[self._i % len(masks)]
        if not depths:
            d = DepthMap(np.zeros(m.bits.shape))
        else:
            d = depths[self._i % len(depths)]
        self._i += 1
        return m, d


@dataclass(frozen=True)
class TickDiagnostics:
    t_ms: int
    elapsed_ms: float
    overrun: bool
    error: str | None


@dataclass
class SessionEvent:
    kind: str  # "tick" | "publish"
    t_ms: int
    cmd: BeltCommand
    diag: TickDiagnostics | None = None


@dataclass
class SessionLog:
    events: list[SessionEvent] = field(default_factory=list)

    @property
    def ticks(self) -> list[SessionEvent]:
        return [e for e in self.events if e.kind == "tick"]

    @property
    def publishes(self) -> list[SessionEvent]:
        return [e for e in self.events if e.kind == "publish"]


class Session:
    """Owns the mode stage, the latest-command slot, and the two cadences."""

    def __init__(
        self,
        cfg: SessionConfig,
        backend: PerceptionBackend,
        transport: Transport | None = None,
        clock: Clock | None = None,
    ) -> None:
        self.cfg = cfg
        self.backend = backend
        self.transport = transport if transport is not None else InMemoryBus()
        if clock is None:
            clock = EmulatedClock() if cfg.clock == "emulated" else RealClock()
        self.clock = clock
        self.stage: ModeStage = make_mode_stage(cfg.mode)
        self.mode = cfg.mode
        self.slot = CommandSlot()
        self.slot.store(BeltCommand.all_off())

    def set_mode(self, mode: str) -> None:
        if mode != self.mode:
            self.stage = make_mode_stage(mode)
            self.mode = mode

    def tick(self, t_ms: int) -> tuple[BeltCommand, TickDiagnostics]:
        started = time.perf_counter()
        error = None
        try:
            mask, depth = self.backend.frame()
            cmd = self.stage(mask, depth)
        except Exception as exc:  # fail-silent belt
            cmd = BeltCommand.all_off()
            error = f"{type(exc).__name__}: {exc}"
        elapsed_ms = (time.perf_counter() - started) * 1000.0
        overrun = isinstance(self.clock, RealClock) and elapsed_ms > self.cfg.tick_budget_ms
        self.slot.store(cmd)
        return cmd, TickDiagnostics(t_ms, elapsed_ms, overrun, error)

    def publish(self, t_ms: int) -> BeltCommand:
        cmd = self.slot.load() or BeltCommand.all_off()
        self.transport.publish(self.cfg.topic, encode_command(cmd))
        return cmd


def run_session(session: Session, duration_ms: int) -> SessionLog:
    """Interleave ticks (every tick budget, from t=0, strictly inside the
    window, with the t=0 tick always) with publishes (every publish period,
    end-inclusive). A tick and a publish on the same instant run tick-first."""
    log = SessionLog()
    cfg = session.cfg
    tick_t = 0
    pub_t = 0
    while tick_t < duration_ms or tick_t == 0:
        # run any publish strictly earlier than the next tick
        while pub_t < tick_t and pub_t <= duration_ms:
            session.clock.sleep_until(pub_t)
            log.events.append(SessionEvent("publish", pub_t, session.publish(pub_t)))
            pub_t += cfg.publish_period_ms
        session.clock.sleep_until(tick_t)
        cmd, diag = session.tick(tick_t)
        log.events.append(SessionEvent("tick", tick_t, cmd, diag))
        if pub_t == tick_t and pub_t <= duration_ms:
            log.events.append(SessionEvent("publish", pub_t, session.publish(pub_t)))
            pub_t += cfg.publish_period_ms
        if isinstance(session.clock, EmulatedClock):
            # the tick ends exactly on its boundary regardless of compute time
            session.clock.sleep_until(tick_t + cfg.tick_budget_ms)
        tick_t += cfg.tick_budget_ms
    while pub_t <= duration_ms:
        session.clock.sleep_until(pub_t)
        log.events.append(SessionEvent("publish", pub_t, session.publish(pub_t)))
        pub_t += cfg.publish_period_ms
    return log
