"""Closed-loop trial runner: a simulated walker guided by belt commands (or
a cane-only baseline), a sweeping virtual cane, and the four trial metrics.

The walker is a behavioral stand-in, not a human model: every policy
constant lives in SimParams and is recorded in the TrialRecord. A trial is
out-and-back: walk from the start line to the goal line, about-face, and
return; completion time runs from first motion to the final start-line
crossing.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .errors import NoFloor
from .grid import BeltCommand, motor_index
from .scene import CAMERA_HFOV_RAD, CameraModel, Scene, render_views

TICK_MS = 150
PUBLISH_MS = 300
TIMEOUT_S = 300.0


@dataclass(frozen=True)
class AgentState:
    x: float
    y: float
    heading: float
    speed: float = 0.0
    body_radius: float = 0.20


@dataclass(frozen=True)
class CaneModel:
    reach: float = 1.2
    half_angle: float = 0.61
    period_s: float = 1.0

    def angle_at(self, heading: float, t_s: float) -> float:
        return heading + self.half_angle * math.sin(2 * math.pi * t_s / self.period_s)


@dataclass(frozen=True)
class SimParams:
    v_max: float = 0.8
    omega_max: float = 2.5  # rad/s steering rate
    omega_scan: float = 1.5  # rad/s rotate-in-place rate while silent
    body_radius: float = 0.20
    hesitation_speed: float = 0.05
    hesitation_min_s: float = 0.3
    sector_rad: float = CAMERA_HFOV_RAD / 5  # belt column -> bearing step
    depth_turn_gain: float = 0.9  # rad/s per side-pressure intensity step
    scan_pause_s: float = 0.9  # stop-and-scan dwell before creeping on silence
    scan_wobble_rad: float = 0.08  # scan amplitude; small so the cane stays off walls
    creep_turn_away_rad: float = 0.8  # deterministic cane-contact dodge while creeping
    dodge_hold_s: float = 0.8  # commit to a dodge heading this long before re-aiming
    skirt_bias_rad: float = 0.12  # forward lean while skirting a blocking row
    skirt_hug_rad: float = 0.18  # off-route lean while following a wall past the row
    skirt_exit_quiet_s: float = 1.2  # uncontested skirting time before re-aiming ahead
    wall_band_m: float = 0.35  # distance from a wall inside which skirting hugs it
    stall_flip_s: float = 1.2  # skirting this long without moving flips the side
    stall_dist_m: float = 0.06  # displacement below this still counts as stalled
    start_jitter_xy: float = 0.06  # seeded start-position spread along the start line
    start_jitter_rad: float = 0.03  # seeded initial-heading spread
    cane: CaneModel = field(default_factory=CaneModel)
    render_w: int = 160
    render_h: int = 90
    tick_ms: int = TICK_MS
    publish_ms: int = PUBLISH_MS
    timeout_s: float = TIMEOUT_S


@dataclass(frozen=True)
class Sample:
    t_ms: int
    agent: AgentState
    cmd: BeltCommand


@dataclass
class TrialRecord:
    mode: str
    layout: str
    seed: int
    params: SimParams
    samples: list[Sample] = field(default_factory=list)
    contacts: list[tuple[int, str]] = field(default_factory=list)
    completed: bool = False

    def to_jsonl(self) -> str:
        head = {
            "mode": self.mode,
            "layout": self.layout,
            "seed": self.seed,
            "completed": self.completed,
            "params": _params_dict(self.params),
            "contacts": [[t, oid] for t, oid in self.contacts],
        }
        lines = [json.dumps(head, sort_keys=True)]
        for s in self.samples:
            lines.append(
                json.dumps(
                    {
                        "t": s.t_ms,
                        "x": s.agent.x,
                        "y": s.agent.y,
                        "heading": s.agent.heading,
                        "speed": s.agent.speed,
                        "cmd": list(s.cmd.intensities),
                    },
                    sort_keys=True,
                )
            )
        return "\n".join(lines) + "\n"


def _params_dict(p: SimParams) -> dict:
    d = asdict(p)
    return d


@dataclass(frozen=True)
class TrialMetrics:
    completion_time: float
    hesitation_pct: float
    cane_contacts: int
    safety_window: float
    completed: bool


MODES = ("open_path", "depth", "cane_only")


# --- policy -----------------------------------------------------------------


@dataclass
class PolicyContext:
    """Per-trial walker state carried across policy steps: the objective,
    what the cane just reported, and short-term memory (how long the belt
    has been silent, a committed turn direction)."""

    goal: tuple[float, float]
    field_width: float = 1.778
    contact_bearing: float | None = None  # bearing of the last fresh cane contact
    blocked: bool = False  # last step's motion was mostly absorbed by a body hit
    silent_s: float = 0.0  # consecutive time with an all-zero command
    scan_origin: float | None = None  # heading when the scan pause began
    turn_dir: float = 0.0  # committed depth-mode turn: +1 left, -1 right, 0 free
    turn_total: float = 0.0  # angle swept since the commit began
    clear_ticks: int = 0  # consecutive steps with the center column quiet
    cmd_fresh: bool = False  # a new command was published since the last step
    belt_target: float | None = None  # latched absolute bearing for the active column
    last_open: float | None = None  # most recent belt-signaled bearing (creep memory)
    dodge_hold_s: float = 0.0  # keep the post-dodge heading this much longer
    skirt_dir: float = 0.0  # boundary-follow side while creeping: +1 left, -1 right
    skirt_quiet_s: float = 0.0  # uncontested time spent skirting
    stall_anchor: tuple[float, float] | None = None  # where the stall watch began
    stall_s: float = 0.0  # time spent within stall_dist_m of the anchor

    def reset_leg(self) -> None:
        self.contact_bearing = None
        self.blocked = False
        self.silent_s = 0.0
        self.scan_origin = None
        self.turn_dir = 0.0
        self.turn_total = 0.0
        self.clear_ticks = 0
        self.cmd_fresh = False
        self.belt_target = None
        self.last_open = None
        self.dodge_hold_s = 0.0
        self.skirt_dir = 0.0
        self.skirt_quiet_s = 0.0
        self.stall_anchor = None
        self.stall_s = 0.0


def _wrap(a: float) -> float:
    return (a + math.pi) % (2 * math.pi) - math.pi


def _active_column(cmd: BeltCommand) -> int | None:
    for col in range(1, 6):
        if cmd.motor(col, "top") or cmd.motor(col, "bottom"):
            return col
    return None


def _turn_toward(heading: float, target: float, omega: float, dt: float) -> float:
    err = _wrap(target - heading)
    step = max(-omega * dt, min(omega * dt, err))
    return _wrap(heading + step)


def _enter_skirt(ctx: PolicyContext, agent: AgentState, route_bearing: float) -> None:
    """Pick a sideways skirting direction around whatever just blocked us.

    Prefer the side of the field with more room; when something is felt
    off-axis, skirt away from it instead. Direction is in route frame:
    +1 is the walker's left when heading out, its right coming back.
    """
    if ctx.skirt_dir != 0.0:
        ctx.skirt_quiet_s = 0.0
        return
    sign = 1.0 if route_bearing > 0 else -1.0
    if ctx.contact_bearing is not None:
        off = _wrap(ctx.contact_bearing - route_bearing)
        lateral = -1.0 if off >= 0 else 1.0
    else:
        lateral = 1.0 if agent.x > ctx.field_width / 2 else -1.0
    ctx.skirt_dir = sign * lateral
    ctx.skirt_quiet_s = 0.0
    ctx.stall_anchor = None
    ctx.stall_s = 0.0


def _skirt_wall_gap(ctx: PolicyContext, agent: AgentState, route_bearing: float) -> float:
    """Distance from the walker to the wall its skirt is drifting toward."""
    x_dir = -ctx.skirt_dir * (1.0 if route_bearing > 0 else -1.0)
    return ctx.field_width - agent.x if x_dir > 0 else agent.x


def _skirt_target(ctx: PolicyContext, route_bearing: float, off_route: float) -> float:
    return _wrap(route_bearing + ctx.skirt_dir * off_route)


def _skirt_flip(ctx: PolicyContext) -> None:
    ctx.skirt_dir = -ctx.skirt_dir
    ctx.skirt_quiet_s = 0.0
    ctx.stall_anchor = None
    ctx.stall_s = 0.0


def _skirt_stalled(ctx: PolicyContext, agent: AgentState, dt: float, params: SimParams) -> bool:
    """Watch for a skirt that has stopped making progress (a pocket where a
    row meets its anchor wall leaves no deterministic way forward). Going
    nowhere for a while means the chosen side is wrong."""
    if ctx.stall_anchor is None:
        ctx.stall_anchor = (agent.x, agent.y)
        ctx.stall_s = 0.0
        return False
    if math.hypot(agent.x - ctx.stall_anchor[0], agent.y - ctx.stall_anchor[1]) > params.stall_dist_m:
        ctx.stall_anchor = (agent.x, agent.y)
        ctx.stall_s = 0.0
        return False
    ctx.stall_s += dt
    return ctx.stall_s >= params.stall_flip_s


def policy_step(
    mode: str,
    cmd: BeltCommand,
    agent: AgentState,
    dt: float,
    rng: np.random.Generator,
    ctx: PolicyContext,
    params: SimParams,
) -> AgentState:
    """One reactive step of the behavioral walker model.

    open_path: follow the signaled column's bearing (column 3 = straight
    ahead, each column one camera sector wide; bottom-only signal = half
    speed). Silence stops the walker, which scans in place, then creeps
    along the route at half speed relying on the cane; a blocking row is
    skirted sideways until the belt speaks again or the way clears. The
    level shoulder camera cannot see the floor closer than about 1.4 m,
    so the last stretch before either end line is always silent; a walker
    that only ever stopped on silence could never finish a lap.
    depth: pressure-balance repulsion. A high-intensity center column (or
    a bodily blocked step) stops forward motion and commits to a turn
    toward the quieter side, held until the center clears; otherwise
    side-pressure imbalance veers the walker away while it advances.
    cane_only: walk the route; a fresh cane contact stops the walker and
    rotates it away by a randomized angle.
    """
    # the walker knows the task direction (out to the far line, back to the
    # start line), not the geometry: a route bearing, never a map
    route_bearing = math.pi / 2 if ctx.goal[1] >= agent.y else -math.pi / 2
    heading = agent.heading
    speed = 0.0

    if mode == "open_path":
        col = _active_column(cmd)
        if col is None:
            ctx.belt_target = None
            if ctx.scan_origin is None:
                ctx.scan_origin = heading
            ctx.silent_s += dt
        else:
            ctx.silent_s = 0.0
            ctx.scan_origin = None
            ctx.skirt_dir = 0.0
        if ctx.blocked:
            if ctx.skirt_dir != 0.0 and col is None:
                ctx.skirt_quiet_s = 0.0
                if _skirt_stalled(ctx, agent, dt, params):
                    _skirt_flip(ctx)
                if _skirt_wall_gap(ctx, agent, route_bearing) < params.wall_band_m:
                    if abs(_wrap(heading - route_bearing)) < 0.9:
                        # cornered while following this wall forward: the row is
                        # anchored here, so the passage is along the other wall
                        _skirt_flip(ctx)
                        off = math.pi / 2 - params.skirt_bias_rad
                    else:
                        # pressed sideways into the wall: pivot forward, no dodge
                        off = params.skirt_hug_rad
                    heading = _turn_toward(
                        heading, _skirt_target(ctx, route_bearing, off), params.omega_max, dt
                    )
                else:
                    # a noodle bulges into the traverse line: bounce off it
                    base = ctx.contact_bearing if ctx.contact_bearing is not None else heading
                    away = -1.0 if _wrap(base - heading) >= 0 else 1.0
                    heading = _wrap(heading + away * params.creep_turn_away_rad)
                    ctx.dodge_hold_s = params.dodge_hold_s
            else:
                # bodily stuck: sidestep away and commit to it for a moment
                base = ctx.contact_bearing if ctx.contact_bearing is not None else heading
                away = -1.0 if _wrap(base - heading) >= 0 else 1.0
                heading = _wrap(heading + away * params.creep_turn_away_rad)
                ctx.dodge_hold_s = params.dodge_hold_s
                ctx.belt_target = None
                if col is None:
                    _enter_skirt(ctx, agent, route_bearing)
        elif ctx.dodge_hold_s > 0:
            ctx.dodge_hold_s = max(0.0, ctx.dodge_hold_s - dt)
            speed = params.v_max / 2
        elif col is not None:
            # latch the column bearing once per publish: re-applying a
            # body-frame offset every step would ratchet the heading around
            if ctx.cmd_fresh or ctx.belt_target is None:
                if col == 3:
                    # hold the center column, resolving its width along the route
                    half = params.sector_rad / 2
                    err = max(-half, min(half, _wrap(route_bearing - heading)))
                    ctx.belt_target = _wrap(heading + err)
                else:
                    ctx.belt_target = _wrap(heading + (3 - col) * params.sector_rad)
                ctx.last_open = ctx.belt_target
            heading = _turn_toward(heading, ctx.belt_target, params.omega_max, dt)
            top_on = cmd.motor(col, "top") > 0
            speed = params.v_max if top_on else params.v_max / 2
        elif ctx.skirt_dir != 0.0:
            # trail the blocking row sideways toward the chosen wall, hug that
            # wall forward past the row, and drop the whole maneuver once
            # nothing has been in the way for a while
            if _skirt_stalled(ctx, agent, dt, params):
                _skirt_flip(ctx)
            if _skirt_wall_gap(ctx, agent, route_bearing) < params.wall_band_m:
                off = params.skirt_hug_rad
            else:
                off = math.pi / 2 - params.skirt_bias_rad
            target = _skirt_target(ctx, route_bearing, off)
            on_track = abs(_wrap(heading - target)) < 0.35
            if ctx.contact_bearing is not None:
                ctx.skirt_quiet_s = 0.0
            elif on_track:
                # the exit clock only runs while actually tracking the skirt
                # bearing; recovery turns should not count as open time
                ctx.skirt_quiet_s += dt
            if ctx.skirt_quiet_s >= params.skirt_exit_quiet_s:
                ctx.skirt_dir = 0.0
                heading = _turn_toward(heading, route_bearing, params.omega_max, dt)
            else:
                heading = _turn_toward(heading, target, params.omega_max, dt)
            speed = params.v_max / 2
        elif ctx.silent_s <= params.scan_pause_s:
            # stop and scan: wobble about the entry heading at the scan
            # rate, amplitude small enough that the cane clears the walls
            a = params.scan_wobble_rad
            phase = params.omega_scan / a * ctx.silent_s
            heading = _wrap(ctx.scan_origin + a * math.sin(phase))
        elif ctx.contact_bearing is not None:
            away = -1.0 if _wrap(ctx.contact_bearing - heading) >= 0 else 1.0
            heading = _wrap(heading + away * params.creep_turn_away_rad)
            ctx.dodge_hold_s = params.dodge_hold_s
            _enter_skirt(ctx, agent, route_bearing)
        else:
            # creep along the last signaled opening (or the route)
            target = ctx.last_open if ctx.last_open is not None else route_bearing
            heading = _turn_toward(heading, target, params.omega_max, dt)
            speed = params.v_max / 2
    elif mode == "depth":
        raw = [max(cmd.motor(c, "top"), cmd.motor(c, "bottom")) for c in range(1, 6)]
        # awareness-band signals (walls at the edge of range) should not
        # steer; only medium and close pressure counts toward balance
        p = [v if v >= 2 else 0 for v in raw]
        left = p[0] + p[1]
        right = p[3] + p[4]
        center = raw[2]
        if center >= 3 or ctx.blocked:
            if ctx.turn_dir == 0.0:
                if left != right:
                    ctx.turn_dir = 1.0 if left < right else -1.0
                else:
                    ctx.turn_dir = 1.0 if _wrap(route_bearing - heading) >= 0 else -1.0
                ctx.turn_total = 0.0
            ctx.clear_ticks = 0
            # scan rate, not full steering rate: the 300 ms sensing latency
            # makes a fast committed turn overshoot the opening
            heading = _wrap(heading + ctx.turn_dir * params.omega_scan * dt)
            ctx.turn_total += params.omega_scan * dt
            speed = 0.0
        elif ctx.turn_dir != 0.0:
            # keep the committed turn until the clear arc points somewhere
            # useful: walking out backward just re-enters the same pocket
            # from the other side (a full sweep releases anywhere, so a
            # genuinely cornered agent still escapes)
            heading = _wrap(heading + ctx.turn_dir * params.omega_scan * dt)
            ctx.turn_total += params.omega_scan * dt
            forwardish = abs(_wrap(heading - route_bearing)) <= 1.3
            swept_out = ctx.turn_total >= 2 * math.pi
            speed = params.v_max / 2 if (forwardish or swept_out) else 0.0
            ctx.clear_ticks += 1
            if ctx.clear_ticks >= 2 and (forwardish or swept_out):
                ctx.turn_dir = 0.0
                ctx.clear_ticks = 0
                ctx.dodge_hold_s = params.dodge_hold_s
        elif ctx.dodge_hold_s > 0:
            # walk the escape heading out instead of snapping back at the
            # same blockage
            ctx.dodge_hold_s = max(0.0, ctx.dodge_hold_s - dt)
            speed = params.v_max / 2
        elif left != right and center >= 1:
            turn = params.depth_turn_gain * float(right - left)
            turn = max(-params.omega_max, min(params.omega_max, turn))
            heading = _wrap(heading + turn * dt)
            speed = params.v_max / 2 if center >= 2 else params.v_max
        else:
            heading = _turn_toward(heading, route_bearing, params.omega_max, dt)
            speed = params.v_max / 2 if center >= 2 else params.v_max
    elif mode == "cane_only":
        if ctx.contact_bearing is not None:
            away = -1.0 if _wrap(ctx.contact_bearing - heading) >= 0 else 1.0
            heading = _wrap(heading + away * float(rng.uniform(0.5, 1.1)))
            speed = 0.0
        else:
            heading = _turn_toward(heading, route_bearing, params.omega_max, dt)
            speed = params.v_max
    else:
        raise ValueError(f"unknown mode {mode!r}")

    ctx.cmd_fresh = False
    nx = agent.x + speed * dt * math.cos(heading)
    ny = agent.y + speed * dt * math.sin(heading)
    return replace(agent, x=nx, y=ny, heading=heading, speed=speed)


def clip_motion(scene: Scene, agent: AgentState) -> AgentState:
    """Push the body out of walls and obstacles; never pass through."""
    x, y = agent.x, agent.y
    r = agent.body_radius
    for _ in range(4):
        x = min(max(x, r), scene.field_width - r)
        y = min(max(y, 0.0), scene.field_length)
        moved = False
        for ob in scene.obstacles:
            dx = x - ob.cx
            dy = y - ob.cy
            d = math.hypot(dx, dy)
            min_d = ob.radius + r
            if d < min_d:
                if d < 1e-9:
                    dx, dy, d = 1.0, 0.0, 1.0
                x = ob.cx + dx / d * min_d
                y = ob.cy + dy / d * min_d
                moved = True
        if not moved:
            break
    x = min(max(x, r), scene.field_width - r)
    y = min(max(y, 0.0), scene.field_length)
    if agent.x == x and agent.y == y:
        return agent
    return replace(agent, x=x, y=y)


# --- cane -------------------------------------------------------------------


def _segment_hits_circle(px: float, py: float, tx: float, ty: float, cx: float, cy: float, r: float) -> bool:
    vx, vy = tx - px, ty - py
    wx, wy = cx - px, cy - py
    vv = vx * vx + vy * vy
    t = 0.0 if vv == 0 else max(0.0, min(1.0, (wx * vx + wy * vy) / vv))
    qx, qy = px + t * vx, py + t * vy
    return math.hypot(cx - qx, cy - qy) <= r


def cane_hits(scene: Scene, agent: AgentState, cane: CaneModel, t_s: float) -> list[str]:
    """Obstacle/divider ids the cane segment touches at sweep time t_s."""
    ang = cane.angle_at(agent.heading, t_s)
    tx = agent.x + cane.reach * math.cos(ang)
    ty = agent.y + cane.reach * math.sin(ang)
    hits: list[str] = []
    for k, ob in enumerate(scene.obstacles):
        if _segment_hits_circle(agent.x, agent.y, tx, ty, ob.cx, ob.cy, ob.radius):
            hits.append(f"ob{k}")
    if min(agent.x, tx) <= 0.0 and 0.0 <= ty <= scene.field_length:
        hits.append("wall-left")
    if max(agent.x, tx) >= scene.field_width and 0.0 <= ty <= scene.field_length:
        hits.append("wall-right")
    return hits


class CaneSweep:
    """Stateful sweep sampler; one debounced contact per id per half-cycle."""

    SUBSTEP_MS = 25

    def __init__(self, scene: Scene, cane: CaneModel) -> None:
        self.scene = scene
        self.cane = cane
        self._seen: set[tuple[str, int]] = set()

    def sweep(self, agent: AgentState, t0_ms: int, t1_ms: int) -> list[tuple[int, str, float]]:
        """Contacts over [t0, t1): (t_ms, id, bearing of the cane at contact)."""
        out: list[tuple[int, str, float]] = []
        half_ms = self.cane.period_s * 1000 / 2
        t = t0_ms
        while t < t1_ms:
            t_s = t / 1000.0
            half = int(t // half_ms)
            for hid in cane_hits(self.scene, agent, self.cane, t_s):
                key = (hid, half)
                if key not in self._seen:
                    self._seen.add(key)
                    out.append((t, hid, self.cane.angle_at(agent.heading, t_s)))
            t += self.SUBSTEP_MS
        return out


# --- trial ------------------------------------------------------------------


class ModePipeline:
    """Per-trial perception-to-command stage for one mode."""

    def __init__(self, mode: str, params: SimParams):
        from .pipeline import make_mode_stage

        self.mode = mode
        self._stage = None if mode == "cane_only" else make_mode_stage(mode)
        self.params = params

    def command(self, scene: Scene, agent: AgentState) -> BeltCommand:
        if self._stage is None:
            return BeltCommand.all_off()
        cam = CameraModel(
            agent.x,
            agent.y,
            agent.heading,
            width=self.params.render_w,
            height_px=self.params.render_h,
        )
        mask, depth = render_views(scene, cam)
        return self._stage(mask, depth)


def run_trial(
    scene: Scene,
    mode: str,
    seed: int,
    params: SimParams | None = None,
) -> TrialRecord:
    """Deterministic out-and-back trial at the 150 ms tick / 300 ms publish
    cadence; same (scene, mode, seed) reproduces the record byte-for-byte."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    params = params or SimParams()
    rng = np.random.Generator(np.random.PCG64(seed))
    record = TrialRecord(mode, scene.name, seed, params)
    pipeline = ModePipeline(mode, params)
    sweeper = CaneSweep(scene, params.cane)

    # every mode draws the same start jitter so a seed names one episode,
    # not one mode's random stream
    jx = float(rng.uniform(-params.start_jitter_xy, params.start_jitter_xy))
    jh = float(rng.uniform(-params.start_jitter_rad, params.start_jitter_rad))
    sx = min(max(scene.start[0] + jx, params.body_radius), scene.field_width - params.body_radius)
    agent = AgentState(sx, scene.start[1], math.pi / 2 + jh, 0.0, params.body_radius)
    ctx = PolicyContext(goal=scene.goal, field_width=scene.field_width)
    outbound = True
    published = BeltCommand.all_off()
    timeout_ms = int(params.timeout_s * 1000)
    dt = params.tick_ms / 1000.0

    t = 0
    while t <= timeout_ms:
        if t % params.publish_ms == 0:
            # only publish ticks can change what the policy reads, so the
            # in-between renders would be pure waste
            published = pipeline.command(scene, agent)
            ctx.cmd_fresh = True
        record.samples.append(Sample(t, agent, published))

        intended = policy_step(mode, published, agent, dt, rng, ctx, params)
        moved = clip_motion(scene, intended)
        d_int = math.hypot(intended.x - agent.x, intended.y - agent.y)
        d_act = math.hypot(moved.x - agent.x, moved.y - agent.y)
        ctx.blocked = d_int > 1e-9 and d_act < 0.5 * d_int
        ctx.contact_bearing = None
        for ct, hid, bearing in sweeper.sweep(moved, t, t + params.tick_ms):
            record.contacts.append((ct, hid))
            ctx.contact_bearing = bearing
        agent = moved

        if outbound and agent.y >= scene.goal[1]:
            outbound = False
            # about-face at the goal line, then head home
            agent = replace(agent, heading=_wrap(agent.heading + math.pi))
            ctx.goal = scene.start
            ctx.reset_leg()
        elif not outbound and agent.y <= scene.start[1]:
            t += params.tick_ms
            record.samples.append(Sample(t, agent, published))
            record.completed = True
            break
        t += params.tick_ms
    else:
        record.samples.append(Sample(t, agent, published))
    return record


def compute_metrics(record: TrialRecord, scene: Scene) -> TrialMetrics:
    """The four trial metrics. Incomplete trials score the timeout as their
    completion time and are flagged."""
    if not record.samples:
        raise ValueError("empty record")
    params = record.params
    first_motion_ms = None
    for s in record.samples:
        if s.agent.speed > 0:
            first_motion_ms = s.t_ms
            break
    end_ms = record.samples[-1].t_ms
    if not record.completed:
        completion_s = params.timeout_s
    elif first_motion_ms is None:
        completion_s = params.timeout_s
    else:
        completion_s = (end_ms - first_motion_ms) / 1000.0

    hesitation_ms = 0
    if first_motion_ms is not None:
        run_ms = 0
        for s in record.samples[1:]:
            if s.t_ms <= first_motion_ms:
                continue
            if s.agent.speed < params.hesitation_speed:
                run_ms += params.tick_ms
            else:
                if run_ms >= params.hesitation_min_s * 1000:
                    hesitation_ms += run_ms
                run_ms = 0
        if run_ms >= params.hesitation_min_s * 1000:
            hesitation_ms += run_ms
    denom_ms = max(completion_s * 1000.0, 1.0)
    hesitation_pct = min(1.0, hesitation_ms / denom_ms)

    if scene.obstacles:
        mins = []
        for k, ob in enumerate(scene.obstacles):
            dmin = min(math.hypot(s.agent.x - ob.cx, s.agent.y - ob.cy) for s in record.samples)
            mins.append(max(0.0, dmin - ob.radius))
        safety = sum(mins) / len(mins)
    else:
        safety = 0.0

    return TrialMetrics(
        completion_time=completion_s,
        hesitation_pct=hesitation_pct,
        cane_contacts=len(record.contacts),
        safety_window=safety,
        completed=record.completed,
    )


def metrics_csv_row(layout: str, mode: str, seed: int, m: TrialMetrics) -> str:
    return (
        f"{layout},{mode},{seed},{m.completion_time:.3f},{m.hesitation_pct:.4f},"
        f"{m.cane_contacts},{m.safety_window:.4f},{int(m.completed)}"
    )


CSV_HEADER = "layout,mode,seed,completion_time,hesitation_pct,cane_contacts,safety_window,completed"
