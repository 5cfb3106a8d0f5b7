"""Cockpit bridge: a human-steerable session behind a WebSocket endpoint.

Each tick renders the steered walker's view, runs the active mode stage,
publishes on the belt cadence, and broadcasts a Snapshot as one JSON line.
Inbound Control messages steer the walker, switch modes, load layouts, or
reset the trial; the scoring pipeline runs unchanged, so the viewer sees
exactly the commands a belt wearer would feel.
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass, replace

from .beltnet import InMemoryBus, encode_command
from .depthmode import bin_fractions, cell_intensity, depth_cell_rect
from .grid import BeltCommand
from .openpath import OpenPathConfig
from .pipeline import DepthStage, OpenPathStage, make_mode_stage
from .scene import CameraModel, Scene, build_course, render_views
from .sim import AgentState, SimParams, clip_motion, _wrap
from .wsserver import WsConnection, WsServer

TURN_STEP_RAD = 0.35


@dataclass
class SteerState:
    forward: bool = False
    speed: float = 0.8


class CockpitServer:
    """Owns the walker, the mode stage, and the broadcast loop."""

    def __init__(
        self,
        layout: str = "easy-a",
        mode: str = "open_path",
        host: str = "127.0.0.1",
        port: int = 8080,
        render_w: int = 320,
        render_h: int = 180,
        tick_ms: int = 150,
        publish_ms: int = 300,
    ) -> None:
        self.scene: Scene = build_course(layout)
        self.mode = mode
        self.stage = make_mode_stage(mode)
        self.params = SimParams(render_w=render_w, render_h=render_h)
        self.steer = SteerState()
        self.tick_ms = tick_ms
        self.publish_ms = publish_ms
        self.bus = InMemoryBus()
        self.ws = WsServer(host, port, on_message=self._on_control)
        self.tick_idx = 0
        self.t_ms = 0
        self.outbound = True
        self.done = False
        self._latest = BeltCommand.all_off()
        self._published = BeltCommand.all_off()
        self._lock = threading.Lock()
        self._stop = threading.Event()
        self.agent = self._start_agent()

    def _start_agent(self) -> AgentState:
        sx, sy = self.scene.start
        gx, gy = self.scene.goal
        return AgentState(sx, sy, math.atan2(gy - sy, gx - sx), 0.0, self.params.body_radius)

    # -- control channel ------------------------------------------------------
    def _on_control(self, conn: WsConnection, text: str) -> None:
        for line in text.splitlines():
            line = line.strip()
            if not line:
                continue
            try:
                msg = json.loads(line)
            except json.JSONDecodeError:
                continue
            self.apply_control(msg)

    def apply_control(self, msg: dict) -> None:
        with self._lock:
            if "steer" in msg:
                steer = msg["steer"]
                if steer == "forward":
                    self.steer.forward = True
                elif steer == "stop":
                    self.steer.forward = False
                elif steer == "turn_left":
                    self.agent = replace(self.agent, heading=_wrap(self.agent.heading + TURN_STEP_RAD))
                elif steer == "turn_right":
                    self.agent = replace(self.agent, heading=_wrap(self.agent.heading - TURN_STEP_RAD))
            elif "set_mode" in msg:
                mode = msg["set_mode"]
                if mode in ("open_path", "depth") and mode != self.mode:
                    self.mode = mode
                    self.stage = make_mode_stage(mode)
            elif "load_layout" in msg:
                try:
                    self.scene = build_course(msg["load_layout"])
                except Exception:
                    return
                self._reset_locked()
            elif "reset" in msg:
                self._reset_locked()
            elif "set_speed" in msg:
                try:
                    v = float(msg["set_speed"])
                except (TypeError, ValueError):
                    return
                self.steer.speed = min(max(v, 0.0), self.params.v_max)

    def _reset_locked(self) -> None:
        self.agent = self._start_agent()
        self.tick_idx = 0
        self.t_ms = 0
        self.outbound = True
        self.done = False
        self.steer.forward = False
        if isinstance(self.stage, OpenPathStage):
            self.stage.smoother.reset()

    # -- tick loop --------------------------------------------------------------
    def step(self) -> dict:
        """One tick: render, score, publish on cadence, move, broadcast."""
        with self._lock:
            agent = self.agent
            cam = CameraModel(
                agent.x, agent.y, agent.heading,
                width=self.params.render_w, height_px=self.params.render_h,
            )
            mask, depth = render_views(self.scene, cam)
            cmd = self.stage(mask, depth)
            self._latest = cmd
            if self.t_ms % self.publish_ms == 0:
                self._published = cmd
                self.bus.publish("vw/belt/command", encode_command(cmd))

            if self.steer.forward and not self.done:
                dt = self.tick_ms / 1000.0
                nx = agent.x + self.steer.speed * dt * math.cos(agent.heading)
                ny = agent.y + self.steer.speed * dt * math.sin(agent.heading)
                agent = clip_motion(self.scene, replace(agent, x=nx, y=ny, speed=self.steer.speed))
            else:
                agent = replace(agent, speed=0.0)
            if self.outbound and agent.y >= self.scene.goal[1]:
                self.outbound = False
            elif not self.outbound and agent.y <= self.scene.start[1]:
                self.done = True
            self.agent = agent

            snap = self._snapshot_locked(mask, depth)
            self.tick_idx += 1
            self.t_ms += self.tick_ms
        self.ws.broadcast(json.dumps(snap) + "\n")
        return snap

    def _snapshot_locked(self, mask, depth) -> dict:
        grid: dict = {}
        if isinstance(self.stage, OpenPathStage) and self.stage.last_scores is not None:
            sc = self.stage.last_scores
            grid = {
                "kind": "open_path",
                "raw": [[round(v, 4) for v in row] for row in sc.raw.tolist()],
                "adjusted": [[round(v, 4) for v in row] for row in sc.adjusted.tolist()],
                "selected_col": sc.selected_col,
                "top_high": sc.top_high,
            }
        elif isinstance(self.stage, DepthStage):
            cells = []
            for row in ("top", "bottom"):
                row_cells = []
                for col in range(1, 6):
                    fc, fm, ff = bin_fractions(depth, depth_cell_rect(depth, col, row))
                    row_cells.append(
                        {
                            "f_close": round(fc, 4),
                            "f_medium": round(fm, 4),
                            "f_far": round(ff, 4),
                            "intensity": cell_intensity(fc, fm, ff),
                        }
                    )
                cells.append(row_cells)
            grid = {"kind": "depth", "cells": cells}
        status = "done" if self.done else ("inbound" if not self.outbound else "outbound")
        return {
            "tick": self.tick_idx,
            "t": self.t_ms,
            "mode": self.mode,
            "agent": {
                "x": round(self.agent.x, 4),
                "y": round(self.agent.y, 4),
                "heading": round(self.agent.heading, 4),
            },
            "obstacles": [
                {"x": round(o.cx, 4), "y": round(o.cy, 4), "r": o.radius} for o in self.scene.obstacles
            ],
            "field": {"width": self.scene.field_width, "length": self.scene.field_length},
            "start": list(self.scene.start),
            "goal": list(self.scene.goal),
            "layout": self.scene.name,
            "belt": list(self._published.intensities),
            "grid": grid,
            "status": status,
        }

    # -- lifecycle ----------------------------------------------------------------
    def serve_forever(self) -> None:
        import time

        self.ws.start()
        period = self.tick_ms / 1000.0
        next_t = time.monotonic()
        while not self._stop.is_set():
            self.step()
            next_t += period
            delay = next_t - time.monotonic()
            if delay > 0:
                time.sleep(delay)
            else:
                next_t = time.monotonic()

    def stop(self) -> None:
        self._stop.set()
        self.ws.stop()
