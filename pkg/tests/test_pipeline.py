"""Session loop: cadences, fail-silent perception, mode switching."""

import time

import numpy as np
import pytest

from vw.beltnet import InMemoryBus, decode_command
from vw.clock import EmulatedClock, RealClock
from vw.errors import ConfigError
from vw.grid import BeltCommand, DepthMap, FloorMask
from vw.pgm import save_depth_map, save_floor_mask
from vw.pipeline import (
    FixtureBackend,
    Session,
    SessionConfig,
    SyntheticBackend,
    run_session,
    tight_mask_bbox,
)
from vw.scene import Scene

CENTER = BeltCommand.of([0, 0, 0, 0, 3, 3, 0, 0, 0, 0])
ALL_HIGH = BeltCommand.of([3] * 10)


class StaticBackend:
    """Fixed frame pair, with optional per-call failure injection."""

    def __init__(self, mask=None, depth=None, fail=False, delay_s=0.0):
        h, w = 90, 160
        bits = np.ones((h, w), dtype=bool) if mask is None else mask
        clos = np.full(bits.shape, 0.9) if depth is None else depth
        self.mask = FloorMask(bits)
        self.depth = DepthMap(clos)
        self.fail = fail
        self.delay_s = delay_s
        self.calls = 0

    def frame(self):
        self.calls += 1
        if self.delay_s:
            time.sleep(self.delay_s)
        if self.fail:
            raise RuntimeError("sensor gone")
        return self.mask, self.depth


def make_session(mode="open_path", backend=None, **cfg_kw):
    cfg = SessionConfig(mode=mode, **cfg_kw)
    return Session(cfg, backend or StaticBackend())


# --- config ------------------------------------------------------------------


def test_config_validation():
    with pytest.raises(ConfigError):
        SessionConfig(mode="cane_only")
    with pytest.raises(ConfigError):
        SessionConfig(tick_budget_ms=500, publish_period_ms=300)
    with pytest.raises(ConfigError):
        SessionConfig(tick_budget_ms=0)


def test_tight_mask_bbox():
    bits = np.zeros((10, 20), dtype=bool)
    assert tight_mask_bbox(FloorMask(bits)) is None
    bits[2:5, 3:9] = True
    box = tight_mask_bbox(FloorMask(bits))
    assert (box.x1, box.y1, box.x2, box.y2) == (3, 2, 9, 5)
    assert box.confidence == pytest.approx(18 / 200)


# --- cadences ----------------------------------------------------------------


def test_900ms_session_cadence():
    log = run_session(make_session(), 900)
    assert [e.t_ms for e in log.ticks] == [0, 150, 300, 450, 600, 750]
    assert [e.t_ms for e in log.publishes] == [0, 300, 600, 900]


def test_zero_duration_still_ticks_once():
    log = run_session(make_session(), 0)
    assert [e.t_ms for e in log.ticks] == [0]
    assert [e.t_ms for e in log.publishes] == [0]


def test_shared_instant_publishes_fresh_command():
    # tick and publish at t=0: the publish must carry that tick's output
    log = run_session(make_session(), 300)
    first_pub = log.publishes[0]
    assert first_pub.cmd == log.ticks[0].cmd
    assert first_pub.cmd != BeltCommand.all_off()


def test_three_second_session_counts():
    log = run_session(make_session(), 3000)
    assert len(log.ticks) == 20
    assert len(log.publishes) == 11
    assert all(e.t_ms % 150 == 0 for e in log.ticks)
    assert all(e.t_ms % 300 == 0 for e in log.publishes)


def test_publishes_hit_the_wire():
    bus = InMemoryBus()
    cfg = SessionConfig()
    session = Session(cfg, StaticBackend(), transport=bus)
    run_session(session, 900)
    assert len(bus.history) == 4
    topics = {t for t, _ in bus.history}
    assert topics == {"vw/belt/command"}
    assert decode_command(bus.history[-1][1]) == CENTER


# --- stages through the session ------------------------------------------------


def test_all_floor_open_path_session():
    log = run_session(make_session(), 600)
    assert all(e.cmd == CENTER for e in log.publishes)


def test_all_close_depth_session():
    log = run_session(make_session(mode="depth"), 600)
    assert all(e.cmd == ALL_HIGH for e in log.publishes)


def test_synthetic_empty_scene_open_path():
    backend = SyntheticBackend(Scene(), width=640, height=360)
    session = Session(SessionConfig(), backend)
    cmd, diag = session.tick(0)
    assert diag.error is None
    assert cmd == CENTER


def test_fixture_backend_depth(tmp_path):
    depth_path = tmp_path / "close.pgm"
    save_depth_map(depth_path, DepthMap(np.full((36, 64), 0.9)))
    backend = FixtureBackend([], [str(depth_path)])
    session = Session(SessionConfig(mode="depth", perception="fixture"), backend)
    cmd, _ = session.tick(0)
    assert cmd == ALL_HIGH


def test_fixture_backend_cycles(tmp_path):
    m0 = np.zeros((8, 16), dtype=bool)
    m1 = np.ones((8, 16), dtype=bool)
    p0, p1 = tmp_path / "a.pgm", tmp_path / "b.pgm"
    save_floor_mask(p0, FloorMask(m0))
    save_floor_mask(p1, FloorMask(m1))
    backend = FixtureBackend([str(p0), str(p1)], [])
    first, _ = backend.frame()
    second, _ = backend.frame()
    third, _ = backend.frame()
    assert not first.bits.any()
    assert second.bits.all()
    assert not third.bits.any()  # wraps around
    with pytest.raises(ConfigError):
        FixtureBackend([], [])


def test_mode_switch_changes_published_command():
    backend = StaticBackend()
    session = make_session(backend=backend)
    session.tick(0)
    assert session.publish(0) == CENTER
    session.set_mode("depth")
    session.tick(150)
    assert session.publish(300) == ALL_HIGH


# --- failure and budget --------------------------------------------------------


def test_backend_failure_fails_silent():
    session = make_session(backend=StaticBackend(fail=True))
    cmd, diag = session.tick(0)
    assert cmd == BeltCommand.all_off()
    assert "RuntimeError" in diag.error
    log = run_session(make_session(backend=StaticBackend(fail=True)), 300)
    assert all(e.cmd == BeltCommand.all_off() for e in log.publishes)
    assert all(e.diag.error for e in log.ticks)


def test_emulated_clock_never_flags_overrun():
    log = run_session(make_session(backend=StaticBackend(delay_s=0.002)), 600)
    assert all(not e.diag.overrun for e in log.ticks)
    assert all(e.diag.elapsed_ms >= 0 for e in log.ticks)


def test_real_clock_flags_overrun():
    cfg = SessionConfig(tick_budget_ms=5, clock="real")
    session = Session(cfg, StaticBackend(delay_s=0.02), clock=RealClock())
    _, diag = session.tick(0)
    assert diag.overrun
    assert diag.elapsed_ms > 5


def test_emulated_clock_tracks_session_time():
    clock = EmulatedClock()
    session = Session(SessionConfig(), StaticBackend(), clock=clock)
    run_session(session, 900)
    assert clock.now_ms() >= 900
