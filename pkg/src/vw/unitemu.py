"""Firmware-faithful emulation of one modular belt unit: subscription,
payload slicing, and the vibration duty-cycle state machine for its two
motors.

An episode is atomic: 100 ms vibrating then 200 ms refractory. Messages
landing mid-episode are dropped for that motor; a message at exactly the
300 ms boundary lands in the fresh idle phase and is honored.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .beltnet import ClientId, decode_command, unit_slice
from .errors import MalformedPayload

FREQUENCY_HZ = {0: 0, 1: 80, 2: 150, 3: 250}
VIBRATE_MS = 100
REFRACTORY_MS = 200
EPISODE_MS = VIBRATE_MS + REFRACTORY_MS

MOTORS = ("top", "bottom")


@dataclass(frozen=True)
class MotorState:
    phase: str  # idle | vibrating | refractory
    intensity: int
    frequency: int
    phase_start: int


@dataclass(frozen=True)
class UnitState:
    id: ClientId
    top: MotorState
    bottom: MotorState
    battery_ok: bool
    link_ok: bool

    def motor(self, name: str) -> MotorState:
        if name not in MOTORS:
            raise KeyError(name)
        return self.top if name == "top" else self.bottom


@dataclass
class _Episode:
    start: int
    intensity: int


@dataclass
class UnitEmulator:
    """Mutable actor owning one unit's motor schedules.

    State is exposed only as immutable UnitState snapshots; the two motors
    evolve independently.
    """

    client: ClientId
    battery_ok: bool = True
    link_ok: bool = False
    malformed_count: int = 0
    episodes: dict[str, _Episode | None] = field(
        default_factory=lambda: {"top": None, "bottom": None}
    )
    episode_log: list[tuple[int, str, int]] = field(default_factory=list)

    def on_message(self, payload: bytes, now: int) -> UnitState:
        """Decode and slice; start an episode on any idle motor commanded
        nonzero. Malformed payloads are dropped (counter only)."""
        try:
            cmd = decode_command(payload)
        except MalformedPayload:
            self.malformed_count += 1
            return self.state_at(now)
        self.link_ok = True
        top, bottom = unit_slice(cmd, self.client)
        for motor, intensity in (("top", top), ("bottom", bottom)):
            if intensity == 0:
                continue  # zeros never cancel an in-flight episode
            ep = self.episodes[motor]
            if ep is None or now >= ep.start + EPISODE_MS:
                self.episodes[motor] = _Episode(now, intensity)
                self.episode_log.append((now, motor, intensity))
        return self.state_at(now)

    def motor_state_at(self, motor: str, t: int) -> MotorState:
        """Pure read of the piecewise-constant schedule."""
        if motor not in MOTORS:
            raise KeyError(motor)
        ep = self.episodes[motor]
        if ep is None:
            return MotorState("idle", 0, 0, 0)
        if t < ep.start:
            raise ValueError("t precedes the last event")
        if t < ep.start + VIBRATE_MS:
            return MotorState("vibrating", ep.intensity, FREQUENCY_HZ[ep.intensity], ep.start)
        if t < ep.start + EPISODE_MS:
            return MotorState("refractory", ep.intensity, 0, ep.start + VIBRATE_MS)
        return MotorState("idle", 0, 0, ep.start + EPISODE_MS)

    def state_at(self, t: int) -> UnitState:
        return UnitState(
            self.client,
            self.motor_state_at("top", t),
            self.motor_state_at("bottom", t),
            self.battery_ok,
            self.link_ok,
        )

    def attach(self, transport, topic: str, clock) -> None:
        """Subscribe on a transport offering subscribe(topic, handler)."""

        def handler(_topic: str, payload: bytes) -> None:
            self.on_message(payload, clock.now_ms())

        transport.subscribe(topic, handler)
        self.link_ok = True
