"""Belt wire protocol: payload codec, client-ID slot mapping, and the paced
latest-value publisher.

All five units share one topic; each slices the ten-integer payload by its
position. The publisher samples a latest-command provider every period and
never blocks the producer: commands overwritten between ticks are simply
never sent.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass, field
from typing import Callable, Protocol, runtime_checkable

from .clock import Clock
from .errors import MalformedPayload, UnknownClient
from .grid import BeltCommand

DEFAULT_TOPIC = "vw/belt/command"
PUBLISH_PERIOD_MS = 300

_CLIENT_RE = re.compile(r"^client([1-5])$")
_DIGITS = frozenset("0123")


@dataclass(frozen=True)
class ClientId:
    name: str

    def __post_init__(self) -> None:
        if not _CLIENT_RE.match(self.name):
            raise UnknownClient(f"unknown client id {self.name!r}")

    @property
    def position(self) -> int:
        """1..5, leftmost unit is client1."""
        return int(self.name[-1])


ALL_CLIENTS = tuple(ClientId(f"client{i}") for i in range(1, 6))


@dataclass(frozen=True)
class PublisherConfig:
    topic: str = DEFAULT_TOPIC
    period_ms: int = PUBLISH_PERIOD_MS
    broker: str = "127.0.0.1:1883"

    def __post_init__(self) -> None:
        if self.period_ms <= 0:
            raise ValueError("period must be positive")


def encode_command(cmd: BeltCommand) -> bytes:
    """Ten digits, single commas, no whitespace, no trailing newline."""
    return ",".join(str(v) for v in cmd.intensities).encode("ascii")


def decode_command(payload: bytes) -> BeltCommand:
    """Exact inverse of encode_command; anything else is MalformedPayload."""
    try:
        text = payload.decode("ascii")
    except UnicodeDecodeError as exc:
        raise MalformedPayload("payload is not ASCII") from exc
    parts = text.split(",")
    if len(parts) != 10:
        raise MalformedPayload(f"expected 10 fields, got {len(parts)}")
    if not all(p in _DIGITS for p in parts):
        raise MalformedPayload(f"fields must be single digits 0..3: {text!r}")
    return BeltCommand.of(int(p) for p in parts)


def unit_slice(cmd: BeltCommand, client: ClientId) -> tuple[int, int]:
    """(top, bottom) intensities for one unit: indices 2(pos-1), 2(pos-1)+1."""
    base = 2 * (client.position - 1)
    return cmd.intensities[base], cmd.intensities[base + 1]


@runtime_checkable
class Transport(Protocol):
    def publish(self, topic: str, payload: bytes) -> None: ...


class CommandSlot:
    """Single-writer latest-value slot between pipeline and publisher."""

    def __init__(self) -> None:
        self._cmd: BeltCommand | None = None
        self._lock = threading.Lock()

    def store(self, cmd: BeltCommand) -> None:
        with self._lock:
            self._cmd = cmd

    def load(self) -> BeltCommand | None:
        with self._lock:
            return self._cmd


class InMemoryBus:
    """Synchronous topic bus for tests; records every publish."""

    def __init__(self) -> None:
        self._subs: dict[str, list[Callable[[str, bytes], None]]] = {}
        self.history: list[tuple[str, bytes]] = []
        self._lock = threading.Lock()

    def subscribe(self, topic: str, handler: Callable[[str, bytes], None]) -> None:
        with self._lock:
            self._subs.setdefault(topic, []).append(handler)

    def publish(self, topic: str, payload: bytes) -> None:
        with self._lock:
            handlers = list(self._subs.get(topic, ()))
            self.history.append((topic, payload))
        for h in handlers:
            h(topic, payload)


@dataclass
class PublisherStatus:
    connected: bool = True
    published: int = 0
    dropped: int = 0
    log: list[tuple[int, BeltCommand]] = field(default_factory=list)


def run_publisher(
    source: Callable[[], BeltCommand | None],
    transport: Transport,
    cfg: PublisherConfig,
    clock: Clock,
    until_ms: int,
    stop: threading.Event | None = None,
) -> PublisherStatus:
    """Publish the provider's most recent command at t = 0, period, 2*period,
    ... <= until_ms. A provider that has produced nothing yet publishes
    all-zero. Publish failures mark the status disconnected and retry with
    doubling backoff; pacing never stalls."""
    status = PublisherStatus()
    backoff = cfg.period_ms
    next_attempt = 0
    t = 0
    while t <= until_ms:
        if stop is not None and stop.is_set():
            break
        clock.sleep_until(t)
        cmd = source()
        if cmd is None:
            cmd = BeltCommand.all_off()
        now = clock.now_ms()
        if status.connected or now >= next_attempt:
            try:
                if not status.connected:
                    reconnect = getattr(transport, "reconnect", None)
                    if reconnect is not None:
                        reconnect()
                transport.publish(cfg.topic, encode_command(cmd))
            except Exception:
                status.connected = False
                status.dropped += 1
                next_attempt = now + backoff
                backoff = min(backoff * 2, 8 * cfg.period_ms)
            else:
                if not status.connected:
                    status.connected = True
                    backoff = cfg.period_ms
                status.published += 1
                status.log.append((t, cmd))
        else:
            status.dropped += 1
        t += cfg.period_ms
    return status
