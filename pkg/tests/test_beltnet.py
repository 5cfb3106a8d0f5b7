import numpy as np
import pytest
from hypothesis import given, strategies as st

from vw.beltnet import (
    ALL_CLIENTS,
    ClientId,
    InMemoryBus,
    PublisherConfig,
    decode_command,
    encode_command,
    run_publisher,
    unit_slice,
)
from vw.clock import EmulatedClock
from vw.errors import MalformedPayload, UnknownClient
from vw.grid import BeltCommand


def test_encode_format():
    assert encode_command(BeltCommand.of([3, 3] + [0] * 8)) == b"3,3,0,0,0,0,0,0,0,0"
    assert encode_command(BeltCommand.all_off()) == b"0,0,0,0,0,0,0,0,0,0"


@pytest.mark.parametrize(
    "payload",
    [
        b"1,2,3,0,0,0,0,0,0,4",  # out of range
        b"1,2,3,0,0,0,0,0,0",  # nine values
        b"1,2,3,0,0,0,0,0,0,0,0",  # eleven values
        b"1, 2,3,0,0,0,0,0,0,0",  # whitespace
        b"1,2,x,0,0,0,0,0,0,0",  # non-digit
        b"1,2,3,0,0,0,0,0,0,0\n",  # trailing newline
        b"",
        b"-1,2,3,0,0,0,0,0,0,0",
        b"10,2,3,0,0,0,0,0,0,0",  # multi-digit
    ],
)
def test_decode_rejects(payload):
    with pytest.raises(MalformedPayload):
        decode_command(payload)


@given(st.lists(st.integers(0, 3), min_size=10, max_size=10))
def test_round_trip(vals):
    cmd = BeltCommand.of(vals)
    assert decode_command(encode_command(cmd)) == cmd


def test_unit_slice_mapping():
    cmd = BeltCommand.of([3, 1, 0, 0, 0, 0, 0, 0, 0, 0])
    assert unit_slice(cmd, ClientId("client1")) == (3, 1)
    cmd = BeltCommand.of([0, 0, 0, 0, 0, 0, 0, 0, 2, 3])
    assert unit_slice(cmd, ClientId("client5")) == (2, 3)


def test_unknown_client():
    with pytest.raises(UnknownClient):
        ClientId("client6")
    with pytest.raises(UnknownClient):
        ClientId("unit1")


@given(st.lists(st.integers(0, 3), min_size=10, max_size=10))
def test_slices_reconstruct_command(vals):
    cmd = BeltCommand.of(vals)
    flat = []
    for client in ALL_CLIENTS:
        top, bottom = unit_slice(cmd, client)
        flat += [top, bottom]
    assert flat == list(vals)


def test_publisher_cadence_and_count():
    bus = InMemoryBus()
    clock = EmulatedClock()
    status = run_publisher(lambda: None, bus, PublisherConfig(), clock, until_ms=1000)
    # 1 s window: publishes at 0/300/600/900 exactly
    assert status.published == 4
    assert [t for t, _ in status.log] == [0, 300, 600, 900]
    assert all(payload == b"0,0,0,0,0,0,0,0,0,0" for _, payload in bus.history)


def test_publisher_latest_value_semantics():
    bus = InMemoryBus()
    clock = EmulatedClock()
    a = BeltCommand.of([1] + [0] * 9)
    b = BeltCommand.of([2] + [0] * 9)
    c = BeltCommand.of([3] + [0] * 9)

    def source():
        t = clock.now_ms()
        if t < 310:
            return a
        if t < 450:
            return b  # updated at 310: carried by the 600 ms publish
        return c  # second update between ticks: b is never published

    status = run_publisher(source, bus, PublisherConfig(), clock, until_ms=600)
    assert [cmd for _, cmd in status.log] == [a, a, c]


def test_publisher_retries_after_failure():
    clock = EmulatedClock()

    class FlakyBus:
        def __init__(self):
            self.calls = 0
            self.sent = []

        def publish(self, topic, payload):
            self.calls += 1
            if self.calls == 2:
                raise ConnectionError("broker gone")
            self.sent.append(payload)

    bus = FlakyBus()
    status = run_publisher(lambda: None, bus, PublisherConfig(), clock, until_ms=1500)
    assert status.dropped >= 1
    assert status.connected  # recovered
    assert status.published == len(bus.sent)


def test_publisher_timestamps_multiples_of_period(rng):
    bus = InMemoryBus()
    clock = EmulatedClock()
    status = run_publisher(lambda: None, bus, PublisherConfig(), clock, until_ms=3000)
    assert all(t % 300 == 0 for t, _ in status.log)


def test_config_validation():
    with pytest.raises(ValueError):
        PublisherConfig(period_ms=0)
