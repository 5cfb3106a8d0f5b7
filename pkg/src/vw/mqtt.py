"""Minimal MQTT 3.1.1 over TCP: a QoS-0 client and a single-process broker.

Just enough of the protocol for one publisher and five subscribers on a
LAN topic: CONNECT/CONNACK, PUBLISH (QoS 0), SUBSCRIBE/SUBACK,
PINGREQ/PINGRESP, DISCONNECT. No retained messages, no sessions, no auth,
no TLS. Topic filters support the + and # wildcards.
"""

from __future__ import annotations

import socket
import struct
import threading
from typing import Callable

CONNECT = 0x10
CONNACK = 0x20
PUBLISH = 0x30
SUBSCRIBE = 0x82
SUBACK = 0x90
PINGREQ = 0xC0
PINGRESP = 0xD0
DISCONNECT = 0xE0


class MqttError(ConnectionError):
    """Protocol violation or unexpected peer behavior."""


def _encode_varint(n: int) -> bytes:
    out = bytearray()
    while True:
        byte = n % 128
        n //= 128
        if n:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return bytes(out)


def _encode_str(s: str) -> bytes:
    raw = s.encode("utf-8")
    return struct.pack(">H", len(raw)) + raw


def _read_exact(sock: socket.socket, n: int) -> bytes:
    buf = bytearray()
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise MqttError("connection closed")
        buf.extend(chunk)
    return bytes(buf)


def _read_packet(sock: socket.socket) -> tuple[int, bytes]:
    head = _read_exact(sock, 1)[0]
    length = 0
    shift = 0
    while True:
        byte = _read_exact(sock, 1)[0]
        length |= (byte & 0x7F) << shift
        if not byte & 0x80:
            break
        shift += 7
        if shift > 21:
            raise MqttError("malformed remaining length")
    body = _read_exact(sock, length) if length else b""
    return head, body


def topic_matches(filt: str, topic: str) -> bool:
    """MQTT filter match with + (one level) and # (rest) wildcards."""
    fparts = filt.split("/")
    tparts = topic.split("/")
    for i, fp in enumerate(fparts):
        if fp == "#":
            return True
        if i >= len(tparts):
            return False
        if fp != "+" and fp != tparts[i]:
            return False
    return len(fparts) == len(tparts)


def _publish_packet(topic: str, payload: bytes) -> bytes:
    body = _encode_str(topic) + payload
    return bytes([PUBLISH]) + _encode_varint(len(body)) + body


class Broker:
    """In-process broker: one daemon thread per connection."""

    def __init__(self, host: str = "127.0.0.1", port: int = 0) -> None:
        self._server = socket.create_server((host, port))
        self.host, self.port = self._server.getsockname()[:2]
        self._subs: dict[socket.socket, list[str]] = {}
        self._lock = threading.Lock()
        self._closing = threading.Event()
        self._accept_thread: threading.Thread | None = None

    def start(self) -> "Broker":
        self._accept_thread = threading.Thread(target=self._accept_loop, daemon=True)
        self._accept_thread.start()
        return self

    def _accept_loop(self) -> None:
        while not self._closing.is_set():
            try:
                conn, _ = self._server.accept()
            except OSError:
                return
            threading.Thread(target=self._serve, args=(conn,), daemon=True).start()

    def _serve(self, conn: socket.socket) -> None:
        try:
            head, body = _read_packet(conn)
            if head & 0xF0 != CONNECT:
                raise MqttError("expected CONNECT")
            conn.sendall(bytes([CONNACK, 2, 0, 0]))
            with self._lock:
                self._subs[conn] = []
            while not self._closing.is_set():
                head, body = _read_packet(conn)
                ptype = head & 0xF0
                if ptype == PUBLISH:
                    tlen = struct.unpack(">H", body[:2])[0]
                    topic = body[2 : 2 + tlen].decode("utf-8")
                    payload = body[2 + tlen :]  # QoS 0: no packet id
                    self._route(topic, payload)
                elif ptype == 0x80:  # SUBSCRIBE (header 0x82: type 8, reserved flags 2)
                    pid = body[:2]
                    filters = []
                    i = 2
                    while i < len(body):
                        flen = struct.unpack(">H", body[i : i + 2])[0]
                        filters.append(body[i + 2 : i + 2 + flen].decode("utf-8"))
                        i += 2 + flen + 1  # skip requested QoS byte
                    with self._lock:
                        self._subs[conn].extend(filters)
                    conn.sendall(bytes([SUBACK, 2 + len(filters)]) + pid + b"\x00" * len(filters))
                elif ptype == PINGREQ:
                    conn.sendall(bytes([PINGRESP, 0]))
                elif ptype == DISCONNECT:
                    break
        except (MqttError, OSError):
            pass
        finally:
            with self._lock:
                self._subs.pop(conn, None)
            try:
                conn.close()
            except OSError:
                pass

    def _route(self, topic: str, payload: bytes) -> None:
        packet = _publish_packet(topic, payload)
        with self._lock:
            targets = [c for c, filts in self._subs.items() if any(topic_matches(f, topic) for f in filts)]
        for c in targets:
            try:
                c.sendall(packet)
            except OSError:
                pass

    def stop(self) -> None:
        self._closing.set()
        try:
            self._server.close()
        except OSError:
            pass
        with self._lock:
            conns = list(self._subs)
        for c in conns:
            try:
                c.close()
            except OSError:
                pass


class MqttClient:
    """QoS-0 client with a background reader dispatching to per-filter
    handlers; satisfies the same publish/subscribe surface as the in-memory
    bus."""

    def __init__(self, host: str, port: int, client_id: str) -> None:
        self.host = host
        self.port = port
        self.client_id = client_id
        self._sock: socket.socket | None = None
        self._handlers: list[tuple[str, Callable[[str, bytes], None]]] = []
        self._lock = threading.Lock()
        self._pid = 0
        self._reader: threading.Thread | None = None

    # -- connection ---------------------------------------------------------
    def connect(self, timeout: float = 5.0) -> "MqttClient":
        sock = socket.create_connection((self.host, self.port), timeout=timeout)
        sock.settimeout(None)
        var = _encode_str("MQTT") + bytes([4, 0x02]) + struct.pack(">H", 0) + _encode_str(self.client_id)
        sock.sendall(bytes([CONNECT]) + _encode_varint(len(var)) + var)
        head, body = _read_packet(sock)
        if head & 0xF0 != CONNACK or len(body) != 2 or body[1] != 0:
            sock.close()
            raise MqttError("CONNACK refused")
        self._sock = sock
        self._reader = threading.Thread(target=self._read_loop, daemon=True)
        self._reader.start()
        with self._lock:
            filters = [f for f, _ in self._handlers]
        for f in filters:
            self._send_subscribe(f)
        return self

    def reconnect(self) -> None:
        self.close()
        self.connect()

    def close(self) -> None:
        sock = self._sock
        self._sock = None
        if sock is not None:
            try:
                sock.sendall(bytes([DISCONNECT, 0]))
            except OSError:
                pass
            try:
                sock.close()
            except OSError:
                pass

    # -- pub/sub --------------------------------------------------------------
    def publish(self, topic: str, payload: bytes) -> None:
        sock = self._sock
        if sock is None:
            raise MqttError("not connected")
        sock.sendall(_publish_packet(topic, payload))

    def subscribe(self, topic_filter: str, handler: Callable[[str, bytes], None]) -> None:
        with self._lock:
            self._handlers.append((topic_filter, handler))
        if self._sock is not None:
            self._send_subscribe(topic_filter)

    def _send_subscribe(self, topic_filter: str) -> None:
        sock = self._sock
        if sock is None:
            return
        with self._lock:
            self._pid = self._pid % 0xFFFF + 1
            pid = self._pid
        body = struct.pack(">H", pid) + _encode_str(topic_filter) + b"\x00"
        sock.sendall(bytes([SUBSCRIBE]) + _encode_varint(len(body)) + body)

    def _read_loop(self) -> None:
        sock = self._sock
        if sock is None:
            return
        try:
            while True:
                head, body = _read_packet(sock)
                ptype = head & 0xF0
                if ptype == PUBLISH:
                    tlen = struct.unpack(">H", body[:2])[0]
                    topic = body[2 : 2 + tlen].decode("utf-8")
                    payload = body[2 + tlen :]
                    with self._lock:
                        handlers = [h for f, h in self._handlers if topic_matches(f, topic)]
                    for h in handlers:
                        h(topic, payload)
                # SUBACK/PINGRESP need no action at QoS 0
        except (MqttError, OSError):
            return
