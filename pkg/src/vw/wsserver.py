"""Minimal RFC 6455 WebSocket server: HTTP upgrade, text frames, ping/pong,
close. Enough to carry line-delimited JSON between the session engine and a
browser; no extensions, no fragmentation of outbound frames.
"""

from __future__ import annotations

import base64
import hashlib
import socket
import struct
import threading
from typing import Callable

_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"

OP_CONT = 0x0
OP_TEXT = 0x1
OP_BINARY = 0x2
OP_CLOSE = 0x8
OP_PING = 0x9
OP_PONG = 0xA


class WsError(ConnectionError):
    pass


def accept_key(client_key: str) -> str:
    digest = hashlib.sha1((client_key + _GUID).encode("ascii")).digest()
    return base64.b64encode(digest).decode("ascii")


def _read_exact(sock: socket.socket, n: int) -> bytes:
    buf = bytearray()
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise WsError("connection closed")
        buf.extend(chunk)
    return bytes(buf)


def encode_frame(opcode: int, payload: bytes) -> bytes:
    head = bytearray([0x80 | opcode])
    n = len(payload)
    if n < 126:
        head.append(n)
    elif n < 1 << 16:
        head.append(126)
        head.extend(struct.pack(">H", n))
    else:
        head.append(127)
        head.extend(struct.pack(">Q", n))
    return bytes(head) + payload


def read_frame(sock: socket.socket) -> tuple[int, bytes]:
    """Returns (opcode, unmasked payload) of one complete message frame."""
    b0, b1 = _read_exact(sock, 2)
    opcode = b0 & 0x0F
    masked = bool(b1 & 0x80)
    n = b1 & 0x7F
    if n == 126:
        n = struct.unpack(">H", _read_exact(sock, 2))[0]
    elif n == 127:
        n = struct.unpack(">Q", _read_exact(sock, 8))[0]
    mask = _read_exact(sock, 4) if masked else b""
    payload = _read_exact(sock, n) if n else b""
    if masked:
        payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
    return opcode, payload


class WsConnection:
    def __init__(self, sock: socket.socket, path: str):
        self.sock = sock
        self.path = path
        self._send_lock = threading.Lock()
        self.open = True

    def send_text(self, text: str) -> None:
        try:
            with self._send_lock:
                self.sock.sendall(encode_frame(OP_TEXT, text.encode("utf-8")))
        except OSError:
            self.open = False
            raise

    def close(self) -> None:
        if self.open:
            self.open = False
            try:
                with self._send_lock:
                    self.sock.sendall(encode_frame(OP_CLOSE, b""))
            except OSError:
                pass
        try:
            self.sock.close()
        except OSError:
            pass


def _handshake(sock: socket.socket) -> str:
    data = bytearray()
    while b"\r\n\r\n" not in data:
        chunk = sock.recv(4096)
        if not chunk:
            raise WsError("closed during handshake")
        data.extend(chunk)
        if len(data) > 65536:
            raise WsError("oversized handshake")
    head = data.split(b"\r\n\r\n", 1)[0].decode("latin-1")
    lines = head.split("\r\n")
    parts = lines[0].split(" ")
    if len(parts) < 3 or parts[0] != "GET":
        raise WsError("not a GET upgrade")
    path = parts[1]
    headers = {}
    for line in lines[1:]:
        if ":" in line:
            k, v = line.split(":", 1)
            headers[k.strip().lower()] = v.strip()
    key = headers.get("sec-websocket-key")
    if not key or "websocket" not in headers.get("upgrade", "").lower():
        raise WsError("missing upgrade headers")
    resp = (
        "HTTP/1.1 101 Switching Protocols\r\n"
        "Upgrade: websocket\r\n"
        "Connection: Upgrade\r\n"
        f"Sec-WebSocket-Accept: {accept_key(key)}\r\n\r\n"
    )
    sock.sendall(resp.encode("latin-1"))
    return path


class WsServer:
    """Threaded server: one reader thread per connection; text messages go
    to on_message(conn, text); connection list is available for broadcast."""

    def __init__(
        self,
        host: str = "127.0.0.1",
        port: int = 0,
        on_message: Callable[[WsConnection, str], None] | None = None,
        path: str = "/session",
    ) -> None:
        self._server = socket.create_server((host, port))
        self.host, self.port = self._server.getsockname()[:2]
        self.on_message = on_message
        self.path = path
        self.connections: list[WsConnection] = []
        self._lock = threading.Lock()
        self._closing = threading.Event()

    def start(self) -> "WsServer":
        threading.Thread(target=self._accept_loop, daemon=True).start()
        return self

    def _accept_loop(self) -> None:
        while not self._closing.is_set():
            try:
                sock, _ = self._server.accept()
            except OSError:
                return
            threading.Thread(target=self._serve, args=(sock,), daemon=True).start()

    def _serve(self, sock: socket.socket) -> None:
        try:
            path = _handshake(sock)
            if path.split("?")[0] != self.path:
                sock.close()
                return
            conn = WsConnection(sock, path)
        except (WsError, OSError):
            try:
                sock.close()
            except OSError:
                pass
            return
        with self._lock:
            self.connections.append(conn)
        try:
            while conn.open:
                opcode, payload = read_frame(sock)
                if opcode == OP_CLOSE:
                    break
                if opcode == OP_PING:
                    with conn._send_lock:
                        sock.sendall(encode_frame(OP_PONG, payload))
                elif opcode == OP_TEXT and self.on_message is not None:
                    self.on_message(conn, payload.decode("utf-8"))
        except (WsError, OSError):
            pass
        finally:
            with self._lock:
                if conn in self.connections:
                    self.connections.remove(conn)
            conn.close()

    def broadcast(self, text: str) -> None:
        with self._lock:
            conns = list(self.connections)
        for c in conns:
            try:
                c.send_text(text)
            except OSError:
                pass

    def stop(self) -> None:
        self._closing.set()
        try:
            self._server.close()
        except OSError:
            pass
        with self._lock:
            conns = list(self.connections)
        for c in conns:
            c.close()
