"""Blocking line-framed channels over sockets."""

from __future__ import annotations

import socket

from ..errors import TransportError
from .wire import Message, decode_message, encode_message

MAX_FRAME = 64 * 1024


class LineChannel:
    """One protocol message per LF-terminated line on a stream socket."""

    def __init__(self, sock: socket.socket, timeout: float | None = 10.0):
        sock.settimeout(timeout)
        if sock.family in (socket.AF_INET, socket.AF_INET6):
            # Small request/response frames: Nagle plus delayed ACK would stall every exchange.
            sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        self._sock = sock
        self._reader = sock.makefile("rb")
        self._closed = False

    def send(self, msg: Message) -> None:
        try:
            self._sock.sendall(encode_message(msg))
        except (OSError, ValueError) as exc:
            raise TransportError(f"send failed: {exc}") from None

    def recv(self) -> Message:
        try:
            line = self._reader.readline(MAX_FRAME + 1)
        except socket.timeout:
            raise TransportError("receive timed out") from None
        except (OSError, ValueError) as exc:
            raise TransportError(f"receive failed: {exc}") from None
        if not line:
            raise TransportError("connection closed by peer")
        return decode_message(line)

    def close(self) -> None:
        if self._closed:
            return
        self._closed = True
        try:
            self._reader.close()
            self._sock.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        self._sock.close()


def loopback_pair(timeout: float | None = 10.0) -> tuple[LineChannel, LineChannel]:
    a, b = socket.socketpair()
    return LineChannel(a, timeout), LineChannel(b, timeout)


def parse_addr(addr: str) -> tuple[str, int]:
    host, sep, port = addr.rpartition(":")
    if not sep or not port.isdigit():
        raise ValueError(f"address must look like HOST:PORT, got {addr!r}")
    return host or "127.0.0.1", int(port)


def listen_once(addr: str, timeout: float | None = 10.0) -> LineChannel:
    """Bind ``addr``, accept a single peer, and stop listening."""
    with socket.create_server(parse_addr(addr)) as server:
        server.settimeout(timeout)
        try:
            conn, _ = server.accept()
        except socket.timeout:
            raise TransportError(f"no peer connected to {addr}") from None
    return LineChannel(conn, timeout)


def connect(addr: str, timeout: float | None = 10.0) -> LineChannel:
    try:
        sock = socket.create_connection(parse_addr(addr), timeout=timeout)
    except OSError as exc:
        raise TransportError(f"cannot connect to {addr}: {exc}") from None
    return LineChannel(sock, timeout)
