"""Local socket protocol for UI clients.

Framing: ASCII decimal byte length, a newline, then a UTF-8 JSON payload.
Requests carry an ``id`` and a command/query ``kind``; each gets exactly
one reply with the same id. After every mutating command the server
pushes a ``view-update`` notification (no id) to all connected clients;
clients must tolerate coalescing.
"""
from __future__ import annotations

import json
import socket
import socketserver
import threading

from .config import EngineConfig
from .session import MUTATING_KINDS, Session


def encode_message(obj: dict) -> bytes:
    payload = json.dumps(obj).encode("utf-8")
    return str(len(payload)).encode("ascii") + b"\n" + payload


def read_message(sock_file) -> dict | None:
    header = sock_file.readline()
    if not header:
        return None
    length = int(header.strip())
    payload = sock_file.read(length)
    if len(payload) < length:
        return None
    return json.loads(payload.decode("utf-8"))


class SessionServer:
    """One session, many clients, one command loop."""

    def __init__(self, seed: int = 0, config: EngineConfig | None = None,
                 host: str = "127.0.0.1", port: int = 0):
        self.session = Session(seed, config)
        self._lock = threading.Lock()
        self._clients: set[socket.socket] = set()
        outer = self

        class Handler(socketserver.StreamRequestHandler):
            def handle(self):
                with outer._lock:
                    outer._clients.add(self.request)
                try:
                    while True:
                        msg = read_message(self.rfile)
                        if msg is None:
                            break
                        outer._handle(msg, self.request)
                finally:
                    with outer._lock:
                        outer._clients.discard(self.request)

        class Server(socketserver.ThreadingTCPServer):
            allow_reuse_address = True
            daemon_threads = True

        self._server = Server((host, port), Handler)
        self.address = self._server.server_address
        self._thread: threading.Thread | None = None

    def _handle(self, msg: dict, sock: socket.socket):
        msg_id = msg.get("id")
        kind = msg.get("kind")
        with self._lock:
            try:
                reply = self.session.execute(msg)
            except Exception as exc:  # keep the loop alive on bugs too
                reply = {"ok": False, "error": {"type": "InternalError",
                                                "message": str(exc)}}
            reply["id"] = msg_id
            self._send(sock, reply)
            if reply.get("ok") and kind in (MUTATING_KINDS | {"undo", "redo"}):
                note = encode_message({"kind": "view-update",
                                       "at": self.session.cursor})
                for client in list(self._clients):
                    try:
                        client.sendall(note)
                    except OSError:
                        self._clients.discard(client)

    @staticmethod
    def _send(sock: socket.socket, obj: dict):
        try:
            sock.sendall(encode_message(obj))
        except OSError:
            pass

    def start(self):
        self._thread = threading.Thread(target=self._server.serve_forever,
                                        daemon=True)
        self._thread.start()
        return self

    def serve_forever(self):
        self._server.serve_forever()

    def shutdown(self):
        self._server.shutdown()
        self._server.server_close()


class SessionClient:
    """Blocking client used by tests and tools."""

    def __init__(self, host: str, port: int):
        self._sock = socket.create_connection((host, port))
        self._file = self._sock.makefile("rb")
        self._next_id = 0
        self.notifications: list[dict] = []

    def request(self, kind: str, **payload) -> dict:
        self._next_id += 1
        msg = {"id": self._next_id, "kind": kind, **payload}
        self._sock.sendall(encode_message(msg))
        while True:
            reply = read_message(self._file)
            if reply is None:
                raise ConnectionError("server closed the connection")
            if reply.get("id") == self._next_id:
                return reply
            self.notifications.append(reply)

    def drain_notifications(self, timeout: float = 0.5) -> list[dict]:
        """Collect queued push messages until the line goes quiet."""
        self._sock.settimeout(timeout)
        try:
            while True:
                msg = read_message(self._file)
                if msg is None:
                    break
                self.notifications.append(msg)
        except (TimeoutError, socket.timeout):
            pass
        finally:
            self._sock.settimeout(None)
        return self.notifications

    def close(self):
        self._file.close()
        self._sock.close()
