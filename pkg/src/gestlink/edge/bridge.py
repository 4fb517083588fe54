"""Console bridge: JSON BridgeMessages over WebSocket, plus static files.

A hand-rolled RFC 6455 server: the handshake is SHA-1/base64 over the
client key, frames are the standard FIN/opcode/length/mask layout. Only
what a browser needs is implemented (text, ping/pong, close). Plain GETs
serve the operator console's static assets.

The bridge is an observer: it subscribes to the event log and translates
events into pushes. The only ways it can influence the run are the two
inbound message kinds (inject_gesture, set_channel), which are posted
onto the component loop; with no client activity a run is bit-identical
to a headless one.
"""

from __future__ import annotations

import base64
import hashlib
import json
import queue
import socket
import struct
import threading
from pathlib import Path

from ..proto import BridgeError, BridgeKind, BridgeMessage, parse_bridge_message, serialize_bridge_message

WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"

OP_TEXT = 0x1
OP_CLOSE = 0x8
OP_PING = 0x9
OP_PONG = 0xA

CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".mjs": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".map": "application/json",
    ".json": "application/json",
    ".ico": "image/x-icon",
    ".svg": "image/svg+xml",
}


def encode_frame(opcode: int, payload: bytes) -> bytes:
    head = bytes([0x80 | opcode])
    n = len(payload)
    if n < 126:
        head += bytes([n])
    elif n < 65536:
        head += bytes([126]) + struct.pack(">H", n)
    else:
        head += bytes([127]) + struct.pack(">Q", n)
    return head + payload


def read_exact(sock: socket.socket, n: int) -> bytes:
    buf = b""
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise ConnectionError("peer closed")
        buf += chunk
    return buf


def read_frame(sock: socket.socket) -> tuple[int, bytes]:
    b0, b1 = read_exact(sock, 2)
    opcode = b0 & 0x0F
    masked = bool(b1 & 0x80)
    n = b1 & 0x7F
    if n == 126:
        (n,) = struct.unpack(">H", read_exact(sock, 2))
    elif n == 127:
        (n,) = struct.unpack(">Q", read_exact(sock, 8))
    mask = read_exact(sock, 4) if masked else b""
    payload = read_exact(sock, n)
    if masked:
        payload = bytes(c ^ mask[i % 4] for i, c in enumerate(payload))
    return opcode, payload


class WsClient:
    """Minimal client, enough for tests and headless console automation."""

    def __init__(self, host: str, port: int, path: str = "/ws", timeout: float = 5.0) -> None:
        self.sock = socket.create_connection((host, port), timeout=timeout)
        key = base64.b64encode(b"0123456789abcdef").decode()
        request = (
            f"GET {path} HTTP/1.1\r\nHost: {host}:{port}\r\n"
            "Upgrade: websocket\r\nConnection: Upgrade\r\n"
            f"Sec-WebSocket-Key: {key}\r\nSec-WebSocket-Version: 13\r\n\r\n"
        )
        self.sock.sendall(request.encode())
        response = b""
        while b"\r\n\r\n" not in response:
            chunk = self.sock.recv(4096)
            if not chunk:
                raise ConnectionError("handshake failed")
            response += chunk
        if b"101" not in response.split(b"\r\n", 1)[0]:
            raise ConnectionError(f"unexpected handshake response: {response[:120]!r}")

    def send_text(self, text: str) -> None:
        payload = text.encode()
        mask = b"\x11\x22\x33\x44"
        masked = bytes(c ^ mask[i % 4] for i, c in enumerate(payload))
        n = len(payload)
        if n < 126:
            head = bytes([0x80 | OP_TEXT, 0x80 | n])
        elif n < 65536:
            head = bytes([0x80 | OP_TEXT, 0x80 | 126]) + struct.pack(">H", n)
        else:
            head = bytes([0x80 | OP_TEXT, 0x80 | 127]) + struct.pack(">Q", n)
        self.sock.sendall(head + mask + masked)

    def recv_text(self, timeout: float = 5.0) -> str:
        self.sock.settimeout(timeout)
        while True:
            opcode, payload = read_frame(self.sock)
            if opcode == OP_TEXT:
                return payload.decode()
            if opcode == OP_CLOSE:
                raise ConnectionError("closed")

    def close(self) -> None:
        try:
            self.sock.sendall(encode_frame(OP_CLOSE, b""))
        except OSError:
            pass
        self.sock.close()


class _Client:
    def __init__(self, sock: socket.socket) -> None:
        self.sock = sock
        self.outbox: queue.Queue[bytes | None] = queue.Queue(maxsize=256)
        self.alive = True


class BridgeServer:
    def __init__(
        self,
        loop,
        log,
        host: str = "127.0.0.1",
        port: int = 8080,
        static_dir: str | Path | None = None,
        on_inject=None,
        on_set_channel=None,
        context: dict | None = None,
    ) -> None:
        self.loop = loop
        self.log = log
        self.host = host
        self.port = port
        self.static_dir = Path(static_dir) if static_dir else None
        self.on_inject = on_inject
        self.on_set_channel = on_set_channel
        self.context = context or {}
        self.clients: list[_Client] = []
        self._clients_lock = threading.Lock()
        self._server_sock: socket.socket | None = None
        self._running = False
        self._last_rtt_ms: float | None = None
        log.subscribe(self._on_event)

    # lifecycle ------------------------------------------------------------
    def start(self) -> None:
        self._server_sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._server_sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._server_sock.bind((self.host, self.port))
        self.port = self._server_sock.getsockname()[1]
        self._server_sock.listen(8)
        self._running = True
        threading.Thread(target=self._accept_loop, daemon=True).start()

    def stop(self) -> None:
        self._running = False
        with self._clients_lock:
            for client in self.clients:
                client.alive = False
                client.outbox.put(None)
                try:
                    client.sock.close()
                except OSError:
                    pass
            self.clients.clear()
        if self._server_sock:
            try:
                self._server_sock.close()
            except OSError:
                pass

    # event translation ------------------------------------------------------
    def _on_event(self, record: dict) -> None:
        ev = record["ev"]
        if ev == "telem":
            msg = BridgeMessage(BridgeKind.TELEMETRY, {k: v for k, v in record.items() if k != "ev"})
        elif ev == "classified":
            payload = {
                "cls": record["cls"],
                "confidence": record["confidence"],
                "frame_seq": record["seq"],
                "stream_ms": (record["t_received_us"] - record["t_captured_us"]) / 1000.0,
                "process_ms": record["process_us"] / 1000.0,
                "distance_m": record["distance_m"],
                "t_us": record["t_us"],
            }
            msg = BridgeMessage(BridgeKind.GESTURE_EVENT, payload)
        elif ev == "echo_rtt":
            self._last_rtt_ms = record["rtt_us"] / 1000.0
            return
        elif ev == "cmd_sent":
            payload = {
                "verb": record["verb"],
                "magnitude": record.get("magnitude"),
                "origin": record.get("origin"),
                "rtt_ms": self._last_rtt_ms,
                "t_us": record["t_us"],
            }
            if "t_captured_us" in record:
                one_way = (self._last_rtt_ms or 0.0) / 2.0
                payload["end_to_end_est_ms"] = (
                    (record["t_us"] - record["t_captured_us"]) / 1000.0 + one_way
                )
            msg = BridgeMessage(BridgeKind.LATENCY_SAMPLE, payload)
        elif ev == "failsafe":
            msg = BridgeMessage(
                BridgeKind.FAILSAFE_EVENT, {"mode": record["mode"], "cause": record["cause"]}
            )
        else:
            return
        self.broadcast(msg)

    def broadcast(self, msg: BridgeMessage) -> None:
        frame = encode_frame(OP_TEXT, serialize_bridge_message(msg).encode())
        with self._clients_lock:
            for client in self.clients:
                try:
                    client.outbox.put_nowait(frame)
                except queue.Full:
                    try:
                        client.outbox.get_nowait()
                        client.outbox.put_nowait(frame)
                    except queue.Empty:
                        pass

    # sockets -----------------------------------------------------------------
    def _accept_loop(self) -> None:
        while self._running:
            try:
                sock, _ = self._server_sock.accept()
            except OSError:
                return
            threading.Thread(target=self._handle, args=(sock,), daemon=True).start()

    def _handle(self, sock: socket.socket) -> None:
        try:
            request = b""
            sock.settimeout(10)
            while b"\r\n\r\n" not in request:
                chunk = sock.recv(4096)
                if not chunk:
                    sock.close()
                    return
                request += chunk
            head = request.split(b"\r\n\r\n", 1)[0].decode("latin-1")
            lines = head.split("\r\n")
            method, path, _ = lines[0].split(" ", 2)
            headers = {}
            for line in lines[1:]:
                if ":" in line:
                    k, v = line.split(":", 1)
                    headers[k.strip().lower()] = v.strip()
            if headers.get("upgrade", "").lower() == "websocket":
                self._serve_websocket(sock, headers)
            elif method == "GET":
                self._serve_static(sock, path)
            else:
                sock.sendall(b"HTTP/1.1 405 Method Not Allowed\r\nContent-Length: 0\r\n\r\n")
                sock.close()
        except (OSError, ValueError):
            try:
                sock.close()
            except OSError:
                pass

    def _serve_websocket(self, sock: socket.socket, headers: dict) -> None:
        key = headers.get("sec-websocket-key", "")
        accept = base64.b64encode(hashlib.sha1((key + WS_GUID).encode()).digest()).decode()
        sock.sendall(
            (
                "HTTP/1.1 101 Switching Protocols\r\n"
                "Upgrade: websocket\r\nConnection: Upgrade\r\n"
                f"Sec-WebSocket-Accept: {accept}\r\n\r\n"
            ).encode()
        )
        sock.settimeout(None)
        client = _Client(sock)
        with self._clients_lock:
            self.clients.append(client)
        threading.Thread(target=self._sender, args=(client,), daemon=True).start()
        try:
            while client.alive:
                opcode, payload = read_frame(sock)
                if opcode == OP_CLOSE:
                    break
                if opcode == OP_PING:
                    client.outbox.put(encode_frame(OP_PONG, payload))
                    continue
                if opcode == OP_TEXT:
                    self._on_client_text(client, payload.decode())
        except (ConnectionError, OSError):
            pass
        finally:
            client.alive = False
            client.outbox.put(None)
            with self._clients_lock:
                if client in self.clients:
                    self.clients.remove(client)
            try:
                sock.close()
            except OSError:
                pass

    def _sender(self, client: _Client) -> None:
        while client.alive:
            frame = client.outbox.get()
            if frame is None:
                return
            try:
                client.sock.sendall(frame)
            except OSError:
                client.alive = False
                return

    def _on_client_text(self, client: _Client, text: str) -> None:
        try:
            msg = parse_bridge_message(text)
        except BridgeError as exc:
            client.outbox.put(
                encode_frame(OP_TEXT, json.dumps({"error": str(exc)}).encode())
            )
            return
        if msg.kind == BridgeKind.INJECT_GESTURE and self.on_inject:
            self.loop.post_threadsafe(lambda: self.on_inject(msg.payload))
        elif msg.kind == BridgeKind.SET_CHANNEL and self.on_set_channel:
            self.loop.post_threadsafe(lambda: self.on_set_channel(msg.payload))
        else:
            client.outbox.put(
                encode_frame(OP_TEXT, json.dumps({"error": f"unsupported kind {msg.kind.value}"}).encode())
            )

    # static assets --------------------------------------------------------------
    def _serve_static(self, sock: socket.socket, path: str) -> None:
        if path.split("?", 1)[0] == "/scenario.json":
            body = json.dumps(self.context, sort_keys=True).encode()
            sock.sendall(
                (
                    "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\n"
                    f"Content-Length: {len(body)}\r\nAccess-Control-Allow-Origin: *\r\n"
                    "Connection: close\r\n\r\n"
                ).encode()
                + body
            )
            sock.close()
            return
        if self.static_dir is None:
            sock.sendall(b"HTTP/1.1 404 Not Found\r\nContent-Length: 0\r\n\r\n")
            sock.close()
            return
        rel = path.split("?", 1)[0].lstrip("/") or "index.html"
        target = (self.static_dir / rel).resolve()
        root = self.static_dir.resolve()
        if not str(target).startswith(str(root)) or not target.is_file():
            sock.sendall(b"HTTP/1.1 404 Not Found\r\nContent-Length: 0\r\n\r\n")
            sock.close()
            return
        body = target.read_bytes()
        ctype = CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        header = (
            f"HTTP/1.1 200 OK\r\nContent-Type: {ctype}\r\n"
            f"Content-Length: {len(body)}\r\nConnection: close\r\n\r\n"
        )
        sock.sendall(header.encode() + body)
        sock.close()
