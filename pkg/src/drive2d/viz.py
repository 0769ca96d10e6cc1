"""Live telemetry over HTTP: latest frame, rolling stats, static dashboard.

The hub is a latest-value mailbox: the simulation loop publishes a
snapshot by swapping one attribute reference, which is atomic under the
GIL and never blocks on readers. HTTP handlers read whatever snapshot is
current; slow readers skip frames rather than stalling the producer.

Endpoints: GET /status (JSON), GET /frame (PNG), GET /stream (multipart,
capped at 10 fps), GET / and asset paths (dashboard files). 503 before the
first publish, 404 for unknown paths.
"""
from __future__ import annotations

import json
import pathlib
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np

from .encoding import image_to_png

STATIC_DIR = pathlib.Path(__file__).parent / "static"
STREAM_BOUNDARY = "telemetryframe"
STREAM_MAX_FPS = 10.0

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".map": "application/json",
    ".png": "image/png",
    ".svg": "image/svg+xml",
}


@dataclass(frozen=True)
class TelemetrySnapshot:
    episode: int
    tick: int
    reward: float
    reward_mean: float
    metrics: dict
    frame: np.ndarray | None
    ts: str

    def status_doc(self) -> dict:
        return {
            "episode": self.episode,
            "tick": self.tick,
            "reward": self.reward,
            "reward_mean_100": self.reward_mean,
            "metrics": self.metrics,
            "ts": self.ts,
        }


class TelemetryHub:
    """Single-writer, many-reader mailbox holding the newest snapshot."""

    def __init__(self):
        self._latest: TelemetrySnapshot | None = None

    def publish(self, episode: int, tick: int, reward: float,
                reward_mean: float, metrics: dict, frame: np.ndarray | None):
        # one reference assignment: wait-free for the producer
        self._latest = TelemetrySnapshot(
            episode=episode, tick=tick, reward=float(reward),
            reward_mean=float(reward_mean), metrics=dict(metrics),
            frame=frame,
            ts=datetime.now(timezone.utc).isoformat(),
        )

    def latest(self) -> TelemetrySnapshot | None:
        return self._latest


class _Handler(BaseHTTPRequestHandler):
    hub: TelemetryHub = None  # set by server factory
    protocol_version = "HTTP/1.1"

    def log_message(self, fmt, *args):
        return

    def _send_json(self, code: int, doc: dict):
        body = json.dumps(doc).encode("utf-8")
        self.send_response(code)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_bytes(self, code: int, content_type: str, body: bytes):
        self.send_response(code)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_GET(self):
        path = self.path.split("?", 1)[0]
        if path == "/status":
            snap = self.hub.latest()
            if snap is None:
                self._send_json(503, {"error": "no data"})
            else:
                self._send_json(200, snap.status_doc())
        elif path == "/frame":
            snap = self.hub.latest()
            if snap is None or snap.frame is None:
                self._send_json(503, {"error": "no data"})
            else:
                self._send_bytes(200, "image/png", image_to_png(snap.frame))
        elif path == "/stream":
            self._stream()
        else:
            self._static(path)

    def _stream(self):
        snap = self.hub.latest()
        if snap is None or snap.frame is None:
            self._send_json(503, {"error": "no data"})
            return
        self.send_response(200)
        self.send_header("Content-Type",
                         f"multipart/x-mixed-replace; boundary={STREAM_BOUNDARY}")
        self.end_headers()
        interval = 1.0 / STREAM_MAX_FPS
        try:
            while True:
                snap = self.hub.latest()
                if snap is not None and snap.frame is not None:
                    png = image_to_png(snap.frame)
                    self.wfile.write(
                        f"--{STREAM_BOUNDARY}\r\n"
                        f"Content-Type: image/png\r\n"
                        f"Content-Length: {len(png)}\r\n\r\n".encode("ascii"))
                    self.wfile.write(png)
                    self.wfile.write(b"\r\n")
                    self.wfile.flush()
                time.sleep(interval)
        except (BrokenPipeError, ConnectionResetError):
            return

    def _static(self, path: str):
        if path == "/":
            path = "/index.html"
        target = (STATIC_DIR / path.lstrip("/")).resolve()
        try:
            target.relative_to(STATIC_DIR.resolve())
        except ValueError:
            self._send_json(404, {"error": "not found"})
            return
        if not target.is_file():
            self._send_json(404, {"error": "not found"})
            return
        ctype = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        self._send_bytes(200, ctype, target.read_bytes())


class VizServer:
    """Background HTTP server bound to one TelemetryHub."""

    def __init__(self, hub: TelemetryHub, host: str = "127.0.0.1", port: int = 0):
        handler = type("BoundHandler", (_Handler,), {"hub": hub})
        self._httpd = ThreadingHTTPServer((host, port), handler)
        self._httpd.daemon_threads = True
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> tuple[str, int]:
        return self._httpd.server_address[:2]

    def start(self) -> "VizServer":
        self._thread = threading.Thread(target=self._httpd.serve_forever,
                                        name="viz-http", daemon=True)
        self._thread.start()
        return self

    def stop(self):
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5.0)
            self._thread = None
