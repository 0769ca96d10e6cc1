"""Newline-delimited JSON environment server.

One TCP connection drives any number of environments: `make` allocates one
and returns its id, `reset`/`step` operate on it, `close` releases it.
Every request line gets exactly one response line: {"ok": true, ...} or
{"ok": false, "error": ...}. Malformed JSON earns an error reply but never
kills the connection. Environments are private to their connection and
commands execute sequentially per connection, so wire runs reproduce
in-process runs exactly.
"""
from __future__ import annotations

import json
import socket
import socketserver
import threading

from .encoding import encode_bundle
from .env import DriveEnv, ProtocolError, make_env
from .tasks import TaskError


def _handle_command(doc: dict, envs: dict[int, DriveEnv], counter: list[int]) -> dict:
    cmd = doc.get("cmd")
    if cmd == "make":
        task = doc.get("task")
        if not isinstance(task, str):
            return {"ok": False, "error": "make requires a task name"}
        overrides = doc.get("overrides") or {}
        env = make_env(task, overrides)
        env_id = counter[0]
        counter[0] += 1
        envs[env_id] = env
        return {"ok": True, "env_id": env_id}

    env_id = doc.get("env_id")
    if cmd in ("reset", "step", "close"):
        if env_id not in envs:
            return {"ok": False, "error": f"unknown env_id {env_id!r}"}
        env = envs[env_id]
        if cmd == "reset":
            seed = doc.get("seed")
            if not isinstance(seed, int) or isinstance(seed, bool):
                return {"ok": False, "error": "reset requires an integer seed"}
            obs, info = env.reset(seed)
            return {"ok": True, "obs": encode_bundle(obs), "info": info}
        if cmd == "step":
            if "action" not in doc:
                return {"ok": False, "error": "step requires an action"}
            result = env.step(doc["action"])
            return {
                "ok": True,
                "obs": encode_bundle(result.obs),
                "reward": result.reward,
                "terminated": result.terminated,
                "truncated": result.truncated,
                "info": result.info,
            }
        env.close()
        del envs[env_id]
        return {"ok": True}

    return {"ok": False, "error": f"unknown command {cmd!r}"}


class _ClientHandler(socketserver.StreamRequestHandler):
    def handle(self):
        envs: dict[int, DriveEnv] = {}
        counter = [0]
        while True:
            line = self.rfile.readline()
            if not line:
                break
            line = line.strip()
            if not line:
                continue
            try:
                doc = json.loads(line.decode("utf-8"))
                if not isinstance(doc, dict):
                    raise ValueError("request must be a JSON object")
                reply = _handle_command(doc, envs, counter)
            except (json.JSONDecodeError, UnicodeDecodeError, ValueError) as exc:
                reply = {"ok": False, "error": f"malformed request: {exc}"}
            except (ProtocolError, TaskError) as exc:
                reply = {"ok": False, "error": str(exc)}
            except Exception as exc:  # keep the connection alive
                reply = {"ok": False, "error": f"{type(exc).__name__}: {exc}"}
            try:
                self.wfile.write(json.dumps(reply).encode("utf-8") + b"\n")
                self.wfile.flush()
            except (BrokenPipeError, ConnectionResetError):
                break
        for env in envs.values():
            env.close()


class WireServer:
    """Threaded TCP server speaking the JSON line protocol."""

    def __init__(self, host: str = "127.0.0.1", port: int = 0):
        class _Server(socketserver.ThreadingTCPServer):
            allow_reuse_address = True
            daemon_threads = True

        self._server = _Server((host, port), _ClientHandler)
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> tuple[str, int]:
        return self._server.server_address[:2]

    def start(self) -> "WireServer":
        self._thread = threading.Thread(target=self._server.serve_forever,
                                        name="wire-tcp", daemon=True)
        self._thread.start()
        return self

    def stop(self):
        self._server.shutdown()
        self._server.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5.0)
            self._thread = None

    def serve_forever(self):
        self._server.serve_forever()


class WireClient:
    """Minimal blocking client for tests and external drivers."""

    def __init__(self, host: str, port: int, timeout: float = 30.0):
        self._sock = socket.create_connection((host, port), timeout=timeout)
        self._file = self._sock.makefile("rwb")

    def request(self, doc: dict) -> dict:
        self._file.write(json.dumps(doc).encode("utf-8") + b"\n")
        self._file.flush()
        line = self._file.readline()
        if not line:
            raise ConnectionError("server closed the connection")
        return json.loads(line.decode("utf-8"))

    def send_raw(self, data: bytes) -> dict:
        self._file.write(data)
        self._file.flush()
        line = self._file.readline()
        if not line:
            raise ConnectionError("server closed the connection")
        return json.loads(line.decode("utf-8"))

    def close(self):
        try:
            self._file.close()
        finally:
            self._sock.close()
