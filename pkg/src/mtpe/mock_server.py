"""Deterministic OpenAI-compatible mock server for offline runs and tests.

Serves ``/v1/completions`` and ``/v1/chat/completions`` with zero latency
and fully scripted outputs.  Three modes:

* ``echo-reference``: answer with the reference translation of the segment
  named in the request's ``user`` field (the batch client sets it to the
  segment id);
* ``scripted``: answer from an explicit id -> text map;
* ``identity``: answer with the hypothesis parsed back out of the prompt
  (the line just above the final cue line), so the "edited" output equals
  the input translation.

Optional failure injection (``fail_times`` 500s per segment before
succeeding) and bearer-token enforcement (``require_auth``) exist to
exercise client retry and abort paths.
"""
from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

MODES = ("echo-reference", "scripted", "identity")


def _hypothesis_from_prompt(prompt: str) -> str:
    """The text of the line above the final cue line, label stripped."""
    lines = prompt.rstrip("\n").split("\n")
    if len(lines) < 2:
        return ""
    line = lines[-2]
    _, sep, value = line.partition(": ")
    return value if sep else line


class _Handler(BaseHTTPRequestHandler):
    server: "MockServer"

    def log_message(self, fmt, *args):  # keep test output quiet
        pass

    def _send(self, status: int, body: dict) -> None:
        data = json.dumps(body).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def do_POST(self) -> None:
        path = self.path.rstrip("/")
        chat = path.endswith("/chat/completions")
        if not chat and not path.endswith("/completions"):
            self._send(404, {"error": {"message": f"no route: {self.path}"}})
            return
        if self.server.require_auth:
            auth = self.headers.get("Authorization", "")
            if not auth.startswith("Bearer ") or len(auth) <= len("Bearer "):
                self._send(401, {"error": {"message": "missing bearer token"}})
                return
        length = int(self.headers.get("Content-Length", "0"))
        try:
            payload = json.loads(self.rfile.read(length).decode("utf-8"))
        except (ValueError, UnicodeDecodeError):
            self._send(400, {"error": {"message": "bad JSON body"}})
            return
        if chat:
            messages = payload.get("messages") or []
            prompt = messages[-1].get("content", "") if messages else ""
        else:
            prompt = payload.get("prompt", "")
        user = payload.get("user") or ""

        if self.server.fail_times:
            with self.server.lock:
                seen = self.server.failures.get(user, 0)
                if seen < self.server.fail_times:
                    self.server.failures[user] = seen + 1
                    self._send(500, {"error": {"message": "injected failure"}})
                    return

        if self.server.mode == "identity":
            text = _hypothesis_from_prompt(prompt)
        else:
            if user not in self.server.responses:
                self._send(404, {"error": {"message": f"no scripted response for {user!r}"}})
                return
            text = self.server.responses[user]

        model = payload.get("model", "mock")
        if chat:
            body = {
                "id": "chatcmpl-mock",
                "object": "chat.completion",
                "model": model,
                "choices": [
                    {
                        "index": 0,
                        "message": {"role": "assistant", "content": text},
                        "finish_reason": "stop",
                    }
                ],
            }
        else:
            body = {
                "id": "cmpl-mock",
                "object": "text_completion",
                "model": model,
                "choices": [{"index": 0, "text": text, "finish_reason": "stop"}],
            }
        self._send(200, body)


class MockServer(ThreadingHTTPServer):
    """A scripted OpenAI-compatible server bound to localhost."""

    daemon_threads = True

    def __init__(
        self,
        mode: str = "identity",
        responses: dict[str, str] | None = None,
        fail_times: int = 0,
        require_auth: bool = False,
        host: str = "127.0.0.1",
        port: int = 0,
    ):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
        if mode in ("echo-reference", "scripted") and responses is None:
            raise ValueError(f"mode {mode!r} needs an id -> text response map")
        super().__init__((host, port), _Handler)
        self.mode = mode
        self.responses = responses or {}
        self.fail_times = fail_times
        self.require_auth = require_auth
        self.failures: dict[str, int] = {}
        self.lock = threading.Lock()
        self._thread: threading.Thread | None = None

    @property
    def base_url(self) -> str:
        host, port = self.server_address[:2]
        return f"http://{host}:{port}/v1"

    def start(self) -> "MockServer":
        self._thread = threading.Thread(target=self.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self.shutdown()
        self.server_close()
        if self._thread is not None:
            self._thread.join(timeout=5)

    def __enter__(self) -> "MockServer":
        return self.start()

    def __exit__(self, *exc_info) -> None:
        self.stop()


def reference_map(corpus) -> dict[str, str]:
    """Build the echo-reference response map from a corpus.

    Raises:
        ValueError: a segment has no reference to echo.
    """
    responses = {}
    for segment in corpus.segments:
        if segment.reference is None:
            raise ValueError(f"segment {segment.id!r} has no reference")
        responses[segment.id] = segment.reference
    return responses
