"""Bundled mock LLM endpoint for dry runs and tests.

Speaks just enough of the chat-completions protocol: POST /chat/completions
returns a deterministic structured annotation derived from the user message,
so repeated runs over the same document agree exactly. A canned-responses
file can override generation per document text.
"""

from __future__ import annotations

import hashlib
import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .taxonomy import default_taxonomy


def synthesize_payload(text: str, canned: dict | None = None) -> dict:
    if canned and text in canned:
        return canned[text]
    tokens = text.split()
    if not tokens or "no propaganda" in text.lower():
        return {"spans": []}
    labels = default_taxonomy().label_set("split")

    def pick(token: str) -> str:
        digest = hashlib.sha256(token.encode("utf-8")).digest()
        return labels[digest[0] % len(labels)]

    spans = []
    # one span per clause of up to three tokens, capped at four spans
    for start in range(0, min(len(tokens), 12), 3):
        chunk = " ".join(tokens[start:start + 3])
        spans.append({
            "span": chunk,
            "explanation": f"Mock rationale for {chunk!r}.",
            "local_label": pick(chunk),
        })
    return {"spans": spans, "global_label": spans[0]["local_label"]}


class _Handler(BaseHTTPRequestHandler):
    canned: dict | None = None
    fail_first_n: int = 0
    _failures = 0
    _lock = threading.Lock()

    def log_message(self, *args):  # quiet
        pass

    def do_POST(self):
        if not self.path.endswith("/chat/completions"):
            self.send_error(404)
            return
        length = int(self.headers.get("Content-Length", 0))
        body = json.loads(self.rfile.read(length))
        with _Handler._lock:
            if _Handler._failures < self.fail_first_n:
                _Handler._failures += 1
                self.send_error(500, "injected failure")
                return
        user = next(m["content"] for m in body["messages"] if m["role"] == "user")
        payload = synthesize_payload(user, self.canned)
        reply = {
            "id": "mock-1",
            "object": "chat.completion",
            "model": body.get("model", "mock"),
            "choices": [{
                "index": 0,
                "message": {"role": "assistant", "content": json.dumps(payload, ensure_ascii=False)},
                "finish_reason": "stop",
            }],
        }
        data = json.dumps(reply).encode("utf-8")
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)


class MockLLMServer:
    def __init__(self, port: int = 0, canned: dict | None = None, fail_first_n: int = 0):
        handler = type("Handler", (_Handler,), {
            "canned": canned, "fail_first_n": fail_first_n, "_failures": 0,
            "_lock": threading.Lock(),
        })
        self._server = ThreadingHTTPServer(("127.0.0.1", port), handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def base_url(self) -> str:
        host, port = self._server.server_address
        return f"http://{host}:{port}/v1"

    def __enter__(self):
        self._thread.start()
        return self

    def __exit__(self, *exc):
        self._server.shutdown()
        self._server.server_close()


def load_canned(path) -> dict:
    """Canned-responses JSONL: {"text": ..., "payload": {...}} per line."""
    canned = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                rec = json.loads(line)
                canned[rec["text"]] = rec["payload"]
    return canned
