"""Shared fixtures: tiny corpora, temp files, a scriptable embedding server."""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from xltopics import Corpus, Document


@pytest.fixture
def tiny_corpus() -> Corpus:
    return Corpus(
        [
            Document(id="a", lang="en", tokens=("cell", "gene")),
            Document(id="b", lang="zh", tokens=("細胞",)),
        ]
    )


@pytest.fixture
def bilingual_corpus() -> Corpus:
    docs = []
    for i in range(6):
        docs.append(Document(id=f"en{i}", lang="en", tokens=(f"word{i}", "shared")))
    for i in range(6):
        docs.append(Document(id=f"zh{i}", lang="zh", tokens=(f"词{i}", "shared")))
    return Corpus(docs)


def deterministic_vector(text: str, dim: int) -> list[float]:
    """The vector the mock server returns for a text; tests recompute it."""
    raw = text.encode("utf-8")
    base = [
        float(len(raw)),
        float(raw[0]) if raw else 0.0,
        float(raw[-1]) if raw else 0.0,
        float(sum(raw) % 251),
    ]
    while len(base) < dim:
        base.append(float(len(base)))
    return base[:dim]


class ServerScript:
    """Mutable behavior knobs for the mock embedding server.

    ``failures`` is a queue of HTTP status codes returned (one per request)
    before normal serving resumes.  ``mode`` switches response shape bugs on.
    """

    def __init__(self):
        self.dim = 4
        self.requests: list[dict] = []
        self.failures: list[int] = []
        self.mode = "ok"            # ok | short | inconsistent
        self.vec = staticmethod(deterministic_vector)

    @property
    def n_requests(self) -> int:
        return len(self.requests)


class _EmbeddingHandler(BaseHTTPRequestHandler):
    script: ServerScript

    def log_message(self, *args):
        pass

    def _reply(self, status: int, body: bytes):
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_POST(self):
        script = self.script
        length = int(self.headers.get("Content-Length", 0))
        payload = json.loads(self.rfile.read(length))
        request_index = len(script.requests)
        script.requests.append(
            {
                "texts": payload.get("texts"),
                "model": payload.get("model"),
                "auth": self.headers.get("Authorization"),
            }
        )
        if script.failures:
            status = script.failures.pop(0)
            self._reply(status, b'{"error": "scripted failure"}')
            return
        texts = payload["texts"]
        dim = script.dim
        if script.mode == "inconsistent" and request_index > 0:
            dim = script.dim + 1
        vectors = [deterministic_vector(t, dim) for t in texts]
        if script.mode == "short":
            vectors = vectors[:-1]
        self._reply(200, json.dumps({"embeddings": vectors}).encode("utf-8"))


@pytest.fixture
def embed_server():
    """A live localhost embedding endpoint; yields (url, script)."""
    script = ServerScript()
    handler = type("Handler", (_EmbeddingHandler,), {"script": script})
    server = ThreadingHTTPServer(("127.0.0.1", 0), handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield f"http://127.0.0.1:{server.server_port}/embed", script
    finally:
        server.shutdown()
        server.server_close()
