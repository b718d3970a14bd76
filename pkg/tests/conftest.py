from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import pytest

from sit.synthetic import build_synthetic_suite

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def suite():
    return build_synthetic_suite(100)


@pytest.fixture(scope="session")
def small_suite():
    return build_synthetic_suite(10)


class StubServer:
    """Scripted loopback HTTP server for backend and translator tests.

    The script callable receives (path, request_body, call_index) and
    returns (status, payload); dict payloads are JSON-encoded, strings are
    sent raw. Every request is recorded in ``calls``.
    """

    def __init__(self, script):
        self.calls: list[tuple[str, dict]] = []
        self._lock = threading.Lock()
        stub = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                body = json.loads(self.rfile.read(length) or b"{}")
                with stub._lock:
                    index = len(stub.calls)
                    stub.calls.append((self.path, body))
                status, payload = script(self.path, body, index)
                raw = (json.dumps(payload) if isinstance(payload, dict)
                       else payload).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(raw)))
                self.end_headers()
                self.wfile.write(raw)

            def log_message(self, *args):
                pass

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)
        self._thread.start()
        self.url = f"http://127.0.0.1:{self._server.server_address[1]}"

    def close(self):
        self._server.shutdown()
        self._server.server_close()


@pytest.fixture
def http_stub():
    servers = []

    def make(script) -> StubServer:
        server = StubServer(script)
        servers.append(server)
        return server

    yield make
    for server in servers:
        server.close()


@pytest.fixture
def ud_sample_path():
    return FIXTURES / "ud_sample.conllu"
