from __future__ import annotations

import json
import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np
import pytest

from pensemble.genome import Drawing, Rgb, Stroke
from pensemble.raster import RasterImage

_ACCEPTANCE_RESULTS: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        _ACCEPTANCE_RESULTS.append((report.nodeid.split("::")[-1], report.outcome))
    elif report.when == "setup" and "test_acceptance" in report.nodeid and report.skipped:
        _ACCEPTANCE_RESULTS.append((report.nodeid.split("::")[-1], "skipped"))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, outcome in _ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{outcome.upper():8s} {name}")


def two_color_drawing(thickness: float = 0.25) -> Drawing:
    """White background, one black horizontal stroke through the middle."""
    return Drawing(
        palette=[Rgb(1.0, 1.0, 1.0), Rgb(0.0, 0.0, 0.0)],
        background_index=0,
        strokes=[Stroke(points=[(0.0, 0.5), (1.0, 0.5)], thickness=thickness, color_index=1)],
    )


def solid_image(r: float, g: float, b: float, size: int = 8) -> RasterImage:
    arr = np.empty((size, size, 3), dtype=np.float64)
    arr[:, :] = (r, g, b)
    return RasterImage(arr)


class _StubState:
    """Mutable behavior knob shared between the fixture and the handler."""

    def __init__(self):
        self.mode = "ok"
        self.labels = [{"name": "face", "score": 0.97}]
        self.delay = 0.0
        self.last_request: dict | None = None


class _StubHandler(BaseHTTPRequestHandler):
    def log_message(self, *args):
        pass

    def do_POST(self):
        state: _StubState = self.server.state
        length = int(self.headers.get("Content-Length", 0))
        raw = self.rfile.read(length)
        try:
            state.last_request = json.loads(raw)
        except ValueError:
            state.last_request = None
        if state.delay:
            time.sleep(state.delay)
        if state.mode == "error":
            self.send_response(500)
            self.end_headers()
            self.wfile.write(b"boom")
            return
        if state.mode == "not-json":
            body = b"this is not json"
        elif state.mode == "missing-labels":
            body = json.dumps({"tags": []}).encode()
        else:
            body = json.dumps({"labels": state.labels}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


@pytest.fixture
def stub_server():
    server = ThreadingHTTPServer(("127.0.0.1", 0), _StubHandler)
    server.state = _StubState()
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield server.state, f"http://127.0.0.1:{server.server_address[1]}"
    finally:
        server.shutdown()
        thread.join(timeout=5)
