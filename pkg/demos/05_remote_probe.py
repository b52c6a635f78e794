"""Probe a remote labeler over HTTP.

The wire format is one POST of a base64 PNG to <endpoint>/classify and a
JSON list of label/score pairs back.  Remote taxonomies are their own
world: scores need not sum to one, so results carry a probabilistic flag.
This demo runs a local stub server so it works offline; point ENDPOINT at
a real service to probe it instead.
"""

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np

from pensemble import classify_remote
from pensemble.raster import RasterImage


class StubLabeler(BaseHTTPRequestHandler):
    def log_message(self, *args):
        pass

    def do_POST(self):
        self.rfile.read(int(self.headers.get("Content-Length", 0)))
        body = json.dumps(
            {"labels": [{"name": "Face", "score": 0.93}, {"name": "Eye", "score": 0.88}]}
        ).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)


server = ThreadingHTTPServer(("127.0.0.1", 0), StubLabeler)
threading.Thread(target=server.serve_forever, daemon=True).start()
ENDPOINT = f"http://127.0.0.1:{server.server_address[1]}"

image = RasterImage(np.full((64, 64, 3), 0.5))
result = classify_remote(ENDPOINT, image, timeout=5.0)
print("endpoint:", ENDPOINT)
for name, score in result.labels:
    print(f"  {name}: {score}")
print("probabilistic distribution:", result.probabilistic)

server.shutdown()
