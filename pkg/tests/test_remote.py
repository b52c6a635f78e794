from __future__ import annotations

import base64
import io
import time

import numpy as np
import pytest

from pensemble.classifiers import (
    RemoteProtocolError,
    RemoteStatusError,
    RemoteTimeoutError,
    classify_remote,
)

from conftest import solid_image


def test_roundtrip_echoes_labels(stub_server):
    state, url = stub_server
    state.labels = [{"name": "face", "score": 0.97}]
    result = classify_remote(url, solid_image(0.5, 0.2, 0.2), timeout=5.0)
    assert result.labels == [("face", 0.97)]
    assert result.probabilistic is False  # 0.97 alone does not sum to 1


def test_request_carries_lossless_png(stub_server):
    state, url = stub_server
    image = solid_image(0.25, 0.5, 0.75, size=4)
    classify_remote(url, image, timeout=5.0)
    from PIL import Image as PilImage

    payload = state.last_request
    assert set(payload) == {"image_png_base64"}
    decoded = PilImage.open(io.BytesIO(base64.b64decode(payload["image_png_base64"])))
    arr = np.asarray(decoded.convert("RGB"), dtype=np.float64) / 255.0
    assert np.max(np.abs(arr - image.pixels)) <= 0.5 / 255.0


def test_probabilistic_flag_when_scores_form_distribution(stub_server):
    state, url = stub_server
    state.labels = [{"name": "a", "score": 0.6}, {"name": "b", "score": 0.4}]
    result = classify_remote(url, solid_image(0.1, 0.1, 0.1), timeout=5.0)
    assert result.probabilistic is True


def test_timeout_after_deadline(stub_server):
    state, url = stub_server
    state.delay = 3.0
    start = time.monotonic()
    with pytest.raises(RemoteTimeoutError) as info:
        classify_remote(url, solid_image(0.1, 0.1, 0.1), timeout=0.5)
    elapsed = time.monotonic() - start
    assert info.value.retryable
    assert elapsed < 2.5  # honored the 0.5 s deadline, not the 3 s sleep


def test_unreachable_endpoint_is_retryable_timeout():
    with pytest.raises(RemoteTimeoutError) as info:
        classify_remote("http://127.0.0.1:9", solid_image(0, 0, 0), timeout=0.5)
    assert info.value.retryable


def test_missing_labels_field_preserves_payload(stub_server):
    state, url = stub_server
    state.mode = "missing-labels"
    with pytest.raises(RemoteProtocolError) as info:
        classify_remote(url, solid_image(0.1, 0.1, 0.1), timeout=5.0)
    assert '"tags"' in info.value.payload


def test_non_json_body_preserves_payload(stub_server):
    state, url = stub_server
    state.mode = "not-json"
    with pytest.raises(RemoteProtocolError) as info:
        classify_remote(url, solid_image(0.1, 0.1, 0.1), timeout=5.0)
    assert info.value.payload == "this is not json"


def test_http_error_status(stub_server):
    state, url = stub_server
    state.mode = "error"
    with pytest.raises(RemoteStatusError) as info:
        classify_remote(url, solid_image(0.1, 0.1, 0.1), timeout=5.0)
    assert info.value.status_code == 500
