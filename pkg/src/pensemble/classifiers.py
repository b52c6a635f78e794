"""Classifier backends behind one interface.

Three kinds:
  * TorchClassifier — portable serialized networks (torch.export .pt2
    or TorchScript files)
    described by JSON manifests that pin the exact input pipeline.
  * ToyClassifier — analytic channel-mean classifier with a closed-form
    softmax, so search/objective/eval tests run against an exact oracle
    with no model files.
  * classify_remote — minimal HTTP client for probing remote labelers
    whose taxonomy and training data are unknown.

Every backend exposes .name, .labels and .classify(image) -> probability
vector over .labels.  Loaded backends are immutable; classify is pure and
safe to call from concurrent workers.
"""

from __future__ import annotations

import base64
import difflib
import io
import json
import os
from dataclasses import dataclass

import numpy as np

from .raster import RasterImage

TOY_TEMPERATURE = 10.0
TOY_LABELS = ("red", "green", "blue")

RESIZE_MODES = ("direct-resize", "resize-shorter-then-center-crop")
CHANNEL_ORDERS = ("RGB", "BGR")
LAYOUTS = ("channels-first", "channels-last")


class ModelLoadError(RuntimeError):
    """A model or manifest could not be loaded or fails its own metadata.

    Raised at load time only; a successfully loaded backend never raises
    this mid-search.
    """


@dataclass(frozen=True)
class PreprocessSpec:
    """Exact input pipeline for one model.

    channel_means/channel_stds are RGB-ordered; normalization happens
    before any BGR reordering.
    """

    input_size: int
    resize_mode: str = "direct-resize"
    value_range: tuple[float, float] = (0.0, 1.0)
    channel_means: tuple[float, float, float] = (0.0, 0.0, 0.0)
    channel_stds: tuple[float, float, float] = (1.0, 1.0, 1.0)
    channel_order: str = "RGB"
    layout: str = "channels-first"

    def __post_init__(self) -> None:
        if self.input_size < 8:
            raise ValueError(f"input_size {self.input_size} must be >= 8")
        if self.resize_mode not in RESIZE_MODES:
            raise ValueError(f"resize_mode {self.resize_mode!r} not one of {RESIZE_MODES}")
        if self.channel_order not in CHANNEL_ORDERS:
            raise ValueError(f"channel_order {self.channel_order!r} not one of {CHANNEL_ORDERS}")
        if self.layout not in LAYOUTS:
            raise ValueError(f"layout {self.layout!r} not one of {LAYOUTS}")
        if any(s <= 0 for s in self.channel_stds):
            raise ValueError("channel_stds must be strictly positive")

    def to_dict(self) -> dict:
        return {
            "input_size": self.input_size,
            "resize_mode": self.resize_mode,
            "value_range": list(self.value_range),
            "channel_means": list(self.channel_means),
            "channel_stds": list(self.channel_stds),
            "channel_order": self.channel_order,
            "layout": self.layout,
        }

    @classmethod
    def from_dict(cls, data: dict) -> PreprocessSpec:
        return cls(
            input_size=int(data["input_size"]),
            resize_mode=data.get("resize_mode", "direct-resize"),
            value_range=tuple(data.get("value_range", (0.0, 1.0))),
            channel_means=tuple(data.get("channel_means", (0.0, 0.0, 0.0))),
            channel_stds=tuple(data.get("channel_stds", (1.0, 1.0, 1.0))),
            channel_order=data.get("channel_order", "RGB"),
            layout=data.get("layout", "channels-first"),
        )


@dataclass
class ModelManifest:
    """On-disk model reference plus its exact input pipeline."""

    name: str
    model_path: str
    labels_path: str
    preprocess: PreprocessSpec
    output_is_probabilities: bool = False

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "model_path": self.model_path,
            "labels_path": self.labels_path,
            "preprocess": self.preprocess.to_dict(),
            "output_is_probabilities": self.output_is_probabilities,
        }


@dataclass
class Prediction:
    label_id: int
    label_name: str
    probability: float


def bilinear_resize(pixels: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Half-pixel-center bilinear resize of an (H, W, C) array.

    Fixed interpolation method for determinism; no antialias filter.
    """
    src_h, src_w = pixels.shape[:2]
    if (src_h, src_w) == (out_h, out_w):
        return pixels.astype(np.float64, copy=True)

    def axis_coords(src: int, dst: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        coords = (np.arange(dst, dtype=np.float64) + 0.5) * (src / dst) - 0.5
        coords = np.clip(coords, 0.0, src - 1.0)
        i0 = np.floor(coords).astype(np.intp)
        frac = coords - i0
        i1 = np.minimum(i0 + 1, src - 1)
        return i0, i1, frac

    y0, y1, fy = axis_coords(src_h, out_h)
    x0, x1, fx = axis_coords(src_w, out_w)
    fy = fy[:, None, None]
    fx = fx[None, :, None]
    p = pixels.astype(np.float64, copy=False)
    top = p[y0][:, x0] * (1.0 - fx) + p[y0][:, x1] * fx
    bottom = p[y1][:, x0] * (1.0 - fx) + p[y1][:, x1] * fx
    return top * (1.0 - fy) + bottom * fy


def preprocess(image: RasterImage, spec: PreprocessSpec) -> np.ndarray:
    """Turn a raster image into the model's input array.

    Bilinear resize per resize_mode, map to value_range, normalize by
    RGB-ordered means/stds, then reorder channels and layout.
    """
    size = spec.input_size
    pixels = image.pixels
    if spec.resize_mode == "direct-resize":
        arr = bilinear_resize(pixels, size, size)
    else:  # resize-shorter-then-center-crop
        h, w = pixels.shape[:2]
        if h <= w:
            new_h, new_w = size, max(size, int(round(w * size / h)))
        else:
            new_h, new_w = max(size, int(round(h * size / w))), size
        arr = bilinear_resize(pixels, new_h, new_w)
        top = (new_h - size) // 2
        left = (new_w - size) // 2
        arr = arr[top : top + size, left : left + size]

    lo, hi = spec.value_range
    arr = arr * (hi - lo) + lo
    means = np.asarray(spec.channel_means, dtype=np.float64)
    stds = np.asarray(spec.channel_stds, dtype=np.float64)
    arr = (arr - means) / stds
    if spec.channel_order == "BGR":
        arr = arr[:, :, ::-1]
    if spec.layout == "channels-first":
        arr = np.transpose(arr, (2, 0, 1))
    return np.ascontiguousarray(arr)


def softmax(logits: np.ndarray) -> np.ndarray:
    z = np.asarray(logits, dtype=np.float64)
    z = z - z.max()
    e = np.exp(z)
    return e / e.sum()


class ToyClassifier:
    """Analytic classifier: logits are TOY_TEMPERATURE x channel means.

    classify(img) == softmax(10 * [mean R, mean G, mean B]) exactly, which
    gives tests a closed-form oracle.  Uses the image as-is (no resize).
    """

    name = "toy"
    labels = list(TOY_LABELS)

    def classify(self, image: RasterImage) -> np.ndarray:
        return softmax(TOY_TEMPERATURE * image.channel_means())


def load_labels(path) -> list[str]:
    """Read newline-delimited label names; line index is the label id."""
    with open(path, encoding="utf-8") as fh:
        labels = [line.rstrip("\n") for line in fh]
    while labels and labels[-1] == "":
        labels.pop()
    if not labels:
        raise ModelLoadError(f"labels file {path} is empty")
    return labels


def resolve_label(labels: list[str], name_or_id: str | int) -> int:
    """Map a label name or numeric id to its id, suggesting near matches."""
    if isinstance(name_or_id, int):
        label_id = name_or_id
    elif name_or_id.lstrip("-").isdigit():
        label_id = int(name_or_id)
    else:
        try:
            return labels.index(name_or_id)
        except ValueError:
            near = difflib.get_close_matches(name_or_id, labels, n=3)
            hint = f"; did you mean {', '.join(repr(n) for n in near)}?" if near else ""
            raise KeyError(f"unknown label {name_or_id!r}{hint}") from None
    if not 0 <= label_id < len(labels):
        raise KeyError(f"label id {label_id} outside [0, {len(labels) - 1}]")
    return label_id


def load_manifest(path) -> ModelManifest:
    """Parse a manifest JSON file, resolving relative paths against it."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ModelLoadError(f"cannot read manifest {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ModelLoadError(f"manifest {path} is not valid JSON: {exc}") from exc
    base = os.path.dirname(os.path.abspath(path))

    def resolve(p: str) -> str:
        return p if os.path.isabs(p) else os.path.join(base, p)

    try:
        manifest = ModelManifest(
            name=data["name"],
            model_path=resolve(data["model_path"]),
            labels_path=resolve(data["labels_path"]),
            preprocess=PreprocessSpec.from_dict(data["preprocess"]),
            output_is_probabilities=bool(data["output_is_probabilities"]),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise ModelLoadError(f"manifest {path} invalid: {exc}") from exc
    for p in (manifest.model_path, manifest.labels_path):
        if not os.path.exists(p):
            raise ModelLoadError(f"manifest {path} references missing file {p}")
    return manifest


def _load_serialized_network(torch, path: str):
    """Load a portable network file: torch.export .pt2 or TorchScript.

    An exported .pt2 graph is already specialized to inference mode;
    TorchScript modules are switched to eval explicitly.
    """
    errors = []
    if path.endswith(".pt2"):
        loaders = (("torch.export", lambda: torch.export.load(path).module()),)
    else:
        loaders = (
            ("torchscript", lambda: torch.jit.load(path, map_location="cpu").eval()),
            ("torch.export", lambda: torch.export.load(path).module()),
        )
    for kind, loader in loaders:
        try:
            return loader()
        except Exception as exc:
            errors.append(f"{kind}: {exc}")
    raise ModelLoadError(f"cannot load model {path}: " + "; ".join(errors))


class TorchClassifier:
    """A portable serialized network plus the manifest-pinned pipeline.

    Accepts torch.export artifacts (.pt2) and TorchScript files.  Loading
    runs a dummy forward pass and rejects any model whose output width
    differs from the label count, so shape mismatches surface at startup
    rather than mid-search.  Inference is reentrant; one loaded module
    serves concurrent classify calls.
    """

    def __init__(self, manifest: ModelManifest):
        try:
            import torch
        except ImportError as exc:
            raise ModelLoadError(
                "torch is required for serialized-network backends (pip install pensemble[torch])"
            ) from exc
        self._torch = torch
        self.manifest = manifest
        self.name = manifest.name
        self.labels = load_labels(manifest.labels_path)
        self._module = _load_serialized_network(torch, manifest.model_path)

        size = manifest.preprocess.input_size
        shape = (1, 3, size, size) if manifest.preprocess.layout == "channels-first" else (1, size, size, 3)
        with torch.no_grad():
            try:
                out = self._module(torch.zeros(shape, dtype=torch.float32))
            except Exception as exc:
                raise ModelLoadError(
                    f"model {manifest.model_path} rejected a dummy {shape} input: {exc}"
                ) from exc
        width = int(np.asarray(self._untuple(out)).reshape(-1).shape[0])
        if width != len(self.labels):
            raise ModelLoadError(
                f"model {manifest.name} output width {width} != label count {len(self.labels)}"
            )

    @staticmethod
    def _untuple(out):
        return out[0] if isinstance(out, (tuple, list)) else out

    def classify(self, image: RasterImage) -> np.ndarray:
        torch = self._torch
        arr = preprocess(image, self.manifest.preprocess)
        batch = torch.from_numpy(arr.astype(np.float32)).unsqueeze(0)
        with torch.no_grad():
            out = self._untuple(self._module(batch))
        vec = np.asarray(out, dtype=np.float64).reshape(-1)
        if self.manifest.output_is_probabilities:
            return vec
        return softmax(vec)


def load_backend(manifest: ModelManifest | str) -> TorchClassifier:
    if isinstance(manifest, (str, os.PathLike)):
        manifest = load_manifest(manifest)
    return TorchClassifier(manifest)


def classify(backend, image: RasterImage) -> np.ndarray:
    """Probability vector over backend.labels for one image."""
    return backend.classify(image)


# --- remote HTTP classifier ---


class RemoteError(RuntimeError):
    retryable = False


class RemoteTimeoutError(RemoteError):
    """Transport-level failure (timeout or unreachable endpoint)."""

    retryable = True


class RemoteStatusError(RemoteError):
    def __init__(self, status_code: int, message: str):
        super().__init__(message)
        self.status_code = status_code


class RemoteProtocolError(RemoteError):
    """Response did not match the wire format; raw payload preserved."""

    def __init__(self, message: str, payload: str):
        super().__init__(message)
        self.payload = payload


@dataclass
class RemoteResult:
    """Label/value pairs from a remote labeler.

    probabilistic is False when the values do not behave like one
    probability distribution (remote taxonomies often score labels
    independently).
    """

    labels: list[tuple[str, float]]
    probabilistic: bool


def encode_png_base64(image: RasterImage) -> str:
    """Losslessly encode an image as base64 PNG (8-bit per channel)."""
    from PIL import Image as PilImage

    data = np.clip(np.round(image.pixels * 255.0), 0, 255).astype(np.uint8)
    buf = io.BytesIO()
    PilImage.fromarray(data, mode="RGB").save(buf, format="PNG")
    return base64.b64encode(buf.getvalue()).decode("ascii")


def classify_remote(endpoint: str, image: RasterImage, timeout: float = 10.0) -> RemoteResult:
    """POST an image to <endpoint>/classify and parse label/value pairs.

    Raises RemoteTimeoutError (retryable) on transport failure,
    RemoteStatusError on non-2xx responses, and RemoteProtocolError (with
    the raw payload attached) when the response doesn't parse.
    """
    import requests

    url = endpoint.rstrip("/") + "/classify"
    body = {"image_png_base64": encode_png_base64(image)}
    try:
        response = requests.post(url, json=body, timeout=timeout)
    except (requests.Timeout, requests.ConnectionError) as exc:
        raise RemoteTimeoutError(f"remote endpoint {url} unreachable: {exc}") from exc

    if not 200 <= response.status_code < 300:
        raise RemoteStatusError(
            response.status_code, f"remote endpoint {url} returned HTTP {response.status_code}"
        )
    try:
        payload = response.json()
        entries = payload["labels"]
        labels = [(str(e["name"]), float(e["score"])) for e in entries]
    except (ValueError, KeyError, TypeError) as exc:
        raise RemoteProtocolError(
            f"malformed response from {url}: {exc}", payload=response.text
        ) from exc

    total = sum(v for _, v in labels)
    probabilistic = bool(
        labels
        and abs(total - 1.0) <= 1e-3
        and all(0.0 <= v <= 1.0 for _, v in labels)
    )
    return RemoteResult(labels=labels, probabilistic=probabilistic)
