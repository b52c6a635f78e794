"""Export pipeline: eager source model -> portable .pt2 + manifest + labels.

Verification is mandatory and runs before any manifest is written: one
fixed reference image goes through the source model and through the
reloaded exported file, and the export is rejected unless the top-1 labels
agree and probabilities match within 1e-3.  Silent preprocessing or
serialization drift is the dominant failure mode for cross-runtime
transfer claims, so an unverified manifest is worse than none.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import zoo

MAX_ABS_PROB_DIFF = 1e-3
MODEL_FILENAME = "model.pt2"
MANIFEST_FILENAME = "manifest.json"
LABELS_FILENAME = "labels.txt"
REFERENCE_FILENAME = "reference.png"
REPORT_FILENAME = "export_report.json"


class ExportError(RuntimeError):
    pass


class VerificationError(ExportError):
    """Source and exported outputs disagree; no manifest was written."""


@dataclass
class ExportSpec:
    source: str  # zoo identifier, e.g. "torchvision:squeezenet1_1"
    name: str | None = None  # output directory name; defaults from source
    preprocess_overrides: dict = field(default_factory=dict)
    output_is_softmaxed: bool | None = None  # override the zoo's declaration

    def resolved_name(self) -> str:
        if self.name:
            return self.name
        return self.source.split(":", 1)[-1]


@dataclass
class ExportResult:
    name: str
    model_path: Path
    manifest_path: Path
    labels_path: Path
    reference_top1_id: int
    reference_top1_label: str
    max_abs_diff: float


def reference_image(size: int, seed: int = 20260101) -> np.ndarray:
    """Deterministic uint8 noise reference, exactly representable in PNG.

    Noise probes many weight directions at once, which makes verification
    sensitive to serialization drift.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    return rng.integers(0, 256, size=(size, size, 3), dtype=np.uint8)


def _softmax(vec: np.ndarray) -> np.ndarray:
    z = vec - vec.max()
    e = np.exp(z)
    return e / e.sum()


def _probabilities(torch, model, batch, softmaxed: bool) -> np.ndarray:
    with torch.no_grad():
        out = model(batch)
    if isinstance(out, (tuple, list)):
        out = out[0]
    vec = np.asarray(out, dtype=np.float64).reshape(-1)
    return vec if softmaxed else _softmax(vec)


def _input_batch(torch, source: zoo.SourceModel, image: np.ndarray):
    """Preprocess the reference image per the metadata the manifest will
    embed.  The reference is generated at input_size, so resizing and
    cropping are identity here; range mapping and normalization are not."""
    arr = image.astype(np.float64) / 255.0
    lo, hi = source.value_range
    arr = arr * (hi - lo) + lo
    arr = (arr - np.asarray(source.channel_means)) / np.asarray(source.channel_stds)
    if source.channel_order == "BGR":
        arr = arr[:, :, ::-1]
    if source.layout == "channels-first":
        arr = np.transpose(arr, (2, 0, 1))
    return torch.from_numpy(np.ascontiguousarray(arr, dtype=np.float32)).unsqueeze(0)


def export_model(spec: ExportSpec, out_root: Path | str) -> ExportResult:
    """Export one model: serialize, verify, then write manifest + labels.

    Output layout: <out_root>/<name>/{model.pt2, manifest.json, labels.txt,
    reference.png, export_report.json}.  Raises ExportError when the graph
    capture fails (message names the unsupported operator) and
    VerificationError when outputs disagree — in both cases no manifest is
    left behind.
    """
    import torch
    from PIL import Image as PilImage

    source = zoo.build(spec.source)
    for key, value in spec.preprocess_overrides.items():
        if not hasattr(source, key):
            raise ExportError(f"unknown preprocess override {key!r}")
        setattr(source, key, value)
    softmaxed = (
        source.output_is_softmaxed
        if spec.output_is_softmaxed is None
        else spec.output_is_softmaxed
    )

    name = spec.resolved_name()
    out_dir = Path(out_root) / name
    out_dir.mkdir(parents=True, exist_ok=True)
    model_path = out_dir / MODEL_FILENAME
    manifest_path = out_dir / MANIFEST_FILENAME
    manifest_path.unlink(missing_ok=True)  # never leave a stale manifest

    image = reference_image(source.input_size)
    batch = _input_batch(torch, source, image)
    source_probs = _probabilities(torch, source.model, batch, softmaxed)
    if len(source.labels) != source_probs.shape[0]:
        raise ExportError(
            f"{spec.source}: label count {len(source.labels)} != output width {source_probs.shape[0]}"
        )

    try:
        exported = torch.export.export(source.model, (batch,))
        torch.export.save(exported, str(model_path))
    except Exception as exc:
        model_path.unlink(missing_ok=True)
        raise ExportError(f"{spec.source}: export failed: {exc}") from exc

    reloaded = torch.export.load(str(model_path)).module()
    exported_probs = _probabilities(torch, reloaded, batch, softmaxed)

    source_top1 = int(np.argmax(source_probs))
    exported_top1 = int(np.argmax(exported_probs))
    max_abs_diff = float(np.max(np.abs(source_probs - exported_probs)))
    if source_top1 != exported_top1 or max_abs_diff > MAX_ABS_PROB_DIFF:
        model_path.unlink(missing_ok=True)
        raise VerificationError(
            f"{spec.source}: exported model disagrees with source "
            f"(top1 {source_top1} vs {exported_top1}, max abs diff {max_abs_diff:.2e})"
        )

    labels_path = out_dir / LABELS_FILENAME
    labels_path.write_text("\n".join(source.labels) + "\n", encoding="utf-8")
    PilImage.fromarray(image, mode="RGB").save(out_dir / REFERENCE_FILENAME, format="PNG")

    manifest = {
        "name": name,
        "model_path": MODEL_FILENAME,
        "labels_path": LABELS_FILENAME,
        "preprocess": {
            "input_size": source.input_size,
            "resize_mode": source.resize_mode,
            "value_range": list(source.value_range),
            "channel_means": list(source.channel_means),
            "channel_stds": list(source.channel_stds),
            "channel_order": source.channel_order,
            "layout": source.layout,
        },
        "output_is_probabilities": bool(softmaxed),
    }
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    report = {
        "source": spec.source,
        "name": name,
        "reference_image": REFERENCE_FILENAME,
        "reference_top1_id": source_top1,
        "reference_top1_label": source.labels[source_top1],
        "reference_top1_probability": float(source_probs[source_top1]),
        "max_abs_diff": max_abs_diff,
        "torch_version": torch.__version__,
    }
    (out_dir / REPORT_FILENAME).write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

    return ExportResult(
        name=name,
        model_path=model_path,
        manifest_path=manifest_path,
        labels_path=labels_path,
        reference_top1_id=source_top1,
        reference_top1_label=source.labels[source_top1],
        max_abs_diff=max_abs_diff,
    )
