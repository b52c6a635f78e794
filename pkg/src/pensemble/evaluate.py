"""Transfer and amplification evaluation.

Answers two questions about a finished drawing (rendered, or a photo of a
print loaded from disk): do held-out classifiers also report the target
label (top-k transfer matrix), and how does its target response rank
against real validation images of the class (amplification)?
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .classifiers import ModelManifest, Prediction, load_backend
from .raster import RasterImage, image_from_array

DEFAULT_TOP_K = 5  # matches the reporting convention of the transfer study


def topk(probabilities: np.ndarray, labels: list[str], k: int = DEFAULT_TOP_K) -> list[Prediction]:
    """The k highest-probability labels, descending, ties to the lower id."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    probs = np.asarray(probabilities, dtype=np.float64)
    k = min(k, probs.shape[0])
    order = np.lexsort((np.arange(probs.shape[0]), -probs))
    return [Prediction(int(i), labels[int(i)], float(probs[int(i)])) for i in order[:k]]


def target_rank(probabilities: np.ndarray, target_label_id: int) -> int:
    """1-based position of the target in the descending (prob, -id) order."""
    probs = np.asarray(probabilities, dtype=np.float64)
    p = probs[target_label_id]
    higher = int(np.count_nonzero(probs > p))
    tied_before = int(np.count_nonzero(probs[:target_label_id] == p))
    return 1 + higher + tied_before


@dataclass
class ModelResult:
    name: str
    ensemble_member: bool
    top_k: list[Prediction]
    target_probability: float
    target_rank: int


@dataclass
class TransferReport:
    image_path: str | None
    models: list[ModelResult]
    failures: list[tuple[str, str]]  # (model name, error)
    top1_rate: float | None
    top5_rate: float | None

    def to_dict(self) -> dict:
        entries: list[dict] = []
        for m in self.models:
            entries.append(
                {
                    "name": m.name,
                    "ensemble": m.ensemble_member,
                    "topk": [{"label": p.label_name, "p": p.probability} for p in m.top_k],
                    "target_p": m.target_probability,
                    "target_rank": m.target_rank,
                }
            )
        for name, error in self.failures:
            entries.append({"name": name, "ensemble": False, "error": error})
        return {
            "image": self.image_path,
            "models": entries,
            "summary": {
                "top1_rate": self.top1_rate,
                "top5_rate": self.top5_rate,
                "failed_models": [name for name, _ in self.failures],
            },
        }


def _as_backend(model) -> object:
    """Accept a loaded backend, a ModelManifest, or a manifest path."""
    if hasattr(model, "classify") and hasattr(model, "labels"):
        return model
    if isinstance(model, ModelManifest):
        return load_backend(model)
    return load_backend(str(model))


def transfer_matrix(
    image: RasterImage,
    models: list[tuple[object, int, bool]],
    k: int = DEFAULT_TOP_K,
    image_path: str | None = None,
) -> TransferReport:
    """Classify one image across models and summarize holdout transfer.

    models holds (backend-or-manifest, target_label_id, ensemble_member)
    triples.  Transfer rates are the fraction of non-ensemble (holdout)
    models placing the target at rank 1 / within the top 5; models that
    fail to load are recorded and excluded from the rates.  Rates over
    zero usable holdout models are None (undefined, not 0).
    """
    if not models:
        raise ValueError("transfer_matrix needs at least one model")
    results: list[ModelResult] = []
    failures: list[tuple[str, str]] = []
    for entry in models:
        model, target_label_id, is_ensemble = entry
        name = getattr(model, "name", str(model))
        try:
            backend = _as_backend(model)
            probs = backend.classify(image)
            results.append(
                ModelResult(
                    name=backend.name,
                    ensemble_member=bool(is_ensemble),
                    top_k=topk(probs, backend.labels, k),
                    target_probability=float(probs[target_label_id]),
                    target_rank=target_rank(probs, target_label_id),
                )
            )
        except Exception as exc:
            failures.append((name, str(exc)))

    holdouts = [m for m in results if not m.ensemble_member]
    top1 = top5 = None
    if holdouts:
        top1 = sum(1 for m in holdouts if m.target_rank == 1) / len(holdouts)
        top5 = sum(1 for m in holdouts if m.target_rank <= 5) / len(holdouts)
    return TransferReport(
        image_path=image_path, models=results, failures=failures, top1_rate=top1, top5_rate=top5
    )


@dataclass
class AmplificationResult:
    drawing_score: float
    validation_scores: list[float]
    rank: int
    percentile: float
    skipped: list[tuple[str, str]] = field(default_factory=list)  # (path, reason)

    def to_dict(self) -> dict:
        return {
            "drawing_score": self.drawing_score,
            "rank": self.rank,
            "of": len(self.validation_scores) + 1,
            "percentile": self.percentile,
            "validation_scores": list(self.validation_scores),
            "skipped": [{"path": p, "reason": r} for p, r in self.skipped],
        }


def rank_against(drawing_score: float, validation_scores: list[float]) -> tuple[int, float]:
    """Rank of the drawing among drawing + validation, ties above the drawing.

    Conservative tie rule: a validation image with an equal score counts
    as beating the drawing, so amplification is never overstated.
    """
    rank = 1 + sum(1 for v in validation_scores if v >= drawing_score)
    percentile = sum(1 for v in validation_scores if v < drawing_score) / len(validation_scores)
    return rank, percentile


def amplification_rank(
    image: RasterImage,
    validation_images: list,
    model,
    target_label_id: int,
) -> AmplificationResult:
    """Score the drawing and every validation image for p(target) and rank.

    validation_images entries are RasterImages or file paths; unreadable
    files are skipped with the reason recorded.
    """
    if not validation_images:
        raise ValueError("amplification_rank needs at least one validation image")
    backend = _as_backend(model)

    drawing_score = float(backend.classify(image)[target_label_id])
    validation_scores: list[float] = []
    skipped: list[tuple[str, str]] = []
    for entry in validation_images:
        if isinstance(entry, RasterImage):
            validation_scores.append(float(backend.classify(entry)[target_label_id]))
            continue
        try:
            val = load_image(entry)
        except Exception as exc:
            skipped.append((str(entry), str(exc)))
            continue
        validation_scores.append(float(backend.classify(val)[target_label_id]))
    if not validation_scores:
        raise ValueError("no validation image could be read")

    rank, percentile = rank_against(drawing_score, validation_scores)
    return AmplificationResult(
        drawing_score=drawing_score,
        validation_scores=validation_scores,
        rank=rank,
        percentile=percentile,
        skipped=skipped,
    )


def load_image(path) -> RasterImage:
    """Decode a PNG/JPEG file to an RGB float image in [0, 1]."""
    from PIL import Image as PilImage

    with PilImage.open(path) as img:
        arr = np.asarray(img.convert("RGB"), dtype=np.float64) / 255.0
    return image_from_array(arr)


def save_image(image: RasterImage, path) -> None:
    """Write an 8-bit PNG; exact round trip for images on the 1/255 grid."""
    from PIL import Image as PilImage

    data = np.clip(np.round(image.pixels * 255.0), 0, 255).astype(np.uint8)
    PilImage.fromarray(data, mode="RGB").save(path, format="PNG")


def write_report(report: TransferReport, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")


def write_amplification(result: AmplificationResult, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(result.to_dict(), fh, indent=2)
        fh.write("\n")


def transfer_chart(report: TransferReport, path, target_label: str | None = None) -> None:
    """Emit a static grid of per-model top-k bar charts as a PNG.

    Ensemble members get a shaded background; the target label's bar is
    highlighted wherever it appears.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    models = report.models
    if not models:
        raise ValueError("nothing to chart: report has no successful models")
    cols = min(4, len(models))
    rows = (len(models) + cols - 1) // cols
    fig, axes = plt.subplots(rows, cols, figsize=(4.0 * cols, 2.6 * rows), squeeze=False)
    for ax in axes.flat[len(models) :]:
        ax.axis("off")
    for ax, model in zip(axes.flat, models):
        names = [p.label_name for p in model.top_k][::-1]
        probs = [p.probability for p in model.top_k][::-1]
        colors = [
            "#2ca02c" if target_label is not None and n == target_label else "#7f7f7f"
            for n in names
        ]
        ax.barh(range(len(names)), probs, color=colors)
        ax.set_yticks(range(len(names)), names, fontsize=7)
        ax.set_xlim(0.0, 1.0)
        ax.set_title(f"{model.name} (p={model.target_probability:.3f})", fontsize=9)
        if model.ensemble_member:
            ax.set_facecolor("#fffbe0")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
