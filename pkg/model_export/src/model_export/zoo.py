"""Source-model registry.

Maps public zoo identifiers ("torchvision:<name>") to builders that return
the eager model, its label list, and the preprocessing metadata documented
for it.  Builders import their framework lazily so the registry can be
inspected (and extended by tests) without heavyweight imports.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable


@dataclass
class SourceModel:
    """An eager model plus everything the manifest must record about it."""

    model: object  # torch.nn.Module in eval mode
    labels: list[str]
    input_size: int
    resize_mode: str = "resize-shorter-then-center-crop"
    value_range: tuple[float, float] = (0.0, 1.0)
    channel_means: tuple[float, float, float] = (0.0, 0.0, 0.0)
    channel_stds: tuple[float, float, float] = (1.0, 1.0, 1.0)
    channel_order: str = "RGB"
    layout: str = "channels-first"
    output_is_softmaxed: bool = False


_BUILDERS: dict[str, Callable[[], SourceModel]] = {}


def register(identifier: str, builder: Callable[[], SourceModel]) -> None:
    _BUILDERS[identifier] = builder


def available() -> list[str]:
    return sorted(_BUILDERS)


class UnknownSourceError(KeyError):
    pass


def build(identifier: str) -> SourceModel:
    if identifier in _BUILDERS:
        return _BUILDERS[identifier]()
    if identifier.startswith("torchvision:"):
        return _build_torchvision(identifier.split(":", 1)[1])
    raise UnknownSourceError(
        f"unknown source {identifier!r}; use 'torchvision:<model>' or one of {available()}"
    )


def _build_torchvision(name: str) -> SourceModel:
    """Build a pretrained torchvision classifier with its documented
    preprocessing (read from the weights' published transform preset)."""
    import torchvision.models as tv_models

    weights = tv_models.get_model_weights(name).DEFAULT
    model = tv_models.get_model(name, weights=weights).eval()
    preset = weights.transforms()
    return SourceModel(
        model=model,
        labels=list(weights.meta["categories"]),
        input_size=int(preset.crop_size[0]),
        resize_mode="resize-shorter-then-center-crop",
        value_range=(0.0, 1.0),
        channel_means=tuple(float(m) for m in preset.mean),
        channel_stds=tuple(float(s) for s in preset.std),
        channel_order="RGB",
        layout="channels-first",
        output_is_softmaxed=False,
    )
