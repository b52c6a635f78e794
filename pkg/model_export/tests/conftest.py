from __future__ import annotations

import pytest

torch = pytest.importorskip("torch")

from model_export import SourceModel, register

TINY_SOURCE = "test:tiny"
TINY_LABELS = ["ant", "bee", "cat", "dog", "elk", "fox"]
TINY_SIZE = 16


def _tiny_model() -> torch.nn.Module:
    torch.manual_seed(777)
    return torch.nn.Sequential(
        torch.nn.Conv2d(3, 6, kernel_size=3, padding=1),
        torch.nn.ReLU(),
        torch.nn.AdaptiveAvgPool2d(2),
        torch.nn.Flatten(),
        torch.nn.Linear(24, len(TINY_LABELS)),
    ).eval()


def _build_tiny() -> SourceModel:
    return SourceModel(
        model=_tiny_model(),
        labels=list(TINY_LABELS),
        input_size=TINY_SIZE,
        resize_mode="direct-resize",
        channel_means=(0.45, 0.45, 0.45),
        channel_stds=(0.25, 0.25, 0.25),
    )


class _NoisyForward(torch.nn.Module):
    """Output depends on fresh randomness, so the exported graph cannot
    reproduce the source pass — exercises verification failure."""

    def forward(self, x):
        flat = x.mean(dim=(2, 3))
        return flat + torch.rand_like(flat)


def _build_noisy() -> SourceModel:
    return SourceModel(
        model=_NoisyForward().eval(),
        labels=["r", "g", "b"],
        input_size=TINY_SIZE,
        resize_mode="direct-resize",
    )


register(TINY_SOURCE, _build_tiny)
register("test:noisy", _build_noisy)
