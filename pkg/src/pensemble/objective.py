"""The scalar objective: ensemble target probabilities, aggregated.

A drawing is rasterized once at render_size; each ensemble member then
applies its own preprocessing, classifies, and reports the probability of
its target label (label spaces may differ per member, so the target is
per-member).  Aggregation is a weighted arithmetic mean by default, with
weighted geometric mean and worst-case min as alternatives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .genome import Drawing
from .raster import DEFAULT_SUPERSAMPLE, rasterize

AGGREGATIONS = ("mean", "min", "geometric-mean")

# Floor for the geometric mean so one zero member cannot annihilate the
# objective's gradient-free search signal.
GEO_MEAN_FLOOR = 1e-12

DEFAULT_RENDER_SIZE = 512


@dataclass
class EnsembleMember:
    backend: object  # anything with .name, .labels, .classify(image)
    target_label_id: int
    weight: float = 1.0

    def __post_init__(self) -> None:
        if self.weight < 0:
            raise ValueError(f"member weight {self.weight} must be >= 0")
        if not 0 <= self.target_label_id < len(self.backend.labels):
            raise ValueError(
                f"target_label_id {self.target_label_id} invalid for "
                f"{getattr(self.backend, 'name', 'backend')} with {len(self.backend.labels)} labels"
            )


@dataclass
class ObjectiveConfig:
    members: list[EnsembleMember]
    aggregation: str = "mean"
    render_size: int = DEFAULT_RENDER_SIZE
    supersample: int = DEFAULT_SUPERSAMPLE

    def __post_init__(self) -> None:
        if not self.members:
            raise ValueError("objective needs at least one ensemble member")
        if not any(m.weight > 0 for m in self.members):
            raise ValueError("at least one ensemble member must have weight > 0")
        if self.aggregation not in AGGREGATIONS:
            raise ValueError(f"aggregation {self.aggregation!r} not one of {AGGREGATIONS}")
        if self.render_size < 1:
            raise ValueError("render_size must be >= 1")


@dataclass
class EnsembleScore:
    aggregate: float
    per_member: list[tuple[str, float]]


class MemberError(RuntimeError):
    """A backend failed while scoring; carries the member name."""

    def __init__(self, member_name: str, cause: Exception):
        super().__init__(f"ensemble member {member_name!r} failed: {cause}")
        self.member_name = member_name


def aggregate_probabilities(probs: list[float], weights: list[float], aggregation: str) -> float:
    active = [(p, w) for p, w in zip(probs, weights) if w > 0]
    if aggregation == "mean":
        total = sum(w for _, w in active)
        return sum(p * w for p, w in active) / total
    if aggregation == "min":
        return min(p for p, _ in active)
    # geometric-mean
    total = sum(w for _, w in active)
    log_sum = sum(w * math.log(max(p, GEO_MEAN_FLOOR)) for p, w in active)
    return math.exp(log_sum / total)


def score(drawing: Drawing, config: ObjectiveConfig) -> EnsembleScore:
    """Rasterize once, score every member, aggregate.

    Pure in (drawing, config); backend failures propagate as MemberError.
    """
    width = config.render_size
    height = max(1, round(config.render_size / drawing.aspect))
    image = rasterize(drawing, width, height, supersample=config.supersample)

    per_member: list[tuple[str, float]] = []
    for member in config.members:
        name = getattr(member.backend, "name", "backend")
        try:
            probs = member.backend.classify(image)
        except Exception as exc:
            raise MemberError(name, exc) from exc
        per_member.append((name, float(probs[member.target_label_id])))

    aggregate = aggregate_probabilities(
        [p for _, p in per_member], [m.weight for m in config.members], config.aggregation
    )
    return EnsembleScore(aggregate=aggregate, per_member=per_member)


def make_objective(config: ObjectiveConfig) -> Callable[[Drawing], float]:
    """Adapt an ObjectiveConfig into the Drawing -> float the search wants."""

    def objective(drawing: Drawing) -> float:
        return score(drawing, config).aggregate

    return objective
