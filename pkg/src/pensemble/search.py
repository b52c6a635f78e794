"""Seeded random generation and mutation of drawings, plus the search loop.

The optimizer is randomized hill climbing with stagnation restarts: mutate
the incumbent, keep strict improvements, restart from a fresh random
genome after a configured number of non-improving iterations while always
retaining the global best.

Reproducibility contract: candidate i of iteration t draws its randomness
from a generator keyed by mixing (seed, domain, t, i) through a fixed
64-bit hash, so results are bitwise independent of evaluation parallelism
and worker scheduling.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .genome import MAX_THICKNESS, Drawing, Rgb, Stroke, to_json

MUTATION_OPS = (
    "jitter-point",
    "translate-stroke",
    "change-thickness",
    "change-stroke-color",
    "change-palette-color",
    "add-stroke",
    "remove-stroke",
    "swap-stroke-order",
)

JITTER_SIGMA = 0.05
THICKNESS_SIGMA = 0.03
MIN_THICKNESS = 1.0 / 256.0

_MASK64 = (1 << 64) - 1
# rng stream domains: initial genome, per-candidate mutation, restart genome
_DOMAIN_INIT = 0xA0
_DOMAIN_CANDIDATE = 0xA1
_DOMAIN_RESTART = 0xA2


def _mix64(*parts: int) -> int:
    """splitmix64-style avalanche of an integer tuple into one 64-bit key."""
    h = 0x9E3779B97F4A7C15
    for p in parts:
        h ^= p & _MASK64
        h = (h * 0xBF58476D1CE4E5B9) & _MASK64
        h ^= h >> 27
        h = (h * 0x94D049BB133111EB) & _MASK64
        h ^= h >> 31
    return h


def derive_rng(seed: int, domain: int, iteration: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(_mix64(seed, domain, iteration, index)))


@dataclass
class SearchConfig:
    """Hyperparameters of the random search (none are given by theory; all
    defaults are declared choices surfaced for configuration)."""

    seed: int = 0
    iterations: int = 2000
    candidates_per_iter: int = 1
    stroke_count_bounds: tuple[int, int] = (5, 20)
    points_per_stroke_bounds: tuple[int, int] = (2, 5)
    palette_size: int = 4
    mutation_weights: dict[str, float] = field(
        default_factory=lambda: {op: 1.0 for op in MUTATION_OPS}
    )
    stagnation_restart: int = 250

    def __post_init__(self) -> None:
        lo, hi = self.stroke_count_bounds
        if not (1 <= lo <= hi):
            raise ValueError(f"stroke_count_bounds {self.stroke_count_bounds} must be ordered and >= 1")
        plo, phi = self.points_per_stroke_bounds
        if not (2 <= plo <= phi):
            raise ValueError(f"points_per_stroke_bounds {self.points_per_stroke_bounds} must be ordered and >= 2")
        if self.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if self.candidates_per_iter < 1:
            raise ValueError("candidates_per_iter must be >= 1")
        if self.palette_size < 1:
            raise ValueError("palette_size must be >= 1")
        if self.stagnation_restart < 1:
            raise ValueError("stagnation_restart must be >= 1")
        unknown = set(self.mutation_weights) - set(MUTATION_OPS)
        if unknown:
            raise ValueError(f"unknown mutation ops: {sorted(unknown)}")
        if any(w < 0 for w in self.mutation_weights.values()):
            raise ValueError("mutation weights must be nonnegative")
        if not any(w > 0 for w in self.mutation_weights.values()):
            raise ValueError("at least one mutation weight must be positive")

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "iterations": self.iterations,
            "candidates_per_iter": self.candidates_per_iter,
            "stroke_count_bounds": list(self.stroke_count_bounds),
            "points_per_stroke_bounds": list(self.points_per_stroke_bounds),
            "palette_size": self.palette_size,
            "mutation_weights": dict(self.mutation_weights),
            "stagnation_restart": self.stagnation_restart,
        }

    @classmethod
    def from_dict(cls, data: dict) -> SearchConfig:
        kwargs = dict(data)
        for key in ("stroke_count_bounds", "points_per_stroke_bounds"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        return cls(**kwargs)


@dataclass
class SearchResult:
    best_genome: Drawing
    best_score: float
    trace: list[float]
    evaluations: int


class ObjectiveError(RuntimeError):
    """An objective call failed; carries the genome JSON for reproduction."""

    def __init__(self, message: str, genome_json: str):
        super().__init__(message)
        self.genome_json = genome_json


def _random_thickness(rng: np.random.Generator) -> float:
    # 1 - U maps [0, 1) onto (0, 1], keeping thickness strictly positive.
    return MAX_THICKNESS * (1.0 - rng.random())


def _random_stroke(rng: np.random.Generator, config: SearchConfig) -> Stroke:
    plo, phi = config.points_per_stroke_bounds
    n_points = int(rng.integers(plo, phi + 1))
    points = [(float(x), float(y)) for x, y in rng.random((n_points, 2))]
    return Stroke(
        points=points,
        thickness=_random_thickness(rng),
        color_index=int(rng.integers(config.palette_size)),
    )


def random_genome(rng: np.random.Generator, config: SearchConfig) -> Drawing:
    """Draw a uniform random genome within the configured bounds."""
    lo, hi = config.stroke_count_bounds
    n_strokes = int(rng.integers(lo, hi + 1))
    palette = [Rgb(float(r), float(g), float(b)) for r, g, b in rng.random((config.palette_size, 3))]
    background_index = int(rng.integers(config.palette_size))
    strokes = [_random_stroke(rng, config) for _ in range(n_strokes)]
    return Drawing(palette=palette, background_index=background_index, strokes=strokes)


def _clamp01(v: float) -> float:
    return min(1.0, max(0.0, v))


def _jitter_point(point: tuple[float, float], delta: np.ndarray) -> tuple[float, float]:
    moved = (_clamp01(point[0] + delta[0]), _clamp01(point[1] + delta[1]))
    if moved == point:  # pinned against the canvas edge; push the other way
        moved = (_clamp01(point[0] - delta[0]), _clamp01(point[1] - delta[1]))
    return moved


def _feasible_ops(genome: Drawing, config: SearchConfig) -> list[str]:
    lo, hi = config.stroke_count_bounds
    n = len(genome.strokes)
    ops = []
    for op in MUTATION_OPS:
        if config.mutation_weights.get(op, 0.0) <= 0.0:
            continue
        if op == "add-stroke" and n >= hi:
            continue
        if op == "remove-stroke" and n <= lo:
            continue
        if op == "swap-stroke-order" and n < 2:
            continue
        if op == "change-stroke-color" and config.palette_size < 2:
            continue
        ops.append(op)
    return ops


def mutate(genome: Drawing, rng: np.random.Generator, config: SearchConfig) -> Drawing:
    """Apply exactly one mutation op, sampled by mutation_weights.

    Ops infeasible in the current state (add at the max stroke bound,
    remove at the min, swap with fewer than two strokes) are resampled
    away; the output always validates and respects the stroke bounds.
    """
    out = genome.copy()
    ops = _feasible_ops(genome, config)
    if not ops:
        ops = ["jitter-point"]
    weights = np.array([config.mutation_weights.get(op, 1.0) for op in ops], dtype=np.float64)
    if weights.sum() <= 0.0:
        weights = np.ones_like(weights)
    op = ops[int(rng.choice(len(ops), p=weights / weights.sum()))]

    if op == "jitter-point":
        si = int(rng.integers(len(out.strokes)))
        stroke = out.strokes[si]
        pi = int(rng.integers(len(stroke.points)))
        delta = rng.normal(0.0, JITTER_SIGMA, size=2)
        stroke.points[pi] = _jitter_point(stroke.points[pi], delta)
    elif op == "translate-stroke":
        si = int(rng.integers(len(out.strokes)))
        stroke = out.strokes[si]
        delta = rng.normal(0.0, JITTER_SIGMA, size=2)
        moved = [(_clamp01(x + delta[0]), _clamp01(y + delta[1])) for x, y in stroke.points]
        if moved == stroke.points:
            moved = [(_clamp01(x - delta[0]), _clamp01(y - delta[1])) for x, y in stroke.points]
        stroke.points = moved
    elif op == "change-thickness":
        si = int(rng.integers(len(out.strokes)))
        stroke = out.strokes[si]
        delta = rng.normal(0.0, THICKNESS_SIGMA)
        new = min(MAX_THICKNESS, max(MIN_THICKNESS, stroke.thickness + delta))
        if new == stroke.thickness:
            new = min(MAX_THICKNESS, max(MIN_THICKNESS, stroke.thickness - delta))
        stroke.thickness = new
    elif op == "change-stroke-color":
        si = int(rng.integers(len(out.strokes)))
        stroke = out.strokes[si]
        others = [c for c in range(config.palette_size) if c != stroke.color_index]
        stroke.color_index = int(others[int(rng.integers(len(others)))])
    elif op == "change-palette-color":
        ci = int(rng.integers(config.palette_size))
        out.palette[ci] = Rgb(*(float(v) for v in rng.random(3)))
    elif op == "add-stroke":
        pos = int(rng.integers(len(out.strokes) + 1))
        out.strokes.insert(pos, _random_stroke(rng, config))
    elif op == "remove-stroke":
        out.strokes.pop(int(rng.integers(len(out.strokes))))
    elif op == "swap-stroke-order":
        i, j = (int(v) for v in rng.choice(len(out.strokes), size=2, replace=False))
        out.strokes[i], out.strokes[j] = out.strokes[j], out.strokes[i]
    return out


def _evaluate(
    objective: Callable[[Drawing], float],
    genomes: Sequence[Drawing],
    executor: ThreadPoolExecutor | None,
) -> list[float]:
    def call(genome: Drawing) -> float:
        try:
            return float(objective(genome))
        except Exception as exc:
            raise ObjectiveError(
                f"objective failed: {exc}", genome_json=to_json(genome)
            ) from exc

    if executor is None or len(genomes) == 1:
        return [call(g) for g in genomes]
    return list(executor.map(call, genomes))


def hill_climb(
    objective: Callable[[Drawing], float],
    config: SearchConfig,
    workers: int = 1,
) -> SearchResult:
    """Maximize objective over drawings by randomized hill climbing.

    The incumbent is replaced only on strict improvement (ties keep it;
    equal-scoring candidates within an iteration resolve to the lowest
    index).  After stagnation_restart non-improving iterations the search
    restarts from a fresh random genome, retaining the global best.  The
    result is bitwise independent of the worker count.
    """
    seed = config.seed
    incumbent = random_genome(derive_rng(seed, _DOMAIN_INIT, 0, 0), config)

    executor = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        inc_score = _evaluate(objective, [incumbent], executor)[0]
        evaluations = 1
        best_genome, best_score = incumbent, inc_score
        trace = [best_score]
        stagnation = 0

        for t in range(config.iterations):
            rngs = [
                derive_rng(seed, _DOMAIN_CANDIDATE, t, i)
                for i in range(config.candidates_per_iter)
            ]
            candidates = [mutate(incumbent, r, config) for r in rngs]
            scores = _evaluate(objective, candidates, executor)
            evaluations += len(candidates)

            top = max(range(len(scores)), key=lambda i: (scores[i], -i))
            if scores[top] > inc_score:
                incumbent, inc_score = candidates[top], scores[top]
                stagnation = 0
            else:
                stagnation += 1

            if inc_score > best_score:
                best_genome, best_score = incumbent, inc_score

            if stagnation >= config.stagnation_restart:
                # Fresh start; its score stays unevaluated (-inf) so the
                # next iteration's best candidate always replaces it and
                # the evaluation accounting stays 1 + iterations*candidates.
                incumbent = random_genome(derive_rng(seed, _DOMAIN_RESTART, t, 0), config)
                inc_score = -math.inf
                stagnation = 0

            trace.append(best_score)
    finally:
        if executor is not None:
            executor.shutdown(wait=False)

    return SearchResult(
        best_genome=best_genome,
        best_score=best_score,
        trace=trace,
        evaluations=evaluations,
    )


def trace_to_csv(trace: Sequence[float]) -> str:
    """Render a best-so-far trace as CSV (iteration, best_score)."""
    lines = ["iteration,best_score"]
    lines.extend(f"{i},{score!r}" for i, score in enumerate(trace))
    return "\n".join(lines) + "\n"
