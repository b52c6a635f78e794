"""Stroke-drawing genomes: palette, background, and ordered polyline strokes.

A drawing is the search variable — everything here is plain data in
normalized coordinates so one genome renders at any pixel size.  Strokes
are opaque and drawn in painter's order (later strokes over earlier).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import NamedTuple

GENOME_FORMAT_VERSION = 1

# Thickness is a fraction of min(canvas width, height).  The cap stops
# degenerate all-ink canvases from dominating search.
MAX_THICKNESS = 0.25


class Rgb(NamedTuple):
    """One palette color, channels in [0, 1]."""

    r: float
    g: float
    b: float


@dataclass
class Stroke:
    """A round-capped, round-joined thick polyline.

    points: ordered 2D points, each coordinate in [0, 1].
    thickness: fraction of min(canvas width, height), in (0, 0.25].
    color_index: index into the owning drawing's palette.
    """

    points: list[tuple[float, float]]
    thickness: float
    color_index: int

    def copy(self) -> Stroke:
        return Stroke(list(self.points), self.thickness, self.color_index)


@dataclass
class Drawing:
    """Palette plus ordered strokes; the genotype the search mutates."""

    palette: list[Rgb]
    background_index: int
    strokes: list[Stroke]
    aspect: float = 1.0

    def copy(self) -> Drawing:
        return Drawing(
            palette=list(self.palette),
            background_index=self.background_index,
            strokes=[s.copy() for s in self.strokes],
            aspect=self.aspect,
        )

    @property
    def background(self) -> Rgb:
        return self.palette[self.background_index]


@dataclass
class Violation:
    """One invariant violation; stroke_index is None for drawing-level issues."""

    field: str
    message: str
    stroke_index: int | None = None

    def __str__(self) -> str:
        where = "drawing" if self.stroke_index is None else f"stroke {self.stroke_index}"
        return f"{where}.{self.field}: {self.message}"


class DrawingValidationError(ValueError):
    """Raised when an operation is handed a drawing that fails validate()."""

    def __init__(self, violations: list[Violation]):
        self.violations = violations
        super().__init__("; ".join(str(v) for v in violations))


def validate(
    drawing: Drawing,
    stroke_count_bounds: tuple[int, int] | None = None,
) -> list[Violation]:
    """Return every invariant violation (empty list means the drawing is ok).

    stroke_count_bounds, when given, additionally checks the configured
    [min, max] stroke-count window.
    """
    out: list[Violation] = []
    if not drawing.palette:
        out.append(Violation("palette", "palette must have at least one color"))
    for ci, color in enumerate(drawing.palette):
        for ch, v in zip("rgb", color):
            if not 0.0 <= v <= 1.0:
                out.append(Violation("palette", f"color {ci} channel {ch}={v!r} outside [0, 1]"))
    n_colors = len(drawing.palette)
    if not 0 <= drawing.background_index < max(n_colors, 1):
        out.append(
            Violation("background_index", f"{drawing.background_index} invalid for palette of {n_colors}")
        )
    if not drawing.aspect > 0.0:
        out.append(Violation("aspect", f"aspect {drawing.aspect!r} must be positive"))

    if stroke_count_bounds is not None:
        lo, hi = stroke_count_bounds
        if not lo <= len(drawing.strokes) <= hi:
            out.append(
                Violation("strokes", f"stroke count {len(drawing.strokes)} outside [{lo}, {hi}]")
            )

    for si, stroke in enumerate(drawing.strokes):
        if len(stroke.points) < 2:
            out.append(Violation("points", f"needs >= 2 points, has {len(stroke.points)}", si))
        for pi, (x, y) in enumerate(stroke.points):
            if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
                out.append(Violation("points", f"point {pi} ({x!r}, {y!r}) outside [0, 1]^2", si))
        if not 0.0 < stroke.thickness <= MAX_THICKNESS:
            out.append(
                Violation("thickness", f"{stroke.thickness!r} outside (0, {MAX_THICKNESS}]", si)
            )
        if not 0 <= stroke.color_index < max(n_colors, 1):
            out.append(Violation("color_index", f"{stroke.color_index} invalid for palette of {n_colors}", si))
    return out


def require_valid(drawing: Drawing) -> None:
    violations = validate(drawing)
    if violations:
        raise DrawingValidationError(violations)


# --- genome JSON (field names are a fixed external interface) ---


def to_dict(drawing: Drawing) -> dict:
    return {
        "version": GENOME_FORMAT_VERSION,
        "palette": [[c.r, c.g, c.b] for c in drawing.palette],
        "background_index": drawing.background_index,
        "aspect": drawing.aspect,
        "strokes": [
            {
                "points": [[x, y] for x, y in s.points],
                "thickness": s.thickness,
                "color_index": s.color_index,
            }
            for s in drawing.strokes
        ],
    }


def from_dict(data: dict) -> Drawing:
    version = data.get("version", GENOME_FORMAT_VERSION)
    if version != GENOME_FORMAT_VERSION:
        raise ValueError(f"unsupported genome version {version!r}")
    return Drawing(
        palette=[Rgb(float(r), float(g), float(b)) for r, g, b in data["palette"]],
        background_index=int(data["background_index"]),
        aspect=float(data.get("aspect", 1.0)),
        strokes=[
            Stroke(
                points=[(float(x), float(y)) for x, y in s["points"]],
                thickness=float(s["thickness"]),
                color_index=int(s["color_index"]),
            )
            for s in data["strokes"]
        ],
    )


def to_json(drawing: Drawing) -> str:
    """Canonical JSON serialization; floats keep full round-trip precision."""
    return json.dumps(to_dict(drawing), sort_keys=True)


def from_json(text: str) -> Drawing:
    return from_dict(json.loads(text))


def save_genome(drawing: Drawing, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_json(drawing))
        fh.write("\n")


def load_genome(path) -> Drawing:
    with open(path, encoding="utf-8") as fh:
        return from_json(fh.read())
