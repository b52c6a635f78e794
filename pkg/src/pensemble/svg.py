"""SVG 1.1 export of stroke genomes — the print-ready vector path.

The emitted document holds a background rectangle plus one round-capped,
round-joined <path> per stroke.  The genome itself travels inside a
metadata comment, so parse_svg recovers the exact drawing (float-lossless)
without re-deriving geometry from path data.
"""

from __future__ import annotations

import re

from .genome import (
    Drawing,
    DrawingValidationError,
    Rgb,
    from_json,
    to_json,
    validate,
)

_GENOME_COMMENT = re.compile(r"<!--genome:(.*?)-->", re.DOTALL)


def _hex_color(color: Rgb) -> str:
    r, g, b = (int(round(c * 255)) for c in color)
    return f"#{r:02x}{g:02x}{b:02x}"


def _fmt(value: float) -> str:
    return f"{value:.6f}".rstrip("0").rstrip(".")


def to_svg(drawing: Drawing, width_units: float = 1024.0) -> str:
    """Serialize a drawing as a standalone UTF-8 SVG 1.1 document.

    Coordinates and stroke widths are scaled by width_units (height
    follows the drawing's aspect ratio).
    """
    violations = validate(drawing)
    if violations:
        raise DrawingValidationError(violations)

    w = float(width_units)
    h = w / drawing.aspect
    min_dim = min(w, h)

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(w)}" height="{_fmt(h)}" viewBox="0 0 {_fmt(w)} {_fmt(h)}">',
        f"<!--genome:{to_json(drawing)}-->",
        f'<rect x="0" y="0" width="{_fmt(w)}" height="{_fmt(h)}" '
        f'fill="{_hex_color(drawing.background)}"/>',
    ]
    for stroke in drawing.strokes:
        cmds = [f"M {_fmt(stroke.points[0][0] * w)} {_fmt(stroke.points[0][1] * h)}"]
        cmds.extend(f"L {_fmt(x * w)} {_fmt(y * h)}" for x, y in stroke.points[1:])
        lines.append(
            f'<path d="{" ".join(cmds)}" fill="none" '
            f'stroke="{_hex_color(drawing.palette[stroke.color_index])}" '
            f'stroke-width="{_fmt(stroke.thickness * min_dim)}" '
            f'stroke-linecap="round" stroke-linejoin="round"/>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def parse_svg(text: str) -> Drawing:
    """Recover the drawing embedded by to_svg.

    Lossless inverse of to_svg: reads the genome metadata comment rather
    than reconstructing from (rounded) path geometry.
    """
    match = _GENOME_COMMENT.search(text)
    if match is None:
        raise ValueError("no genome metadata comment found in SVG")
    return from_json(match.group(1))


def save_svg(drawing: Drawing, path, width_units: float = 1024.0) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_svg(drawing, width_units))
