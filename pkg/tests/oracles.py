"""Independent oracles the tests check the library against.

coverage_rasterize is the rasterization definition executed plainly: one
flat grid of subsample centers, back-to-front stroke resolution, block
averaging.  No bounding boxes, no incremental compositing — it stays
independent of the fast path it verifies.
"""

from __future__ import annotations

import difflib

import numpy as np

from pensemble.genome import Drawing, Stroke


def _point_segment_dist_sq(xs, ys, a, b):
    ax, ay = a
    bx, by = b
    vx, vy = bx - ax, by - ay
    length_sq = vx * vx + vy * vy
    if length_sq == 0.0:
        return (xs - ax) ** 2 + (ys - ay) ** 2
    t = np.clip(((xs - ax) * vx + (ys - ay) * vy) / length_sq, 0.0, 1.0)
    return (xs - (ax + t * vx)) ** 2 + (ys - (ay + t * vy)) ** 2


def _stroke_covers(xs, ys, stroke: Stroke, width: int, height: int):
    radius = 0.5 * stroke.thickness * min(width, height)
    pts = [(x * width, y * height) for x, y in stroke.points]
    dist_sq = np.full(xs.shape, np.inf)
    for a, b in zip(pts[:-1], pts[1:]):
        dist_sq = np.minimum(dist_sq, _point_segment_dist_sq(xs, ys, a, b))
    return dist_sq <= radius * radius


def coverage_rasterize(drawing: Drawing, width: int, height: int, supersample: int = 16):
    """Brute-force reference rendering at the given supersampling.

    A subsample belongs to the topmost stroke whose polyline lies within
    thickness/2 of its center; unclaimed subsamples show the background.
    """
    s = supersample
    ys, xs = np.meshgrid(
        (np.arange(height * s, dtype=np.float64) + 0.5) / s,
        (np.arange(width * s, dtype=np.float64) + 0.5) / s,
        indexing="ij",
    )
    colors = np.empty((height * s, width * s, 3), dtype=np.float64)
    colors[:, :] = drawing.palette[drawing.background_index]
    claimed = np.zeros(xs.shape, dtype=bool)
    for stroke in reversed(drawing.strokes):
        here = _stroke_covers(xs, ys, stroke, width, height) & ~claimed
        colors[here] = drawing.palette[stroke.color_index]
        claimed |= here
    return colors.reshape(height, s, width, s, 3).mean(axis=3).mean(axis=1)


def _stroke_key(stroke: Stroke) -> str:
    return repr((stroke.points, stroke.thickness, stroke.color_index))


def structural_diff(a: Drawing, b: Drawing) -> dict:
    """Count which genome elements differ between two drawings.

    Returns counts of changed/added/removed strokes (sequence-aligned),
    changed palette entries, plus flags for reordering and background
    change.  A single mutation must touch exactly one of these.
    """
    a_keys = [_stroke_key(s) for s in a.strokes]
    b_keys = [_stroke_key(s) for s in b.strokes]

    order_changed = False
    changed = added = removed = 0
    if a_keys != b_keys and sorted(a_keys) == sorted(b_keys):
        order_changed = True
    else:
        matcher = difflib.SequenceMatcher(a=a_keys, b=b_keys, autojunk=False)
        for op, i1, i2, j1, j2 in matcher.get_opcodes():
            if op == "replace":
                changed += max(i2 - i1, j2 - j1)
            elif op == "delete":
                removed += i2 - i1
            elif op == "insert":
                added += j2 - j1

    palette_changed = sum(1 for ca, cb in zip(a.palette, b.palette) if ca != cb)
    palette_changed += abs(len(a.palette) - len(b.palette))

    return {
        "strokes_changed": changed,
        "strokes_added": added,
        "strokes_removed": removed,
        "palette_changed": palette_changed,
        "order_changed": order_changed,
        "background_changed": a.background_index != b.background_index,
        "aspect_changed": a.aspect != b.aspect,
    }


def touched_element_count(diff: dict) -> int:
    """Total count of genome elements a diff touches (order counts as 1)."""
    return (
        diff["strokes_changed"]
        + diff["strokes_added"]
        + diff["strokes_removed"]
        + diff["palette_changed"]
        + (1 if diff["order_changed"] else 0)
        + (1 if diff["background_changed"] else 0)
        + (1 if diff["aspect_changed"] else 0)
    )


# Hand-computed bilinear upsample of a 2x2 checkerboard [[1,0],[0,1]] to 4x4
# with half-pixel centers: destination column j samples source coordinate
# (j + 0.5)/2 - 0.5 = -0.25, 0.25, 0.75, 1.25, clamped to [0, 1], giving
# per-axis (index, fraction) weights (0,0), (0,.25), (0,.75), (1,0).
BILINEAR_CHECKER_2X2_TO_4X4 = np.array(
    [
        [1.0, 0.75, 0.25, 0.0],
        [0.75, 0.625, 0.375, 0.25],
        [0.25, 0.375, 0.625, 0.75],
        [0.0, 0.25, 0.75, 1.0],
    ]
)
