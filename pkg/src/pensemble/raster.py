"""Deterministic rasterization of stroke genomes.

Strokes are unions of per-segment stadium shapes (round caps and joins):
a subpixel belongs to a stroke iff its center lies within thickness/2 of
the stroke's polyline.  Antialiasing is supersample x supersample box
downsampling of that hard-edged rendering.  Pure function of its inputs;
repeated calls are byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .genome import Drawing, DrawingValidationError, validate

DEFAULT_SUPERSAMPLE = 4


@dataclass
class RasterImage:
    """H x W x 3 float image, values in [0, 1], row-major, RGB."""

    pixels: np.ndarray  # shape (H, W, 3), dtype float64

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def channel_means(self) -> np.ndarray:
        return self.pixels.reshape(-1, 3).mean(axis=0)


def image_from_array(arr: np.ndarray) -> RasterImage:
    """Wrap an array as a RasterImage, checking shape and value range."""
    arr = np.asarray(arr, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected (H, W, 3) array, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"image must be at least 1x1, got shape {arr.shape}")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError("pixel values outside [0, 1]")
    return RasterImage(arr)


def _segment_sq_distance(
    px: np.ndarray, py: np.ndarray, ax: float, ay: float, bx: float, by: float
) -> np.ndarray:
    """Squared distance from each point (px, py) to segment (a, b)."""
    vx = bx - ax
    vy = by - ay
    seg_len_sq = vx * vx + vy * vy
    dx = px - ax
    dy = py - ay
    if seg_len_sq == 0.0:
        return dx * dx + dy * dy
    t = np.clip((dx * vx + dy * vy) / seg_len_sq, 0.0, 1.0)
    ex = dx - t * vx
    ey = dy - t * vy
    return ex * ex + ey * ey


def rasterize(
    drawing: Drawing,
    width: int,
    height: int,
    supersample: int = DEFAULT_SUPERSAMPLE,
) -> RasterImage:
    """Render a drawing to width x height pixels.

    Raises DrawingValidationError for an invalid drawing (the error names
    the offending stroke) and ValueError for bad raster parameters.
    """
    if width < 1 or height < 1:
        raise ValueError(f"width and height must be >= 1, got {width}x{height}")
    if supersample < 1:
        raise ValueError(f"supersample must be >= 1, got {supersample}")
    violations = validate(drawing)
    if violations:
        raise DrawingValidationError(violations)

    s = supersample
    sub_w = width * s
    sub_h = height * s
    canvas = np.empty((sub_h, sub_w, 3), dtype=np.float64)
    canvas[:, :] = drawing.background

    # Subpixel centers in pixel units: (k + 0.5) / s.
    xs = (np.arange(sub_w, dtype=np.float64) + 0.5) / s
    ys = (np.arange(sub_h, dtype=np.float64) + 0.5) / s
    min_dim = min(width, height)

    for stroke in drawing.strokes:
        pts = [(x * width, y * height) for x, y in stroke.points]
        radius = 0.5 * stroke.thickness * min_dim
        r_sq = radius * radius
        color = np.asarray(drawing.palette[stroke.color_index], dtype=np.float64)

        # All segments share the stroke color, so painting them one by one
        # equals painting the stadium union; per-segment bounding boxes
        # keep the touched area small.
        for (ax, ay), (bx, by) in zip(pts[:-1], pts[1:]):
            j0 = max(0, int(np.floor((min(ax, bx) - radius) * s - 0.5)))
            j1 = min(sub_w, int(np.ceil((max(ax, bx) + radius) * s - 0.5)) + 1)
            i0 = max(0, int(np.floor((min(ay, by) - radius) * s - 0.5)))
            i1 = min(sub_h, int(np.ceil((max(ay, by) + radius) * s - 0.5)) + 1)
            if j0 >= j1 or i0 >= i1:
                continue
            gx = xs[j0:j1][None, :]
            gy = ys[i0:i1][:, None]
            covered = _segment_sq_distance(gx, gy, ax, ay, bx, by) <= r_sq
            canvas[i0:i1, j0:j1][covered] = color

    blocks = canvas.reshape(height, s, width, s, 3)
    pixels = blocks.mean(axis=(1, 3))
    # A uniform block's box average is its value exactly; bypass the
    # summation rounding so fully-inked pixels equal the ink color.
    lo = blocks.min(axis=(1, 3))
    uniform = lo == blocks.max(axis=(1, 3))
    pixels[uniform] = lo[uniform]
    return RasterImage(pixels)
