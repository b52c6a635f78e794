"""Build a stroke genome by hand and render it.

A drawing is pure data: a palette, a background index, and ordered
strokes whose coordinates live in [0, 1] so the same genome renders at
any pixel size.  Later strokes paint over earlier ones.
"""

from pathlib import Path

from pensemble import Drawing, Rgb, Stroke, rasterize, save_image, save_svg, to_json, validate

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

ink = Rgb(0.05, 0.05, 0.1)
paper = Rgb(0.96, 0.94, 0.88)
accent = Rgb(0.75, 0.15, 0.1)

drawing = Drawing(
    palette=[paper, ink, accent],
    background_index=0,
    strokes=[
        # A broad arc of three segments...
        Stroke(points=[(0.15, 0.7), (0.35, 0.25), (0.65, 0.25), (0.85, 0.7)], thickness=0.06, color_index=1),
        # ...crossed by a thick accent bar painted on top.
        Stroke(points=[(0.2, 0.55), (0.8, 0.55)], thickness=0.12, color_index=2),
        # Two small ticks, thin and dark.
        Stroke(points=[(0.3, 0.8), (0.35, 0.9)], thickness=0.02, color_index=1),
        Stroke(points=[(0.65, 0.8), (0.7, 0.9)], thickness=0.02, color_index=1),
    ],
)

problems = validate(drawing)
print("validate:", "ok" if not problems else problems)

image = rasterize(drawing, 512, 512)
save_image(image, OUT / "hand_drawing.png")
save_svg(drawing, OUT / "hand_drawing.svg", width_units=1024)
print("wrote", OUT / "hand_drawing.png", "and .svg")
print("genome JSON:", to_json(drawing)[:110], "...")
