"""Transfer matrix: how well does one image carry a target label across
models it was never optimized against?

Thirteen stub classifiers stand in for a model zoo; six are flagged as the
ensemble the image was tuned on, the other seven are holdouts.  The report
computes top-1/top-5 transfer rates over the holdouts only.
"""

import json
from pathlib import Path

import numpy as np

from pensemble import rasterize, transfer_matrix
from pensemble.genome import Drawing, Rgb, Stroke

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)


class StubModel:
    """Scores by red dominance; sharper for ensemble members."""

    def __init__(self, name, sharpness, n_labels=10, target=3):
        self.name = name
        self.labels = [f"class{i}" for i in range(n_labels)]
        self.sharpness = sharpness
        self.target = target

    def classify(self, image):
        red = image.pixels[:, :, 0].mean() - image.pixels[:, :, 1:].mean()
        logits = np.zeros(len(self.labels))
        logits[self.target] = self.sharpness * red
        e = np.exp(logits - logits.max())
        return e / e.sum()


drawing = Drawing(
    palette=[Rgb(0.9, 0.1, 0.1), Rgb(0.7, 0.05, 0.05)],
    background_index=0,
    strokes=[Stroke(points=[(0.2, 0.2), (0.8, 0.8)], thickness=0.2, color_index=1)],
)
image = rasterize(drawing, 128, 128)

TARGET = 3
models = [(StubModel(f"m{i:02d}", sharpness=20 if i < 6 else 12), TARGET, i < 6) for i in range(13)]
report = transfer_matrix(image, models, k=5)

print(f"{'model':6s} {'ensemble':8s} {'p(target)':>10s} {'rank':>5s}")
for m in report.models:
    print(f"{m.name:6s} {str(m.ensemble_member):8s} {m.target_probability:10.4f} {m.target_rank:5d}")
print(f"holdout top-1 rate: {report.top1_rate}  top-5 rate: {report.top5_rate}")

with open(OUT / "transfer_report.json", "w") as fh:
    json.dump(report.to_dict(), fh, indent=2)
print("wrote", OUT / "transfer_report.json")

try:
    from pensemble.evaluate import transfer_chart

    transfer_chart(report, OUT / "transfer_chart.png", target_label=f"class{TARGET}")
    print("wrote", OUT / "transfer_chart.png")
except ImportError:
    print("matplotlib not installed; skipping the chart")
