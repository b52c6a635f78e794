"""Amplification: does a simplified drawing out-score real class examples?

We rank a drawing's target response against a set of validation images.
Percentile 1.0 means the drawing beat every validation image -- the
response was amplified beyond anything the natural data produces.  Ties
conservatively rank above the drawing so amplification is never overstated.
"""

import json
from pathlib import Path

import numpy as np

from pensemble import amplification_rank
from pensemble.raster import RasterImage

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)


class RedResponder:
    labels = ["background", "target"]
    name = "red-responder"

    def classify(self, image):
        red = float(image.pixels[:, :, 0].mean())
        return np.array([1.0 - red, red])


def flat(red):
    arr = np.zeros((32, 32, 3))
    arr[:, :, 0] = red
    return RasterImage(arr)


# Fifty validation images with graded red content, 0.01 .. 0.50.
validation = [flat(0.01 * (i + 1)) for i in range(50)]

for red, label in ((0.95, "drawing far above the class data"),
                   (0.50, "drawing tied with the best validation image"),
                   (0.001, "drawing below everything")):
    result = amplification_rank(flat(red), validation, RedResponder(), target_label_id=1)
    print(f"{label}: rank {result.rank} of {len(result.validation_scores) + 1}, "
          f"percentile {result.percentile:.2f}")

result = amplification_rank(flat(0.95), validation, RedResponder(), target_label_id=1)
with open(OUT / "amplification.json", "w") as fh:
    json.dump(result.to_dict(), fh, indent=2)
print("wrote", OUT / "amplification.json")
