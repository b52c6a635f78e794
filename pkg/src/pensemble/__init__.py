"""pensemble — evolve abstract stroke drawings against classifier ensembles.

Drawings are stroke genomes in normalized coordinates; randomized hill
climbing maximizes the target-class response of an ensemble of image
classifiers; evaluation measures transfer to held-out models and ranks
the drawing's response against real validation images.
"""

__version__ = "0.1.0"

from .classifiers import (
    ModelLoadError,
    ModelManifest,
    Prediction,
    PreprocessSpec,
    RemoteProtocolError,
    RemoteResult,
    RemoteStatusError,
    RemoteTimeoutError,
    ToyClassifier,
    TorchClassifier,
    classify,
    classify_remote,
    load_backend,
    load_labels,
    load_manifest,
    preprocess,
    resolve_label,
    softmax,
)
from .evaluate import (
    AmplificationResult,
    TransferReport,
    amplification_rank,
    load_image,
    save_image,
    topk,
    transfer_matrix,
)
from .genome import (
    Drawing,
    DrawingValidationError,
    Rgb,
    Stroke,
    Violation,
    from_json,
    load_genome,
    save_genome,
    to_json,
    validate,
)
from .objective import EnsembleMember, EnsembleScore, ObjectiveConfig, make_objective, score
from .raster import RasterImage, image_from_array, rasterize
from .search import (
    MUTATION_OPS,
    ObjectiveError,
    SearchConfig,
    SearchResult,
    derive_rng,
    hill_climb,
    mutate,
    random_genome,
)
from .svg import parse_svg, save_svg, to_svg

__all__ = [
    "AmplificationResult",
    "Drawing",
    "DrawingValidationError",
    "EnsembleMember",
    "EnsembleScore",
    "ModelLoadError",
    "ModelManifest",
    "MUTATION_OPS",
    "ObjectiveConfig",
    "ObjectiveError",
    "Prediction",
    "PreprocessSpec",
    "RasterImage",
    "RemoteProtocolError",
    "RemoteResult",
    "RemoteStatusError",
    "RemoteTimeoutError",
    "Rgb",
    "SearchConfig",
    "SearchResult",
    "Stroke",
    "TorchClassifier",
    "ToyClassifier",
    "TransferReport",
    "Violation",
    "amplification_rank",
    "classify",
    "classify_remote",
    "derive_rng",
    "from_json",
    "hill_climb",
    "image_from_array",
    "load_backend",
    "load_genome",
    "load_image",
    "load_labels",
    "load_manifest",
    "make_objective",
    "mutate",
    "parse_svg",
    "preprocess",
    "random_genome",
    "rasterize",
    "resolve_label",
    "save_genome",
    "save_image",
    "save_svg",
    "score",
    "softmax",
    "to_json",
    "to_svg",
    "topk",
    "transfer_matrix",
    "validate",
]
