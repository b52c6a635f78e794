"""Offline tooling: public pretrained classifiers -> portable model dirs.

Each export produces models/<name>/{model.pt2, manifest.json, labels.txt}
plus a verification report; the manifest follows the shared schema the
drawing toolkit consumes.
"""

__version__ = "0.1.0"

from .export import (
    ExportError,
    ExportResult,
    ExportSpec,
    VerificationError,
    export_model,
    reference_image,
)
from .zoo import SourceModel, UnknownSourceError, available, build, register

__all__ = [
    "ExportError",
    "ExportResult",
    "ExportSpec",
    "SourceModel",
    "UnknownSourceError",
    "VerificationError",
    "available",
    "build",
    "export_model",
    "reference_image",
    "register",
]
