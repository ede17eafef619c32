"""Compressed sensing with frames: analysis l1 recovery under anisotropic,
variable-density sampling, with coherence diagnostics, dual certificates and
seeded experiment drivers."""

from . import diagnostics, experiments, linops, sampling, solver, transforms
from .errors import AnisoCSError
from .linops import DenseOperator, FrameBundle, make_bundle

__version__ = "0.1.0"

__all__ = [
    "AnisoCSError",
    "DenseOperator",
    "FrameBundle",
    "make_bundle",
    "diagnostics",
    "experiments",
    "linops",
    "sampling",
    "solver",
    "transforms",
]
