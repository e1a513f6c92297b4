"""Littlewood-Paley toolkit: Besov/Triebel-Lizorkin norms on periodic grids."""
from .errors import (
    ConfigError,
    GridMismatch,
    InconsistentPartials,
    InvalidParams,
    LPBKError,
    ValidationFailure,
)
from .operators import (
    MultiplierSpec,
    PartialDerivativeSet,
    bmo_norm,
    fs_vector_check,
    hardy_norm,
    heat,
    lift,
    maximal_op,
    partials_of,
    poincare_reconstruct,
    riesz,
)
from .partition import (
    CutoffProfile,
    DyadicPartition,
    alternative_cutoff,
    build_cutoff,
    build_partition,
    validate_partition,
)
from .spaces import (
    BandDecomposition,
    NormReport,
    SpaceParams,
    alternating_sum_identity,
    band_project,
    decompose,
    difference,
    high_low_split,
    hz_seminorm,
    space_norm,
)
from .spectral import (
    GridSpec,
    SampledField,
    SpectralField,
    apply_multiplier,
    forward_transform,
    inverse_transform,
    lp_norm,
    sample_preset,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "GridMismatch",
    "InconsistentPartials",
    "InvalidParams",
    "LPBKError",
    "ValidationFailure",
    "MultiplierSpec",
    "PartialDerivativeSet",
    "bmo_norm",
    "fs_vector_check",
    "hardy_norm",
    "heat",
    "lift",
    "maximal_op",
    "partials_of",
    "poincare_reconstruct",
    "riesz",
    "CutoffProfile",
    "DyadicPartition",
    "alternative_cutoff",
    "build_cutoff",
    "build_partition",
    "validate_partition",
    "BandDecomposition",
    "NormReport",
    "SpaceParams",
    "alternating_sum_identity",
    "band_project",
    "decompose",
    "difference",
    "high_low_split",
    "hz_seminorm",
    "space_norm",
    "GridSpec",
    "SampledField",
    "SpectralField",
    "apply_multiplier",
    "forward_transform",
    "inverse_transform",
    "lp_norm",
    "sample_preset",
]
