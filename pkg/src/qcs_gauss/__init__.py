"""Quadrature coherence scale of states whose Wigner function is a sum of Gaussians."""

from .channels import GaussianChannel, apply, compose, displacement, identity, loss, rotation, squeezing
from .core import (
    Diagnostics,
    GaussianSumState,
    GaussianTerm,
    OverlapDatum,
    QcsReport,
    grad_overlap,
    moments,
    pairwise_overlap,
    purity,
    qcs,
    qcs_gaussian,
    qcs_pure_from_covariance,
    qcs_squared,
    validate,
    wigner,
    wigner_eval,
    wigner_gradient,
)
from .errors import (
    BranchWarning,
    DimensionMismatch,
    GridTooCoarse,
    HermiticityViolation,
    NonPositiveDefinite,
    PurityOutOfRange,
    QcsError,
    SingularCovariance,
    SingularPairSum,
    TermCapExceeded,
    TruncationTooTight,
)
from .states import breed, cat, coherent, gkp, squeezed_vacuum, vacuum

__all__ = [
    "BranchWarning",
    "Diagnostics",
    "DimensionMismatch",
    "GaussianChannel",
    "GaussianSumState",
    "GaussianTerm",
    "GridTooCoarse",
    "HermiticityViolation",
    "NonPositiveDefinite",
    "OverlapDatum",
    "PurityOutOfRange",
    "QcsError",
    "QcsReport",
    "SingularCovariance",
    "SingularPairSum",
    "TermCapExceeded",
    "TruncationTooTight",
    "apply",
    "breed",
    "cat",
    "coherent",
    "compose",
    "displacement",
    "gkp",
    "grad_overlap",
    "identity",
    "loss",
    "moments",
    "pairwise_overlap",
    "purity",
    "qcs",
    "qcs_gaussian",
    "qcs_pure_from_covariance",
    "qcs_squared",
    "rotation",
    "squeezed_vacuum",
    "squeezing",
    "vacuum",
    "validate",
    "wigner",
    "wigner_eval",
    "wigner_gradient",
]
