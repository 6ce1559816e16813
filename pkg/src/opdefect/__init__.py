"""Numerical workbench for elementary-operator defects and the (m, P) operator classes."""

from .calculus import DefectSequence, defect, defect_sequence, power_pair_defect, tilde_defect
from .classes import ClassReport, StabilityReport, classify, is_order_preserving_pair, stability
from .errors import (
    ConsistencyError,
    ContractViolation,
    DimensionMismatch,
    DomainError,
    IllConditionedDecomposition,
    OpDefectError,
)
from .linalg import douglas_factor, hermitian_eig, positive_sqrt, psd_check, spectral_radius
from .structure import (
    DunfordPair,
    SimilarityWitness,
    SpectralSplit,
    contraction_extract,
    dunford_decompose,
    invariant_metric,
    invertibility_check,
    kerchy_split,
    minimal_polynomial,
    similar_to_unitary,
)
from .verify import THEOREM_IDS, TheoremVerdict, verify

__version__ = "0.1.0"

__all__ = [
    "ClassReport",
    "ConsistencyError",
    "ContractViolation",
    "DefectSequence",
    "DimensionMismatch",
    "DomainError",
    "DunfordPair",
    "IllConditionedDecomposition",
    "OpDefectError",
    "SimilarityWitness",
    "SpectralSplit",
    "StabilityReport",
    "THEOREM_IDS",
    "TheoremVerdict",
    "classify",
    "contraction_extract",
    "defect",
    "defect_sequence",
    "douglas_factor",
    "dunford_decompose",
    "hermitian_eig",
    "invariant_metric",
    "invertibility_check",
    "is_order_preserving_pair",
    "kerchy_split",
    "minimal_polynomial",
    "positive_sqrt",
    "power_pair_defect",
    "psd_check",
    "similar_to_unitary",
    "spectral_radius",
    "stability",
    "tilde_defect",
    "verify",
]
