"""Equivalence constants between weighted anchored and ANOVA norms.

The embedding norm of the identity map between the two function-space
scales is computed exactly at the four corner index pairs, bracketed by
interpolation and variational bounds elsewhere, and tracked across
dimensions for the structured weight families.
"""

from .constants import (EmbeddingConstants, NormIndexPair, corner_argmax,
                        corner_constant, closed_form_constant,
                        embedding_norm, interpolation_upper,
                        variational_lower)
from .decomp import (ConstantProfile, DualProfile, LevelSetProfile,
                     TabulatedProfile, TensorFunction, convert, coupling_c,
                     sign_flip_conjugate, tensor_norm, transform_matrix,
                     witness_ratio, witness_sequence)
from .density import (BetaLike, ConditionReport, Density, DensityMetrics,
                      ExpType, ParetoLike, TabulatedDensity, Uniform)
from .errors import (CapacityError, DomainError, InfeasibleError,
                     MembershipError, NormBridgeError, UsageError)
from .growth import (GrowthFit, GrowthReport, GrowthSample, classify_series,
                     exponent_check, log_dims, sweep)
from .oracle import bruteforce_corner, quad_metric, ratio_scan
from .weights import (DimensionDependentWeights, ExplicitWeights,
                      FiniteDiameterWeights, FiniteOrderWeights, PODWeights,
                      ProductWeights, SubsetIndex, WeightFamily,
                      family_from_file, family_from_json)

__version__ = "0.1.0"

__all__ = [
    "BetaLike", "CapacityError", "ConditionReport", "ConstantProfile",
    "Density", "DensityMetrics", "DimensionDependentWeights", "DomainError",
    "DualProfile", "EmbeddingConstants", "ExplicitWeights", "ExpType",
    "FiniteDiameterWeights", "FiniteOrderWeights", "GrowthFit",
    "GrowthReport", "GrowthSample", "InfeasibleError", "LevelSetProfile",
    "MembershipError", "NormBridgeError", "NormIndexPair", "PODWeights",
    "ParetoLike", "ProductWeights", "SubsetIndex", "TabulatedDensity",
    "TabulatedProfile", "TensorFunction", "Uniform", "UsageError",
    "WeightFamily", "bruteforce_corner", "classify_series",
    "closed_form_constant", "convert", "corner_argmax", "corner_constant",
    "coupling_c", "embedding_norm", "exponent_check", "family_from_file",
    "family_from_json", "interpolation_upper", "log_dims", "quad_metric",
    "ratio_scan", "sign_flip_conjugate", "sweep", "tensor_norm",
    "transform_matrix", "variational_lower", "witness_ratio",
    "witness_sequence",
]
