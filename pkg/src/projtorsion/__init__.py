"""Normal projective and Thomas-Whitehead connections for affine connections
with torsion, computed exactly over the rationals or in float64."""

__version__ = "0.1.0"

from .affine import (
    AffineConnection,
    DimensionMismatch,
    DimensionTooSmall,
    NotEquivalent,
    OneForm,
    TorsionTensor,
    projective_shift,
    recover_rho,
    same_unparameterized_geodesics,
    torsion,
    torsion_free_companion,
)
from .fields import DomainError, ParseError, parse_expression, sample_points, to_source
from .projective import (
    NormalProjectiveData,
    SingularJacobian,
    curvature,
    hlavaty,
    is_flat,
    normalize,
    transform,
)
from .tw import (
    TWConnection,
    VolumeConnection,
    horizontal_gauge,
    induced_connection,
    normal_tw,
    structural_equiv_beta,
    tw_curvature,
    tw_from_connection,
    tw_ricci,
)

__all__ = [
    "AffineConnection", "DimensionMismatch", "DimensionTooSmall", "DomainError", "NormalProjectiveData",
    "NotEquivalent", "OneForm", "ParseError", "SingularJacobian", "TWConnection", "TorsionTensor",
    "VolumeConnection", "curvature", "hlavaty", "horizontal_gauge", "induced_connection", "is_flat",
    "normal_tw", "normalize", "parse_expression", "projective_shift", "recover_rho",
    "same_unparameterized_geodesics", "sample_points", "structural_equiv_beta", "to_source", "torsion",
    "torsion_free_companion", "transform", "tw_curvature", "tw_from_connection", "tw_ricci",
]
