"""
Pointwise exterior algebra of forms in six dimensions and the Type IIA structures built on it.
"""
from .alt_tensor import (
    AcStructure,
    AltTensor,
    Metric6,
    hodge_star,
    inner_product,
    interior_product,
    j_action,
    lambda_contraction,
    pullback,
    wedge,
)
from .structure import (
    PointStructure,
    almost_complex,
    hitchin_dual,
    hitchin_invariants,
    metric,
    normal_form,
    norm_squared,
    point_structure,
    primitivity_residual,
    random_structure,
    sp6_randomize,
    standard_omega,
    standard_phi,
    standard_phihat,
    symplectic_pullback,
)
from .variations import (
    RefinedSplit,
    TypeComponent,
    TypeDecomposition,
    bilinear_residual,
    contraction_residual,
    lefschetz_invert,
    type_decompose,
    variation_dual,
    variation_norm_squared,
    volume_residual,
)

__all__ = [
    "AcStructure",
    "AltTensor",
    "Metric6",
    "PointStructure",
    "RefinedSplit",
    "TypeComponent",
    "TypeDecomposition",
    "almost_complex",
    "bilinear_residual",
    "contraction_residual",
    "hitchin_dual",
    "hitchin_invariants",
    "hodge_star",
    "inner_product",
    "interior_product",
    "j_action",
    "lambda_contraction",
    "lefschetz_invert",
    "metric",
    "norm_squared",
    "normal_form",
    "point_structure",
    "primitivity_residual",
    "pullback",
    "random_structure",
    "sp6_randomize",
    "standard_omega",
    "standard_phi",
    "standard_phihat",
    "symplectic_pullback",
    "type_decompose",
    "variation_dual",
    "variation_norm_squared",
    "volume_residual",
    "wedge",
]
