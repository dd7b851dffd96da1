"""
Lattice package - Spectral exterior calculus and Hodge theory on the flat torus T^6.
"""
from .form_field import CohomologyVector, FormField, TensorField
from .geometry import christoffel, curvature_proxy, nijenhuis, nijenhuis_norm, riemann_sup
from .grid import Grid
from .io import load_field, save_field
from .pointwise import (
    FieldStructure,
    random_band_limited,
    require_positive,
    structure_fields,
    trig_field,
    wedge_fields,
)
from .spectral import (
    ck_norm,
    codifferential,
    dealias,
    dealias_values,
    exterior_derivative,
    green_inverse,
    harmonic_projection,
    hodge_laplacian,
    l2_inner,
    l2_norm,
    neumann_operator,
    sobolev_norm,
    vector_l2_norm,
)

__all__ = [
    "CohomologyVector",
    "FieldStructure",
    "FormField",
    "Grid",
    "TensorField",
    "christoffel",
    "ck_norm",
    "codifferential",
    "curvature_proxy",
    "dealias",
    "dealias_values",
    "exterior_derivative",
    "green_inverse",
    "harmonic_projection",
    "hodge_laplacian",
    "l2_inner",
    "l2_norm",
    "load_field",
    "neumann_operator",
    "nijenhuis",
    "nijenhuis_norm",
    "random_band_limited",
    "require_positive",
    "riemann_sup",
    "save_field",
    "sobolev_norm",
    "structure_fields",
    "trig_field",
    "vector_l2_norm",
    "wedge_fields",
]
