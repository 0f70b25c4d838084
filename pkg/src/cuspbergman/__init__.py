"""Bergman kernels of level-one cusp forms, with exact model-manifold oracles."""
from .bergman import bergman_at, bergman_sup, build_ortho, mass, que_average, scaling_study
from .forms import cusp_basis, cusp_dimension, delta_series, parse_weight
from .geom import build_quadrature, integrate_over_F, reduce_to_fundamental_domain
from .pet import gram_matrix, orthonormalize, petersson_inner

__version__ = "0.1.0"

__all__ = [
    "bergman_at",
    "bergman_sup",
    "build_ortho",
    "build_quadrature",
    "cusp_basis",
    "cusp_dimension",
    "delta_series",
    "gram_matrix",
    "integrate_over_F",
    "mass",
    "orthonormalize",
    "parse_weight",
    "petersson_inner",
    "que_average",
    "reduce_to_fundamental_domain",
    "scaling_study",
]
