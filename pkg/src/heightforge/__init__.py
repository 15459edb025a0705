"""Heights on number fields: Weil and projective heights, Mahler measures,
subspace heights, and the quotient-norm identities that tie them to
auxiliary polynomials and functionals."""

from .ball import Ball, ComplexBall, isolate_roots, refine
from .bounds import check_congruence, height_lower_bound, l1_infty, verify_point
from .errors import HeightForgeError
from .exact import Poly
from .field import FieldElement, NumberField, minimal_polynomial, norm, rational_field
from .functionals import (
    HomogeneousPoly,
    LinearFunctional,
    LinearMap,
    dual_norm,
    exterior_power_map,
    sup_norm_arch,
    sup_norm_finite,
    u_global_projective,
    u_local_dual,
    u_local_projective,
    u_subspace,
    u_witness_oracle_projective,
    univariate_u,
    verify_identity_projective,
    verify_identity_subspace,
)
from .heights import (
    ProjectiveVector,
    WedgeVector,
    local_projective_height,
    mahler_measure,
    projective_height,
    subspace_height,
    wedge_coordinates,
    weil_height,
)
from .places import (
    PPower,
    abs_value,
    archimedean_places,
    candidate_finite_places,
    finite_places_above,
    product_formula_check,
)

__version__ = "0.1.0"

__all__ = [
    "abs_value",
    "archimedean_places",
    "Ball",
    "candidate_finite_places",
    "check_congruence",
    "ComplexBall",
    "dual_norm",
    "exterior_power_map",
    "FieldElement",
    "finite_places_above",
    "height_lower_bound",
    "HeightForgeError",
    "HomogeneousPoly",
    "isolate_roots",
    "l1_infty",
    "LinearFunctional",
    "LinearMap",
    "local_projective_height",
    "mahler_measure",
    "minimal_polynomial",
    "norm",
    "NumberField",
    "Poly",
    "PPower",
    "product_formula_check",
    "projective_height",
    "ProjectiveVector",
    "rational_field",
    "refine",
    "subspace_height",
    "sup_norm_arch",
    "sup_norm_finite",
    "u_global_projective",
    "u_local_dual",
    "u_local_projective",
    "u_subspace",
    "u_witness_oracle_projective",
    "univariate_u",
    "verify_identity_projective",
    "verify_identity_subspace",
    "verify_point",
    "wedge_coordinates",
    "WedgeVector",
    "weil_height",
]
