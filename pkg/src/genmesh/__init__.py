"""Generalized simplicial meshes, their boundaries, fracture inflation and Whitney forms."""

from .boundary import (
    boundary_matches_regular,
    boundary_split_facets,
    chain_around,
    generalized_boundary,
    induced_boundary_orientation,
)
from .errors import (
    BranchingError,
    DegenerateSimplexError,
    FractureBoundaryError,
    IntegrityError,
    ParseError,
)
from .fracture import (
    FractureSpec,
    extrinsic_inflation,
    fractured_mesh,
    geometric_angle,
    intrinsic_inflation,
    intrinsic_neighbor,
    oriented_angle,
    verify_inflation_theorem,
)
from .generalized import (
    GeneralizedMesh,
    check_orientation_compatibility,
    component_count,
    find_compatible_orientation,
    from_triangulation,
    generalized_subfacets,
    relabeling_equivalent,
    submesh,
    validate,
)
from .simplicial import GeometricMesh, Triangulation, validate_regularity
from .whitney import (
    DiscreteForm,
    assemble,
    check_patch_condition,
    check_trace_surjectivity,
    has_point_contact,
    local_mass,
    local_stiffness,
    trace_matrix,
    whitney_eval,
)

__all__ = [
    "BranchingError", "DegenerateSimplexError", "DiscreteForm", "FractureBoundaryError", "FractureSpec",
    "GeneralizedMesh", "GeometricMesh", "IntegrityError", "ParseError", "Triangulation", "assemble",
    "boundary_matches_regular", "boundary_split_facets", "chain_around", "check_orientation_compatibility",
    "check_patch_condition", "check_trace_surjectivity", "component_count", "extrinsic_inflation",
    "find_compatible_orientation", "fractured_mesh", "from_triangulation", "generalized_boundary",
    "generalized_subfacets", "geometric_angle", "has_point_contact", "induced_boundary_orientation",
    "intrinsic_inflation", "intrinsic_neighbor", "local_mass", "local_stiffness", "oriented_angle",
    "relabeling_equivalent", "submesh", "trace_matrix", "validate", "validate_regularity",
    "verify_inflation_theorem", "whitney_eval",
]
