"""Exact discrete Morse theory on simplicial complexes."""

from .complex import (
    EMPTY,
    Chain,
    SimplicialComplex,
    Subdivision,
    barycentric_subdivision,
    boundary,
    cone,
    cycle_graph,
    incidence_number,
    is_pseudomanifold,
    join,
    skeleton_of_simplex,
)
from .errors import CollapseError, DomainError, IntegrityError, MorseError, Verdict
from .morse import (
    BasisQ,
    DiscreteVectorField,
    co_critical_chain,
    critical_chain,
    critical_simplices,
    greedy_collapse,
    gvf_cone_transfer,
    gvf_join,
    gvf_skeleton_minus_facet,
    inner_product,
    is_gradient,
    modified_basis,
    sphere_witness_bd,
    validate_dvf,
)
from .chainmaps import (
    ChainMap,
    SimplicialMap,
    alternating_trace,
    compose,
    hopf_rhs,
    identity_map,
    induced_chain_map,
    subdivision_chain_map,
    verify_chain_map,
    verify_hopf,
    zero_map,
)
from .spheres import (
    GroupAction,
    OrientationVector,
    SphereWitness,
    build_sphere0,
    build_zp_circle,
    circle_field,
    combinatorial_degree,
    cone_lemma_check,
    degree_of_chain_map,
    degree_oracle_preimage,
    induced_action_on_bd,
    join_action,
    odd_dimension_check,
    orientation_from_witness,
    orientations,
    verify_degree_mod_p,
    verify_equivariance,
    wrap_map,
)

__version__ = "0.1.0"
