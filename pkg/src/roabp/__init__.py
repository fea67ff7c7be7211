"""Hitting sets and exact blackbox identity tests for read-once oblivious ABPs."""

from .algebra import (
    Field,
    FieldElem,
    SparseMultiPoly,
    UniPoly,
    is_prime,
    next_prime,
    poly_compose,
    rank_ff,
    rank_ff_t,
)
from .concentration import (
    AlgebraPoly,
    BiPoly,
    ShiftFamily,
    WeightAssignment,
    algebra_poly_from_roabp,
    algebra_poly_from_set_multilinear,
    check_basis_isolating,
    collapse_bound,
    collapse_y,
    commutative_blackbox_pit,
    commutative_shift,
    concentrated_hitting_set,
    concentration_target,
    is_l_concentrated,
    lagrange_tuple,
    search_isolating,
    shift_roabp,
    shifted_algebra_poly,
)
from .hitting import (
    ConjectureReport,
    HittingSet,
    PitResult,
    PolyTuple,
    bivariate_map,
    blackbox_pit_known_order,
    conjecture_probe,
    degree_bound,
    halving_transform,
    hitting_set_known_order,
    pad_variables,
    recursive_map,
)
from .instancefile import parse_instance, serialize_instance
from .model import (
    LinearForm,
    Roabp,
    SetMultilinearCircuit,
    from_set_multilinear,
    random_commutative_roabp,
    random_roabp,
    roabp_from_bivariate,
)
from .pdmatrix import PartialDerivMatrix, binomial_matrix, pdm, top_diagonal

__all__ = [
    "Field",
    "FieldElem",
    "UniPoly",
    "SparseMultiPoly",
    "is_prime",
    "next_prime",
    "poly_compose",
    "rank_ff",
    "rank_ff_t",
    "Roabp",
    "SetMultilinearCircuit",
    "LinearForm",
    "from_set_multilinear",
    "random_roabp",
    "random_commutative_roabp",
    "roabp_from_bivariate",
    "PartialDerivMatrix",
    "pdm",
    "top_diagonal",
    "binomial_matrix",
    "PolyTuple",
    "HittingSet",
    "PitResult",
    "ConjectureReport",
    "bivariate_map",
    "halving_transform",
    "recursive_map",
    "degree_bound",
    "hitting_set_known_order",
    "blackbox_pit_known_order",
    "conjecture_probe",
    "pad_variables",
    "AlgebraPoly",
    "BiPoly",
    "WeightAssignment",
    "ShiftFamily",
    "algebra_poly_from_roabp",
    "algebra_poly_from_set_multilinear",
    "shift_roabp",
    "shifted_algebra_poly",
    "is_l_concentrated",
    "check_basis_isolating",
    "search_isolating",
    "lagrange_tuple",
    "collapse_y",
    "collapse_bound",
    "commutative_shift",
    "concentrated_hitting_set",
    "commutative_blackbox_pit",
    "concentration_target",
    "parse_instance",
    "serialize_instance",
]
