"""Feasible regions of consecutive permutation patterns as cycle polytopes of overlap graphs."""

from .cycle_polytope import (
    CyclePolytope,
    FacePoset,
    Membership,
    RationalVector,
    affine_dimension,
    contains,
    cycle_vector,
    face_of,
    face_poset,
    full_subgraphs,
    polytope_dimension,
    polytope_of,
)
from .errors import (
    BudgetExceededError,
    CrossCheckError,
    CyclePolyError,
    InvalidInputError,
    NoEulerianCircuitError,
    NotInPolytopeError,
)
from .multigraph import (
    Cycle,
    DirectedMultigraph,
    Edge,
    FullSubgraph,
    Walk,
    enumerate_simple_cycles,
    eulerian_circuit,
    largest_full_subgraph,
    overlap_graph,
    strongly_connected_components,
    walk_of_permutation,
)
from .perm_core import (
    Permutation,
    cocc,
    cocc_tilde,
    direct_sum,
    inflate,
    occ,
    occ_tilde,
    pattern_of,
)
from .realization import (
    convex_mix,
    cycle_sequence,
    mixing_inflation,
    realize_walk,
    superpermutation,
    target_sequence,
)

__version__ = "0.1.0"
