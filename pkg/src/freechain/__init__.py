"""Finite-index subgroup chains in free groups whose boundary action is faithful
but not essentially free, with finite-level certificates."""
from .freegroup import (
    Alphabet,
    ClassList,
    Letter,
    Word,
    conjugacy_key,
    cyclic_reduce,
    enumerate_a_class_reps,
    invert,
    multiply,
    reduce,
)
from .labeled_graph import (
    ComponentGraphSpec,
    Gadget,
    LabeledGraph,
    Permutation,
    build_component_graph,
    evaluate_action,
    label_permutation,
    trace_word,
    validate_graph,
)
from .chain import (
    ChainContext,
    OrbitTable,
    act_on_state,
    build_chain,
    choose_primes,
    compute_orbit,
    coset_tree_stats,
    fix_ratio,
    stabilizer_contains,
)
from .analysis import (
    acts_nontrivially,
    chain_intersection_test,
    essential_freeness_report,
    free_point_search,
    freeness_report,
    gns_witness,
    schreier_ball,
    verify_alpha_bound,
)

__version__ = "0.1.0"
