"""Graph isomorphism testing by diagonal perturbation of dominant graph matrices."""

from .config import RunConfig
from .engine import (
    InverseColumns,
    Isomorphic,
    NotIsomorphicOrUnreconstructible,
    Outcome,
    Partition,
    Signature,
    choose_epsilon,
    inverse_columns,
    is_simple,
    min_delta,
    partition,
    run_base_scheme,
    signature,
    similar,
    verify_mapping,
)
from .graphs import (
    DegreeInfo,
    Graph,
    GraphFormatError,
    Permutation,
    degree_info,
    emit_edge_list,
    emit_graph6,
    generate,
    parse_edge_list,
    parse_graph6,
    permute,
    read_graph,
    write_graph,
)
from .numkit import (
    DegenerateGraphError,
    GraphMatrix,
    build_graph_matrix,
    condition_bound,
    det_exact,
    perturb,
    precision_plan,
    separation_bound,
    solve_exact,
    solve_gs,
    sweep_budget,
)
from .oracle import aut_order, brute_force_iso, count_isos

__version__ = "0.1.0"
