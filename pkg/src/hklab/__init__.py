"""Exact-arithmetic laboratory for cut LP relaxations of directed TSP
tour and path problems: optimal primal and dual solutions, laminar dual
certificates, the minimum potential gap a_s - a_t, walk merging, and the
instance families with known integrality ratios.
"""

from .core import (
    Edge,
    Instance,
    MetricClosure,
    SccChain,
    UnreachableError,
    ValidationError,
    Walk,
    instance_from_json,
    load_instance,
    make_walk,
    metric_closure,
    scc_topological_order,
    support_graph,
    validate_instance,
    walk_cost_and_check,
)
from .exact import (
    SizeCapExceeded,
    brute_force_optimal_dual,
    exact_atsp,
    exact_atspp,
)
from .instances import (
    ReductionMap,
    bem_certificate,
    fig1_certificate,
    gen_bem,
    gen_fig1,
    gen_fig4,
    gen_random,
    lift_tour,
    nw_to_unweighted,
    split_vertex,
)
from .lp import LinearProgram, LpResult, solve_exact_lp
from .merge import (
    MergeInput,
    MergeReport,
    PipelineReport,
    merge_walks,
    merge_walks_report,
    path_from_tour_pipeline,
    path_from_tour_report,
)
from .relaxation import (
    DualSolution,
    GapCertificate,
    InfeasibleRelaxation,
    LpSolution,
    PreconditionError,
    UnboundedRelaxation,
    cut_value,
    cy_cost,
    dual_feasibility_violations,
    dual_objective_value,
    is_laminar,
    lp_with_feedback_edge,
    min_gap_dual,
    minimize_primal,
    separate_subtour_cuts,
    solve_relaxation,
    uncross_dual,
)
from .structure import (
    ChainDecomposition,
    dual_improvement_step,
    laminar_respecting_path,
    tight_chain,
    two_cut_respecting_paths,
    two_paths_vertex_avoiding,
    walk_crossings,
)

__version__ = "0.1.0"
