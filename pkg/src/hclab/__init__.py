"""Hierarchical clustering objectives, worst-case instances, relaxations,
and approximation algorithms with a verification harness."""

from .graphs import (
    GraphFormatError,
    WeightedGraph,
    graph_to_json,
    induced_subgraph,
    make_embedded_clique_instance,
    make_random_instance,
    make_tight_dissimilarity_instance,
    make_tight_similarity_instance,
    read_graph,
    total_weight,
    write_graph,
)
from .trees import (
    Dendrogram,
    dasgupta_cost,
    dissimilarity_reward,
    lca_sizes,
    leaves_of,
    left_leaning_tree,
    similarity_reward,
    triplet_nonleaf_decomposition,
)
from .exact import (
    BRUTE_FORCE_MAX_N,
    brute_force_maxcut,
    brute_force_opt,
    count_dendrograms,
    iter_dendrograms,
)
from .linkage import (
    MergeStep,
    average_linkage,
    average_linkage_closed_form_dissimilarity,
    dissimilarity_tight_report,
    linkage_ratio_report,
    similarity_tight_report,
    top_cut_tree,
    vertical_first_tree,
)
from .random_trees import (
    RngStream,
    exact_expected_dissimilarity_reward_random,
    expected_dissimilarity_reward_random,
    expected_similarity_reward_random,
    monte_carlo_mean,
    monte_carlo_objective_samples,
    random_always,
    stream_rng,
    triplet_nonleaf_frequencies,
)
from .sdp import (
    SdpConvergenceError,
    SdpSolution,
    VectorProgram,
    build_hc_sdp,
    build_maxcut_sdp,
    check_feasibility,
    hc_sdp_objective,
    solve_low_rank,
    tree_to_vectors,
)
from .rounding import (
    TripletAngles,
    alpha_similarity,
    best_of_similarity,
    factor_revealing_lower_bound,
    factor_revealing_numeric,
    mc_verify_triplet,
    optimize_alpha_similarity,
    sdp_first_random_next,
    triplet_separation_probability,
)
from .peel import (
    GW_RATIO,
    PeelConfig,
    alpha_dissimilarity,
    best_of_dissimilarity,
    gw_maxcut,
    optimal_eps_for_gamma,
    optimize_alpha_dissimilarity,
    peel_off_first_maxcut_next,
    recursive_maxcut_baseline,
)
from .report import RunReport, reports_to_csv, write_reports

__version__ = "0.1.0"
