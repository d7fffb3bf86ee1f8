"""Random covering graphs of a fixed base, their non-backtracking spectra,
tangle scans, magnification checks and the counting-bound toolkit.

The central objects: a Graph (multigraph with an edge involution; half-loops
are fixed points, whole-loops are orbits with equal endpoints), a
PermutationAssignment (one permutation of [n] per directed base edge,
inverse on partners) and the Lift it glues.  Spectral tools separate the
cover's eigenvalues into the pulled-back base spectrum and the new part,
count new eigenvalues beyond 2*sqrt(d-1) + eps, scan covers for tangles
and test vertex magnification.
"""

__version__ = "0.1.0"

from .graphs import (
    Graph,
    GraphFormatError,
    GraphMorphism,
    OrderedGraph,
    bouquet,
    complete_graph,
    cycle_graph,
    dipole,
    empty_graph,
    from_pairs,
    girth,
    graph_from_json,
    graph_to_json,
    induced_subgraph,
    is_covering,
    is_etale,
    load_graph,
    path_graph,
    prune,
    save_graph,
    subgraph_from_orbits,
)
from .lifts import (
    Lift,
    ModelError,
    ModelSpec,
    PermutationAssignment,
    build_lift,
    holonomy_generators,
    orbit_count,
    sample_assignment,
    sample_lift,
    validate_model,
)
from .spectral import (
    IharaResult,
    SpectralError,
    SpectralReport,
    SpectrumMultiset,
    adjacency_matrix,
    adjacency_spectrum,
    alon_threshold,
    hashimoto_matrix,
    hashimoto_spectrum,
    ihara_check,
    is_ramanujan,
    lambda2,
    mu1,
    multiset_contains,
    multiset_difference,
    new_spectrum,
    non_alon_count,
    spectral_report,
)
from .walks import (
    BudgetExceededError,
    HomotopyType,
    TraceMismatchError,
    Walk,
    beads,
    count_snbc_dfs,
    enumerate_snbc,
    snbc_by_type,
    snbc_count,
    suppress_beads,
    visited_subgraph,
    vlg,
    walk_reduction,
    write_walk_census,
)
from .tangles import (
    TangleQuery,
    TangleReport,
    TangleWitness,
    TooSymmetricError,
    canonical_form,
    contract_nonloop_edge,
    example_tangles,
    identify_distance_two,
    is_tangle,
    m_no_whole,
    m_whole,
    scan_tangles,
    tau_tang_lower_no_whole,
    tau_tang_lower_whole,
)
from .magnify import (
    MagnificationResult,
    VertexSubset,
    alon_gap_bound,
    alon_gap_check,
    best_gamma_exhaustive,
    fibre_imbalance_expansion,
    imbalance_rate,
    is_magnifier,
    is_pseudo_magnifier,
    lift_fibre_blocks,
    neighborhood,
)
from .bounds import (
    EntropyEstimate,
    binom_estimate_witness,
    full_cycle_containment_bound,
    h2,
    h2_second_derivative,
    involution_containment_bound,
    odd_binom,
    odd_binom_exact,
    perm_containment_prob,
    verify_binom_estimate,
)
from .experiments import (
    ConfigError,
    ExperimentConfig,
    ExperimentReport,
    conditioned_nonalon,
    fit_scaling,
    run_experiment,
    wilson_interval,
)
