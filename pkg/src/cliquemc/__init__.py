"""cliquemc: clique dynamics for abstract polymer models.

Sampling via polymer clique dynamics, weight-condition checkers with explicit
mixing-time bounds, a self-reducibility estimator for the partition function,
size truncation with quality guarantees, and a hard-core instantiation on
bipartite expanders.
"""

from .conditions import (
    ConditionReport,
    GrowthFunction,
    MixingBoundInputs,
    check_clique_dynamics,
    check_clique_truncation,
    check_fernandez_procacci,
    check_strong_condition,
    mixing_bound_inputs,
    mixing_time_bound,
    size_f,
    uniform_f,
)
from .dynamics import (
    KERNEL_BACKEND,
    ChainKernelData,
    ChainState,
    chain_step,
    empirical_tv,
    make_state,
    run_chain,
    sample_batch,
    stationary_distribution,
    transition_matrix,
)
from .errors import (
    CliqueMCError,
    ConditionInputError,
    DegenerateRatioError,
    EnumerationCapError,
    GraphFormatError,
    InvalidFamilyError,
    PreconditionError,
    UnknownPolymerError,
)
from .estimator import (
    EstimateResult,
    RatioEstimate,
    approximate_partition_function,
    median_amplify,
    median_runs,
    sample_gibbs,
    sample_schedule,
)
from .hardcore import (
    BipartiteGraph,
    CombinedEstimate,
    ThresholdReport,
    build_polymer_model,
    check_bipartite_expander,
    combined_estimate,
    enumerate_connected_sets,
    exact_hardcore,
    lambda_threshold,
    load_graph,
    load_graph_file,
    polymer_weight,
    square_graph,
    table1_evaluators,
)
from .model import (
    CliqueCover,
    CliqueDistribution,
    Polymer,
    PolymerModel,
    clique_distribution,
    enumerate_families,
    gibbs_probability,
    is_valid_family,
    load_model,
    partition_function_exact,
    save_model,
    validate_clique_cover,
)
from .truncation import (
    TruncationResult,
    truncate,
    truncation_threshold,
    verify_truncation_quality,
)

__version__ = "0.1.0"
