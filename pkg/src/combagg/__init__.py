"""Spanning-tree aggregation of expert pairwise comparisons and its robustness analysis."""

__version__ = "0.1.0"

from .pcm import (  # noqa: E402
    DEFAULT_GRADE_COUNT,
    Examination,
    ExpertJudgment,
    Kind,
    PairwiseComparisonMatrix,
    PriorityVector,
    consistency_defect,
    convert_kind,
    make_pcm,
    normalize,
)
from .trees import SpanningTree, count_trees, enumerate_complete, enumerate_masked  # noqa: E402
from .aggregation import (  # noqa: E402
    Icpcm,
    aggregate,
    aggregate_ordinary,
    aggregate_weighted,
    icpcm_priorities,
    matrix_scale_weight,
    rating,
    reconstruct_icpcm,
    row_geometric_mean,
    tree_scale_weight,
)
from .robustness import (  # noqa: E402
    ModelWeights,
    PerturbationSpec,
    consistent_pcm_from_weights,
    max_relative_deviation,
    mean_relative_error,
    perturb_pcm,
    relative_errors,
    vertex_oracle,
)
from .ga import GaConfig, model_vector_presets, run_ga, sweep  # noqa: E402
from .experiments import (  # noqa: E402
    enumerate_groups,
    evaluate_group,
    generate_synthetic_sessions,
    run_group_experiment,
)
