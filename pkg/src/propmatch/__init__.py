"""propmatch: graph matching by weight-free feature propagation.

Nodes of two graphs are embedded by repeatedly propagating their features
through a graph operator — no training involved — and matched by solving a
linear assignment over the embedding similarities.  Side information
(labelled reference graphs, known anchor pairs) plugs into the same
pipeline, and brute-force oracles verify the objective identities that make
the whole construction sound.
"""

from .assignment import (
    Assignment,
    accuracy,
    hits_at_k,
    load_assignment,
    mrr,
    save_assignment,
    solve_argmax,
    solve_hungarian,
)
from .bench import BenchConfig, run_bench
from .bruteforce import (
    EquivalenceReport,
    QapInstance,
    RelaxInstance,
    check_cosine_sum_relaxation,
    check_final_layer_relaxation,
    enumerate_assignments,
    qap_brute,
    qap_objective,
    relaxed_objective,
    weight_chain_deviation,
)
from .embedding import (
    EmbedConfig,
    EmbeddingSet,
    SimilarityMatrix,
    embed,
    normalize_rows,
    random_weights,
    similarity,
)
from .graphs import (
    AnchorSet,
    Graph,
    GraphFormatError,
    GroundTruth,
    TrainingSet,
    degree,
    load_anchors,
    load_graph,
    load_ground_truth,
    load_training_manifest,
    save_graph,
    save_pairs,
    with_features,
)
from .operators import OperatorKind, SparseOperator, build_operator
from .supervision import (
    LabelFeature,
    label_feature,
    semi_supervised_match,
    supervised_match,
)
from .synthetic import (
    NoiseSpec,
    RewireBudgetError,
    add_lowconf,
    gen_er,
    onehot_degree_features,
    posenc_degree_features,
    rewire,
)

__version__ = "0.1.0"

__all__ = [
    "AnchorSet",
    "Assignment",
    "BenchConfig",
    "EmbedConfig",
    "EmbeddingSet",
    "EquivalenceReport",
    "Graph",
    "GraphFormatError",
    "GroundTruth",
    "LabelFeature",
    "NoiseSpec",
    "OperatorKind",
    "QapInstance",
    "RelaxInstance",
    "RewireBudgetError",
    "SimilarityMatrix",
    "SparseOperator",
    "TrainingSet",
    "accuracy",
    "add_lowconf",
    "build_operator",
    "check_cosine_sum_relaxation",
    "check_final_layer_relaxation",
    "degree",
    "embed",
    "enumerate_assignments",
    "gen_er",
    "hits_at_k",
    "label_feature",
    "load_anchors",
    "load_assignment",
    "load_graph",
    "load_ground_truth",
    "load_training_manifest",
    "mrr",
    "normalize_rows",
    "onehot_degree_features",
    "posenc_degree_features",
    "qap_brute",
    "qap_objective",
    "random_weights",
    "relaxed_objective",
    "rewire",
    "run_bench",
    "save_assignment",
    "save_graph",
    "save_pairs",
    "semi_supervised_match",
    "similarity",
    "solve_argmax",
    "solve_hungarian",
    "supervised_match",
    "with_features",
]
