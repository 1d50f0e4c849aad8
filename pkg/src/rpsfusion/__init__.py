"""Order-aware evidential reasoning and reliability-weighted fusion.

Public surface: classical mass-function primitives (dst), permutation
algebra (rps), order-aware transformations (transform), outcome-driven
source reliability (reliability), the fusion classifier (classifier) and
dataset/report I/O (dataio).
"""

from .classifier import (
    AccuracyReport,
    GaussianClassModel,
    PredictionRecord,
    RPSClassifier,
    cross_validate,
    gaussian_train,
    generate_bpa,
    membership,
)
from .dataio import (
    Dataset,
    bundled_manifest,
    bundled_path,
    kfold_split,
    load_bundled,
    load_dataset,
    read_report,
    write_report,
)
from .dst import (
    Frame,
    MassFunction,
    ProbabilityDistribution,
    dempster_combine,
    discount_bpa,
    jousselme_distance,
    pignistic,
)
from .errors import (
    InvariantError,
    OverwriteError,
    ParseError,
    RpsFusionError,
    TotalConflictError,
)
from .reliability import (
    DecisionContribution,
    ReliabilityReport,
    aggregate_dc,
    compute_reliabilities,
    decision_contribution,
    source_reliability,
)
from .rps import (
    RandomPermutationSet,
    discount_rps,
    enumerate_pes,
    left_intersect,
    left_orthogonal_sum,
    opt,
    perm_count,
    right_intersect,
    right_orthogonal_sum,
)
from .transform import (
    DEFAULT_DISPERSION,
    internal_order_ranking,
    ordered_support,
    ranked_probability_transform,
    rps_transform,
    rpt_distance,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyReport",
    "Dataset",
    "DecisionContribution",
    "DEFAULT_DISPERSION",
    "Frame",
    "GaussianClassModel",
    "InvariantError",
    "MassFunction",
    "OverwriteError",
    "ParseError",
    "PredictionRecord",
    "ProbabilityDistribution",
    "RPSClassifier",
    "RandomPermutationSet",
    "ReliabilityReport",
    "RpsFusionError",
    "TotalConflictError",
    "aggregate_dc",
    "bundled_manifest",
    "bundled_path",
    "compute_reliabilities",
    "cross_validate",
    "decision_contribution",
    "dempster_combine",
    "discount_bpa",
    "discount_rps",
    "enumerate_pes",
    "gaussian_train",
    "generate_bpa",
    "internal_order_ranking",
    "jousselme_distance",
    "kfold_split",
    "left_intersect",
    "left_orthogonal_sum",
    "load_bundled",
    "load_dataset",
    "membership",
    "opt",
    "ordered_support",
    "perm_count",
    "pignistic",
    "ranked_probability_transform",
    "read_report",
    "right_intersect",
    "right_orthogonal_sum",
    "rps_transform",
    "rpt_distance",
    "source_reliability",
    "write_report",
]
