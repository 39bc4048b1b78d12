"""Fairness-aware preprocessing for categorical tables.

Builds a junction-tree-style factorization of the attribute distribution from
pairwise mutual information, swaps the label's conditional for one driven by
admissible attributes only, and regenerates the dataset by sequential
conditional sampling.
"""

__version__ = "0.1.0"

from .cliques import (
    CliquePlan,
    ConstraintReport,
    build_plan,
    check_constraints,
    check_constraints_weighted,
    clique_extension,
    clique_initialization,
    delta,
    delta_m,
    exact_clique_search,
    plan_weight,
)
from .dataset import (
    AttributeSchema,
    EncodedDataset,
    Role,
    load_csv,
    load_roles_config,
    write_csv,
)
from .info import (
    MIMatrix,
    ProbTable,
    empirical_joint,
    entropy,
    kl_divergence,
    mi_matrix,
    multivariate_mi,
    pairwise_mi,
)
from .marginals import (
    MarginalModel,
    conditional,
    fit_marginals,
    log_density,
    model_from_json,
    model_to_json,
)
from .metrics import RODReport, conditional_mi_diagnostic, distortion_kl, rod, rod_of_dataset
from .sampling import (
    LabelClique,
    PreprocessConfig,
    build_label_clique,
    extend_plan_with_label,
    preprocess,
    preprocess_plus,
)
from .synth import DagNode, DagSpec, generate, hiring_example, load_spec, spec_from_json, spec_to_json

__all__ = [
    "AttributeSchema",
    "CliquePlan",
    "ConstraintReport",
    "DagNode",
    "DagSpec",
    "EncodedDataset",
    "LabelClique",
    "MIMatrix",
    "MarginalModel",
    "PreprocessConfig",
    "ProbTable",
    "RODReport",
    "Role",
    "build_label_clique",
    "build_plan",
    "check_constraints",
    "check_constraints_weighted",
    "clique_extension",
    "clique_initialization",
    "conditional",
    "conditional_mi_diagnostic",
    "delta",
    "delta_m",
    "distortion_kl",
    "empirical_joint",
    "entropy",
    "exact_clique_search",
    "extend_plan_with_label",
    "fit_marginals",
    "generate",
    "hiring_example",
    "kl_divergence",
    "load_csv",
    "load_roles_config",
    "load_spec",
    "log_density",
    "mi_matrix",
    "model_from_json",
    "model_to_json",
    "multivariate_mi",
    "pairwise_mi",
    "plan_weight",
    "preprocess",
    "preprocess_plus",
    "rod",
    "rod_of_dataset",
    "spec_from_json",
    "spec_to_json",
    "write_csv",
]
