"""The published meta-feature catalogue: ordered names, grouped by family.

Every extracted vector carries exactly these entries in exactly this
order.  The catalogue version is stored in knowledge bases and checked at
recommendation time; change the version whenever the name set changes.
"""

CATALOGUE_VERSION = "1"

SIMPLE = (
    "n_instances",
    "n_attributes",
    "n_classes",
    "n_missing_values",
    "n_outliers",
    "attr_to_inst",
    "inst_to_attr",
    "minority_class_prop",
    "majority_class_prop",
    "prop_binary_attrs",
    "prop_nominal_attrs",
    "prop_numeric_attrs",
    "prop_instances_missing",
    "prop_missing_cells",
)

STATISTICAL = (
    "mean_skewness",
    "mean_kurtosis",
    "mean_abs_correlation",
    "mean_abs_covariance",
    "sparsity",
    "gravity",
    "max_cov_eigenvalue",
    "mean_anova_pvalue",
    "mean_geometric_mean",
    "mean_harmonic_mean",
)

INFO_THEORETIC = (
    "class_entropy",
    "mean_norm_attr_entropy",
    "mean_mutual_info",
    "uncertainty_coefficient",
    "equiv_n_attrs",
    "noise_signal_ratio",
)

LANDMARKERS = (
    "naive_bayes",
    "one_nn",
    "elite_nn",
    "decision_node",
    "random_node",
)

LANDMARKING = (
    tuple("lm_" + name for name in LANDMARKERS)
    + tuple("rel_%s_vs_%s" % (a, b)
            for i, a in enumerate(LANDMARKERS)
            for b in LANDMARKERS[i + 1:])
    + tuple("sub_" + name for name in LANDMARKERS)
)

MODEL_BASED = (
    "tree_n_nodes",
    "tree_n_leaves",
    "tree_height",
    "tree_width",
    "tree_mean_level_size",
    "branch_longest",
    "branch_shortest",
    "branch_mean",
    "branch_std",
    "leaves_per_class_min",
    "leaves_per_class_max",
    "leaves_agreement",
    "attr_occ_min",
    "attr_occ_max",
    "attr_occ_mean",
    "attr_occ_std",
    "mean_info_gain",
)

COMPLEXITY = (
    "max_fisher_ratio",
    "overlap_volume",
    "class_prop_entropy",
    "imbalance_ratio",
    "points_per_dim",
    "pca_dim_ratio",
)

FAMILIES = (
    ("simple", SIMPLE),
    ("statistical", STATISTICAL),
    ("info_theoretic", INFO_THEORETIC),
    ("landmarking", LANDMARKING),
    ("model_based", MODEL_BASED),
    ("complexity", COMPLEXITY),
)

CATALOGUE = tuple(name for _, names in FAMILIES for name in names)

assert len(CATALOGUE) == len(set(CATALOGUE))
assert len(CATALOGUE) >= 41
