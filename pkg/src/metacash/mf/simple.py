"""Simple meta-features: counts, ratios and class balance."""

import numpy as np

from ..datasets import BINARY, CATEGORICAL, NUMERIC


def count_outliers(values):
    """Boxplot rule: outside [Q1 - 1.5 IQR, Q3 + 1.5 IQR]."""
    if len(values) == 0:
        return 0
    q1, q3 = np.quantile(values, [0.25, 0.75])
    iqr = q3 - q1
    lo = q1 - 1.5 * iqr
    hi = q3 + 1.5 * iqr
    return int(np.count_nonzero((values < lo) | (values > hi)))


def extract_simple(ds):
    n, p, c = ds.n, ds.p, ds.c
    counts = ds.class_counts
    n_missing = ds.n_missing_cells

    outliers = 0
    for col in ds.columns_of_kind(NUMERIC):
        outliers += count_outliers(col.data[~col.mask])

    any_missing = np.zeros(n, dtype=bool)
    for col in ds.features:
        any_missing |= col.mask

    kinds = [col.kind for col in ds.features]
    entries = {
        "n_instances": float(n),
        "n_attributes": float(p),
        "n_classes": float(c),
        "n_missing_values": float(n_missing),
        "n_outliers": float(outliers),
        "attr_to_inst": p / n,
        "inst_to_attr": n / p,
        "minority_class_prop": float(counts.min()) / n,
        "majority_class_prop": float(counts.max()) / n,
        "prop_binary_attrs": kinds.count(BINARY) / p,
        "prop_nominal_attrs": kinds.count(CATEGORICAL) / p,
        "prop_numeric_attrs": kinds.count(NUMERIC) / p,
        "prop_instances_missing": float(np.count_nonzero(any_missing)) / n,
        "prop_missing_cells": n_missing / (n * p),
    }
    return entries, {}
