"""Information-theoretic meta-features.

Numeric attributes are discretized by equal-frequency binning into
ceil(sqrt(n)) bins capped at 10.  Entropies are in bits.  Per-attribute
quantities use the rows where that attribute is present; the class
entropy uses all rows.
"""

import numpy as np

from ..datasets import NUMERIC


def entropy_from_counts(counts):
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum()
    if total <= 0:
        return 0.0
    p = counts[counts > 0] / total
    return float(-np.sum(p * np.log2(p)))


def discretize_equal_frequency(values, n_bins):
    """Bin assignment by quantile edges; duplicate edges collapse so the
    result can have fewer bins than requested."""
    edges = np.quantile(values, np.linspace(0, 1, n_bins + 1)[1:-1])
    edges = np.unique(edges)
    return np.searchsorted(edges, values, side="right")


def attribute_codes(col, n):
    """Discrete view of one attribute: (codes, present mask)."""
    present = ~col.mask
    if col.kind == NUMERIC:
        vals = col.data[present]
        if len(vals) == 0:
            return np.zeros(0, dtype=np.int64), present
        bins = min(10, int(np.ceil(np.sqrt(n))))
        bins = max(bins, 1)
        return discretize_equal_frequency(vals, bins).astype(np.int64), present
    return col.data[present].astype(np.int64), present


def mutual_information(x_codes, y_codes):
    """MI in bits from two aligned code vectors (exact contingency)."""
    if len(x_codes) == 0:
        return 0.0
    xs = np.unique(x_codes)
    ys = np.unique(y_codes)
    xi = np.searchsorted(xs, x_codes)
    yi = np.searchsorted(ys, y_codes)
    table = np.zeros((len(xs), len(ys)))
    np.add.at(table, (xi, yi), 1.0)
    hx = entropy_from_counts(table.sum(axis=1))
    hy = entropy_from_counts(table.sum(axis=0))
    hxy = entropy_from_counts(table.ravel())
    return max(0.0, hx + hy - hxy)


def extract_info_theoretic(ds):
    n = ds.n
    class_counts = ds.class_counts
    h_c = entropy_from_counts(class_counts)

    attr_entropies = []
    attr_mis = []
    for col in ds.features:
        codes, present = attribute_codes(col, n)
        if len(codes) == 0:
            continue
        counts = np.bincount(codes)
        attr_entropies.append(entropy_from_counts(counts))
        attr_mis.append(mutual_information(codes, ds.labels[present]))

    entries = {
        "class_entropy": h_c,
        "mean_norm_attr_entropy": None,
        "mean_mutual_info": None,
        "uncertainty_coefficient": None,
        "equiv_n_attrs": None,
        "noise_signal_ratio": None,
    }
    if not attr_entropies:
        return entries, {}

    mean_h = float(np.mean(attr_entropies))
    mean_mi = float(np.mean(attr_mis))
    entries["mean_norm_attr_entropy"] = (mean_h / np.log2(n)
                                         if n > 1 else None)
    entries["mean_mutual_info"] = mean_mi
    if h_c > 0:
        entries["uncertainty_coefficient"] = mean_mi / h_c
    if mean_mi > 0:
        entries["equiv_n_attrs"] = h_c / mean_mi
        entries["noise_signal_ratio"] = (mean_h - mean_mi) / mean_mi
    return entries, {}
