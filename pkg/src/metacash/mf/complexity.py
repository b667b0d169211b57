"""Geometric class-separability meta-features.

These summarize how tangled the classification problem is: the best
single-attribute Fisher discriminant ratio, the per-class bounding-box
overlap volume, label distribution statistics and the effective
dimensionality of the numeric part.
"""

import numpy as np

from ..datasets import NUMERIC
from .catalogue import COMPLEXITY
from .infotheo import entropy_from_counts


def _class_slices(values, labels, n_classes):
    return [values[labels == c] for c in range(n_classes)]


def _fisher_max(ds):
    """Largest (mu1 - mu2)^2 / (var1 + var2) over numeric attributes and
    class pairs; pairs with zero pooled variance are skipped."""
    best = None
    for col in ds.columns_of_kind(NUMERIC):
        present = ~col.mask
        groups = _class_slices(col.data[present], ds.labels[present], ds.c)
        for i in range(ds.c):
            if len(groups[i]) == 0:
                continue
            for j in range(i + 1, ds.c):
                if len(groups[j]) == 0:
                    continue
                den = float(groups[i].var() + groups[j].var())
                if den <= 0.0:
                    continue
                ratio = float(groups[i].mean() - groups[j].mean()) ** 2 / den
                if best is None or ratio > best:
                    best = ratio
    return best


def _overlap_volume(ds):
    """Product over numeric attributes of the worst-pair normalized range
    overlap.  A pair sharing one constant value counts as full overlap."""
    product = 1.0
    used = 0
    for col in ds.columns_of_kind(NUMERIC):
        present = ~col.mask
        groups = _class_slices(col.data[present], ds.labels[present], ds.c)
        attr_overlap = None
        for i in range(ds.c):
            if len(groups[i]) == 0:
                continue
            for j in range(i + 1, ds.c):
                if len(groups[j]) == 0:
                    continue
                lo_i, hi_i = groups[i].min(), groups[i].max()
                lo_j, hi_j = groups[j].min(), groups[j].max()
                full = max(hi_i, hi_j) - min(lo_i, lo_j)
                if full <= 0.0:
                    ov = 1.0
                else:
                    ov = max(0.0, min(hi_i, hi_j) - max(lo_i, lo_j)) / full
                if attr_overlap is None or ov < attr_overlap:
                    attr_overlap = ov
        if attr_overlap is not None:
            product *= attr_overlap
            used += 1
    return product if used else None


def _pca_dim_ratio(ds):
    """Fraction of all attributes needed to explain 95% of the variance of
    the standardized numeric block (complete rows only)."""
    M, _ = ds.numeric_matrix()
    if M.shape[1] == 0 or ds.p == 0:
        return None
    M = M[~np.isnan(M).any(axis=1)]
    if M.shape[0] < 2:
        return None
    sd = M.std(axis=0)
    Z = (M - M.mean(axis=0)) / np.where(sd > 0, sd, 1.0)
    cov = np.atleast_2d(np.cov(Z, rowvar=False, ddof=1))
    ev = np.sort(np.linalg.eigvalsh(cov))[::-1]
    ev = np.clip(ev, 0.0, None)
    total = ev.sum()
    if total <= 0.0:
        return None
    cum = np.cumsum(ev) / total
    k = int(np.searchsorted(cum, 0.95) + 1)
    return k / float(ds.p)


def extract_complexity(ds):
    entries = {name: None for name in COMPLEXITY}
    counts = ds.class_counts
    entries["max_fisher_ratio"] = _fisher_max(ds)
    entries["overlap_volume"] = _overlap_volume(ds)
    entries["class_prop_entropy"] = entropy_from_counts(counts)
    entries["imbalance_ratio"] = float(counts.max() / counts.min())
    entries["points_per_dim"] = ds.n / ds.p if ds.p else None
    entries["pca_dim_ratio"] = _pca_dim_ratio(ds)
    return entries, {}
