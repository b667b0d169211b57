"""Statistical meta-features over the numeric attributes.

Moments use population (biased) estimators: skewness m3 / m2^1.5 and
excess kurtosis m4 / m2^2 - 3.  Zero-variance attributes are excluded from
the moment and correlation aggregates, with the exclusion count reported
as a diagnostic.  Geometric and harmonic means shift an attribute by
(1 - min) when it has nonpositive values; shifted attributes are counted.
"""

import numpy as np
from scipy import stats

from ..datasets import NUMERIC


def skewness(values):
    values = np.asarray(values, dtype=np.float64)
    m = values.mean()
    d = values - m
    m2 = np.mean(d * d)
    if m2 == 0.0:
        return None
    m3 = np.mean(d ** 3)
    return float(m3 / m2 ** 1.5)


def excess_kurtosis(values):
    values = np.asarray(values, dtype=np.float64)
    m = values.mean()
    d = values - m
    m2 = np.mean(d * d)
    if m2 == 0.0:
        return None
    m4 = np.mean(d ** 4)
    return float(m4 / (m2 * m2) - 3.0)


def _pairwise_stats(cols):
    """Mean |pearson| and mean |covariance| over attribute pairs with
    complete-case rows per pair."""
    p = len(cols)
    corrs, covs = [], []
    for i in range(p):
        for j in range(i + 1, p):
            both = ~cols[i].mask & ~cols[j].mask
            if np.count_nonzero(both) < 2:
                continue
            a = cols[i].data[both]
            b = cols[j].data[both]
            cov = float(np.mean((a - a.mean()) * (b - b.mean())))
            covs.append(abs(cov))
            sa, sb = a.std(), b.std()
            if sa > 0 and sb > 0:
                corrs.append(abs(cov / (sa * sb)))
    return corrs, covs


def _gravity(ds, numeric_cols):
    """Distance between majority- and minority-class centroids over
    z-scored numeric attributes."""
    counts = ds.class_counts
    maj = int(np.argmax(counts))
    mins = int(np.argmin(counts))
    if maj == mins:
        mins = (maj + 1) % ds.c
    deltas = []
    for col in numeric_cols:
        ok = ~col.mask
        vals = col.data[ok]
        if len(vals) == 0 or vals.std() == 0.0:
            continue
        z = (col.data - vals.mean()) / vals.std()
        a = z[ok & (ds.labels == maj)]
        b = z[ok & (ds.labels == mins)]
        if len(a) == 0 or len(b) == 0:
            continue
        deltas.append(a.mean() - b.mean())
    if not deltas:
        return None
    return float(np.sqrt(np.sum(np.square(deltas))))


def _max_cov_eigenvalue(numeric_cols):
    full = ~np.logical_or.reduce([c.mask for c in numeric_cols])
    if np.count_nonzero(full) < 2:
        return None
    X = np.column_stack([c.data[full] for c in numeric_cols])
    cov = np.cov(X, rowvar=False, ddof=1)
    cov = np.atleast_2d(cov)
    eig = np.linalg.eigvalsh(cov)
    return float(eig[-1])


def _anova_pvalues(ds, numeric_cols):
    out = []
    for col in numeric_cols:
        ok = ~col.mask
        groups = [col.data[ok & (ds.labels == k)] for k in range(ds.c)]
        groups = [g for g in groups if len(g) > 0]
        if len(groups) < 2 or sum(len(g) for g in groups) <= len(groups):
            continue
        if all(g.std() == 0.0 for g in groups):
            continue
        stat, p = stats.f_oneway(*groups)
        if np.isfinite(p):
            out.append(float(p))
    return out


def _shifted_means(numeric_cols):
    geos, harms, shifted = [], [], 0
    for col in numeric_cols:
        vals = col.data[~col.mask]
        if len(vals) == 0:
            continue
        if vals.min() <= 0.0:
            vals = vals + (1.0 - vals.min())
            shifted += 1
        geos.append(float(np.exp(np.mean(np.log(vals)))))
        harms.append(float(len(vals) / np.sum(1.0 / vals)))
    return geos, harms, shifted


def extract_statistical(ds):
    cols = ds.columns_of_kind(NUMERIC)
    entries = {name: None for name in (
        "mean_skewness", "mean_kurtosis", "mean_abs_correlation",
        "mean_abs_covariance", "sparsity", "gravity", "max_cov_eigenvalue",
        "mean_anova_pvalue", "mean_geometric_mean", "mean_harmonic_mean")}
    diagnostics = {"zero_variance_attrs": 0, "shifted_attrs": 0}

    # sparsity covers every attribute, numeric or not
    fracs = []
    for col in ds.features:
        present = col.data[~col.mask]
        distinct = len(np.unique(present)) if len(present) else 0
        fracs.append(1.0 - distinct / ds.n)
    entries["sparsity"] = float(np.mean(fracs))

    if not cols:
        return entries, diagnostics

    skews, kurts = [], []
    for col in cols:
        vals = col.data[~col.mask]
        if len(vals) == 0:
            continue
        s = skewness(vals)
        if s is None:
            diagnostics["zero_variance_attrs"] += 1
            continue
        skews.append(s)
        kurts.append(excess_kurtosis(vals))
    if skews:
        entries["mean_skewness"] = float(np.mean(skews))
        entries["mean_kurtosis"] = float(np.mean(kurts))

    corrs, covs = _pairwise_stats(cols)
    if corrs:
        entries["mean_abs_correlation"] = float(np.mean(corrs))
    if covs:
        entries["mean_abs_covariance"] = float(np.mean(covs))

    entries["gravity"] = _gravity(ds, cols)
    entries["max_cov_eigenvalue"] = _max_cov_eigenvalue(cols)

    pvals = _anova_pvalues(ds, cols)
    if pvals:
        entries["mean_anova_pvalue"] = float(np.mean(pvals))

    geos, harms, shifted = _shifted_means(cols)
    diagnostics["shifted_attrs"] = shifted
    if geos:
        entries["mean_geometric_mean"] = float(np.mean(geos))
        entries["mean_harmonic_mean"] = float(np.mean(harms))
    return entries, diagnostics
