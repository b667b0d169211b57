"""Decision-tree structure meta-features.

A single unpruned entropy tree is grown on the one-hot encoded dataset
(mean/mode imputed).  Rows are first sorted into a canonical order so
the characterization does not depend on how the file happened to be
shuffled.  All 17 entries describe the shape of that tree.
"""

import numpy as np

from ..datasets import NUMERIC
from ..learners.encoding import FeatureEncoder
from .catalogue import MODEL_BASED


def _encoded_view(ds):
    """One-hot design matrix plus encoded-column -> source-attribute map."""
    enc = FeatureEncoder(imputation="mean").fit(ds)
    X = enc.transform(ds)
    src = []
    for s, col in enumerate(ds.features):
        width = 1 if col.kind == NUMERIC else len(col.categories)
        src.extend([s] * width)
    return X, np.asarray(src, dtype=np.int64)


def _canonical_order(X, y):
    keys = [y] + [X[:, j] for j in range(X.shape[1] - 1, -1, -1)]
    return np.lexsort(keys)


def characterization_tree(ds):
    from ..engine import grow_tree

    X, src = _encoded_view(ds)
    order = _canonical_order(X, ds.labels)
    tree = grow_tree(X[order], ds.labels[order], n_classes=ds.c,
                     criterion="entropy", seed=0)
    return tree, src


def extract_model_based(ds, seed=0):
    entries = {name: None for name in MODEL_BASED}
    if ds.p == 0 or ds.n < 2:
        return entries, {"model_tree_skipped": "not enough data"}

    tree, src = characterization_tree(ds)
    leaf = tree.is_leaf
    n_nodes = tree.n_nodes
    height = tree.max_depth

    level_sizes = np.bincount(tree.depth, minlength=height + 1)
    leaf_depths = tree.depth[leaf]
    leaf_value = tree.value[leaf]
    leaf_class = np.argmax(leaf_value, axis=1)
    per_class = np.bincount(leaf_class, minlength=ds.c) / max(1, len(leaf_class))
    agreement = float(leaf_value.max(axis=1).sum() / tree.value[0].sum())

    internal = ~leaf
    occurrences = np.bincount(src[tree.feature[internal]], minlength=ds.p)

    entries["tree_n_nodes"] = float(n_nodes)
    entries["tree_n_leaves"] = float(tree.n_leaves)
    entries["tree_height"] = float(height)
    entries["tree_width"] = float(level_sizes.max())
    entries["tree_mean_level_size"] = n_nodes / float(height + 1)
    entries["branch_longest"] = float(leaf_depths.max())
    entries["branch_shortest"] = float(leaf_depths.min())
    entries["branch_mean"] = float(leaf_depths.mean())
    entries["branch_std"] = float(leaf_depths.std())
    entries["leaves_per_class_min"] = float(per_class.min())
    entries["leaves_per_class_max"] = float(per_class.max())
    entries["leaves_agreement"] = agreement
    entries["attr_occ_min"] = float(occurrences.min())
    entries["attr_occ_max"] = float(occurrences.max())
    entries["attr_occ_mean"] = float(occurrences.mean())
    entries["attr_occ_std"] = float(occurrences.std())

    if internal.any():
        ids = np.where(internal)[0]
        left = tree.children_left[ids]
        right = tree.children_right[ids]
        w = tree.weighted_n
        gain = (tree.impurity[ids]
                - (w[left] / w[ids]) * tree.impurity[left]
                - (w[right] / w[ids]) * tree.impurity[right])
        entries["mean_info_gain"] = float(gain.mean())
    else:
        entries["mean_info_gain"] = 0.0
    return entries, {}
