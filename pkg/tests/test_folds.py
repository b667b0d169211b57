"""Stratified repeated k-fold: partition discipline and stratification."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from metacash.folds import FoldError, stratified_assignment, stratified_kfold
from conftest import blob_problem, numeric_dataset


def test_assignment_partitions_everything():
    labels = np.random.default_rng(0).integers(0, 3, size=97)
    asg = stratified_assignment(labels, k=5, repeats=2, seed=1)
    assert asg.shape == (2, 97)
    for r in range(2):
        assert set(np.unique(asg[r])) == set(range(5))


def test_folds_disjoint_and_cover():
    X, y = blob_problem(n=83, seed=2)
    ds = numeric_dataset(X, y)
    plan = stratified_kfold(ds, k=4, repeats=3, seed=9)
    for r in range(3):
        seen = np.zeros(ds.n, dtype=int)
        for f in range(4):
            te = plan.test_indices(r, f)
            tr = plan.train_indices(r, f)
            assert len(np.intersect1d(te, tr)) == 0
            assert len(te) + len(tr) == ds.n
            seen[te] += 1
        assert np.all(seen == 1)


def test_stratification_balance():
    # class proportions in each fold match the global ones within one item
    rng = np.random.default_rng(3)
    labels = np.repeat([0, 1, 2], [60, 30, 10])
    rng.shuffle(labels)
    asg = stratified_assignment(labels, k=5, repeats=1, seed=0)[0]
    for f in range(5):
        fold_labels = labels[asg == f]
        counts = np.bincount(fold_labels, minlength=3)
        assert counts.tolist() == [12, 6, 2]


def test_every_class_in_every_training_split():
    X, y = blob_problem(n=60, c=3, seed=4)
    ds = numeric_dataset(X, y)
    plan = stratified_kfold(ds, k=5, repeats=2, seed=7)
    for r, f, tr, te in plan.iter_splits():
        assert set(np.unique(ds.labels[tr])) == set(range(3))


def test_seed_determinism_and_repeat_variation():
    labels = np.random.default_rng(5).integers(0, 2, size=50)
    a = stratified_assignment(labels, k=5, repeats=2, seed=42)
    b = stratified_assignment(labels, k=5, repeats=2, seed=42)
    assert np.array_equal(a, b)
    assert not np.array_equal(a[0], a[1])
    c = stratified_assignment(labels, k=5, repeats=2, seed=43)
    assert not np.array_equal(a, c)


def test_class_smaller_than_k_rejected():
    X, y = blob_problem(n=30, c=2, seed=6)
    y[:] = 0
    y[0] = 1
    ds = numeric_dataset(X, y)
    with pytest.raises(FoldError):
        stratified_kfold(ds, k=3)


def test_k_out_of_range_rejected():
    X, y = blob_problem(n=10, seed=7)
    ds = numeric_dataset(X, y)
    with pytest.raises(FoldError):
        stratified_kfold(ds, k=1)
    with pytest.raises(FoldError):
        stratified_kfold(ds, k=11)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2 ** 31 - 1),
       st.lists(st.integers(0, 2), min_size=30, max_size=90))
def test_assignment_properties(k, seed, raw_labels):
    labels = np.asarray(raw_labels, dtype=np.int64)
    counts = np.bincount(labels, minlength=3)
    present = counts[counts > 0]
    if present.min() < k:
        return
    asg = stratified_assignment(labels, k=k, repeats=1, seed=seed)[0]
    # partition: every row has a fold, all folds non-empty
    assert asg.min() >= 0 and asg.max() < k
    assert len(np.unique(asg)) == k
    # per-class fold sizes differ by at most one
    for cls in np.unique(labels):
        sizes = np.bincount(asg[labels == cls], minlength=k)
        assert sizes.max() - sizes.min() <= 1
