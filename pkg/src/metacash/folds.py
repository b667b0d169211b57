"""Stratified repeated k-fold plans.

Assignment works per class and per repeat: shuffle the class's instances,
then deal them round-robin starting from a random offset.  Every fold
therefore holds either floor(m/k) or ceil(m/k) instances of a class with m
members, which keeps each fold's class count within 1 of the exact
proportional share m/k.
"""

from dataclasses import dataclass

import numpy as np


class FoldError(ValueError):
    pass


@dataclass
class FoldPlan:
    k: int
    repeats: int
    assignments: np.ndarray  # shape (repeats, n), fold id per instance
    seed: int

    @property
    def n(self):
        return int(self.assignments.shape[1])

    def test_indices(self, repeat, fold):
        return np.where(self.assignments[repeat] == fold)[0]

    def train_indices(self, repeat, fold):
        return np.where(self.assignments[repeat] != fold)[0]

    def iter_splits(self):
        for r in range(self.repeats):
            for f in range(self.k):
                yield r, f, self.train_indices(r, f), self.test_indices(r, f)


def stratified_assignment(labels, k, repeats, seed):
    """Fold ids for a label vector; the core of stratified_kfold."""
    labels = np.asarray(labels, dtype=np.int64)
    n = len(labels)
    if not 2 <= k <= n:
        raise FoldError("k=%d out of range for n=%d" % (k, n))
    counts = np.bincount(labels)
    present = np.where(counts > 0)[0]
    small = [int(c) for c in present if counts[c] < k]
    if small:
        raise FoldError(
            "classes %r have fewer than k=%d instances" % (small, k))
    assignments = np.empty((repeats, n), dtype=np.int64)
    for r in range(repeats):
        rng = np.random.default_rng([seed, r])
        for cls in present:
            idx = np.where(labels == cls)[0]
            idx = rng.permutation(idx)
            offset = int(rng.integers(k))
            assignments[r, idx] = (np.arange(len(idx)) + offset) % k
    return assignments


def stratified_kfold(ds, k, repeats=1, seed=0):
    """Build a FoldPlan for a Dataset (see module docstring for bounds)."""
    if repeats < 1:
        raise FoldError("repeats must be >= 1")
    assignments = stratified_assignment(ds.labels, k, repeats, seed)
    return FoldPlan(k=int(k), repeats=int(repeats),
                    assignments=assignments, seed=int(seed))
