"""Exhaustive grid search.

Each dimension contributes a small value list (evenly spaced, log-spaced
where flagged, all categories); the full Cartesian product is evaluated.
Conditional dimensions only multiply the grid under the parent values
that activate them.
"""

import itertools

import numpy as np

from ..learners.spaces import CAT, INT
from .result import SearchError, SearchResult

GRID_CAP = 100_000


def dimension_values(dim, per_dim):
    """The grid points contributed by one dimension."""
    if dim.kind == CAT:
        return list(dim.choices)
    if dim.kind == INT:
        pts = np.linspace(dim.low, dim.high, per_dim)
        return [int(v) for v in np.unique(np.rint(pts).astype(np.int64))]
    if dim.log:
        pts = np.exp(np.linspace(np.log(dim.low), np.log(dim.high), per_dim))
        pts = np.clip(pts, dim.low, dim.high)
    else:
        pts = np.linspace(dim.low, dim.high, per_dim)
    if per_dim >= 2:
        # exp/log round trips can land a hair outside the bounds
        pts[0], pts[-1] = dim.low, dim.high
    return [float(v) for v in pts]


def grid_size(space, per_dim):
    """Exact number of configurations the grid enumerates."""
    counts = {d.name: len(dimension_values(d, per_dim))
              for d in space.dimensions}
    children = {}
    for d in space.dimensions:
        if d.condition:
            parent, value = d.condition
            children.setdefault(parent, []).append((value, d.name))
    total = 1
    for d in space.dimensions:
        if d.condition:
            continue
        if d.name not in children:
            total *= counts[d.name]
            continue
        contribution = 0
        for value in dimension_values(d, per_dim):
            branch = 1
            for needed, child in children[d.name]:
                if value == needed:
                    branch *= counts[child]
            contribution += branch
        total *= contribution
    return total


def grid_configs(space, per_dim):
    unconditional = [d for d in space.dimensions if not d.condition]
    conditional = [d for d in space.dimensions if d.condition]
    base_lists = [dimension_values(d, per_dim) for d in unconditional]
    for combo in itertools.product(*base_lists):
        cfg = dict(zip((d.name for d in unconditional), combo))
        active = [d for d in conditional
                  if cfg.get(d.condition[0]) == d.condition[1]]
        if not active:
            yield dict(cfg)
            continue
        for extra in itertools.product(
                *[dimension_values(d, per_dim) for d in active]):
            out = dict(cfg)
            out.update(zip((d.name for d in active), extra))
            yield out


def grid_search(space, objective, per_dim=5, max_grid=GRID_CAP):
    if per_dim < 1:
        raise SearchError("per_dim must be >= 1")
    size = grid_size(space, per_dim)
    if size > max_grid:
        raise SearchError("grid of %d points exceeds the cap of %d"
                          % (size, max_grid))
    history = []
    best_cfg = None
    best_score = -np.inf
    for cfg in grid_configs(space, per_dim):
        score = float(objective(cfg))
        history.append((cfg, score))
        if score > best_score:
            best_cfg, best_score = cfg, score
    return SearchResult(strategy="grid", best_config=best_cfg,
                        best_score=best_score, history=history,
                        evaluations_used=len(history), seed=0)
