"""Pure-Python tree-construction backend.

Reference implementation of the split-search / tree-build kernel.  The
compiled backend (``_speedups``) implements the same algorithm with the same
RNG, the same accumulation order, and the same tie-breaking, so both
backends grow identical trees on identical inputs.  Keep any semantic
change here mirrored there.

Conventions shared by both backends:

- samples are partitioned in place inside one index array; work items are
  (start, end) ranges into it
- nodes are numbered in depth-first pre-order (node, left subtree, right)
- per-node candidate features come from a partial Fisher-Yates shuffle
  driven by the xorshift64* generator below (skipped when all features
  are candidates)
- sort order within a node is (feature value, position-in-range), which
  numpy's stable argsort produces directly
- a split point i puts the first i sorted samples on the left; candidates
  must respect min_samples_leaf on both sides and fall between two
  distinct feature values
- best split wins by strict ">" on the criterion proxy, so the first
  best in (feature order, position order) is kept
"""

import numpy as np

CRIT_GINI = 0
CRIT_ENTROPY = 1
CRIT_MSE = 2
CRIT_FRIEDMAN = 3

SPLIT_BEST = 0
SPLIT_RANDOM = 1

LEAF = -1

_U64 = (1 << 64) - 1
_XSMULT = 2685821657736338717
_SEED_FALLBACK = 0x9E3779B97F4A7C15
_INV_2_53 = 1.0 / 9007199254740992.0

_LOG2_TERMS = 20
_TWO_OVER_LN2 = 2.8853900817779268


def _log2_det(x):
    """log2 for positive inputs using only IEEE-exact primitive ops.

    atanh series on the mantissa, fixed term count and fixed evaluation
    order, so the scalar loop in the compiled backend produces bit-equal
    results (libm log2 can differ across platforms by an ulp).
    """
    m, e = np.frexp(x)
    z = (m - 1.0) / (m + 1.0)
    z2 = z * z
    acc = np.full_like(z, 1.0 / (2.0 * _LOG2_TERMS - 1.0))
    for k in range(_LOG2_TERMS - 1, 0, -1):
        acc = acc * z2 + 1.0 / (2.0 * k - 1.0)
    return e + (_TWO_OVER_LN2 * z) * acc


class _XorShift:
    """xorshift64* with the exact update both backends use."""

    def __init__(self, seed):
        self.state = (int(seed) & _U64) or _SEED_FALLBACK

    def next_u64(self):
        s = self.state
        s ^= s >> 12
        s = (s ^ (s << 25)) & _U64
        s ^= s >> 27
        self.state = s
        return (s * _XSMULT) & _U64

    def next_double(self):
        # 53-bit mantissa in [0, 1)
        return (self.next_u64() >> 11) * _INV_2_53

    def next_below(self, n):
        return self.next_u64() % n


def rng_doubles(seed, count):
    """Raw generator output, exported so tests can compare backends."""
    rng = _XorShift(seed)
    return np.array([rng.next_double() for _ in range(count)], dtype=np.float64)


def _seq_sum(a):
    # sequential accumulation; np.cumsum never uses pairwise summation
    if len(a) == 0:
        return 0.0
    return float(np.cumsum(a)[-1])


def _class_impurity(wc, total, criterion):
    if total <= 0.0:
        return 0.0
    if criterion == CRIT_GINI:
        sq = float(np.sum(wc * wc))
        return 1.0 - sq / (total * total)
    p = wc[wc > 0.0] / total
    return float(-np.sum(p * _log2_det(p)))


def build_tree_raw(X, y_cls, y_reg, w, n_classes, criterion, splitter,
                   max_depth, min_samples_split, min_samples_leaf,
                   max_features, seed):
    """Grow a tree and return its structure as flat arrays.

    Returns (children_left, children_right, feature, threshold, impurity,
    weighted_n, raw_n, value, depth); ``value`` holds weighted class counts
    per node for classification and the node mean for regression.
    """
    n, p = X.shape
    classification = n_classes > 0
    if max_depth < 0:
        max_depth = np.iinfo(np.int32).max
    k_feat = min(max(int(max_features), 1), p)
    msl = max(int(min_samples_leaf), 1)
    mss = max(int(min_samples_split), 2)
    rng = _XorShift(seed)

    cap = 2 * n + 1
    children_left = np.full(cap, LEAF, dtype=np.int32)
    children_right = np.full(cap, LEAF, dtype=np.int32)
    feature = np.full(cap, LEAF, dtype=np.int32)
    threshold = np.full(cap, np.nan)
    impurity = np.zeros(cap)
    weighted_n = np.zeros(cap)
    raw_n = np.zeros(cap, dtype=np.int32)
    n_out = n_classes if classification else 1
    value = np.zeros((cap, n_out))
    depth_arr = np.zeros(cap, dtype=np.int32)

    samples = np.arange(n, dtype=np.int64)
    feat_order = np.arange(p, dtype=np.int64)
    # work item: (start, end, depth, parent, is_left)
    stack = [(0, n, 0, -1, 0)]
    n_nodes = 0

    while stack:
        start, end, depth, parent, is_left = stack.pop()
        node_id = n_nodes
        n_nodes += 1
        if parent >= 0:
            if is_left:
                children_left[parent] = node_id
            else:
                children_right[parent] = node_id
        depth_arr[node_id] = depth

        idx = samples[start:end]
        n_node = end - start
        wi = w[idx]

        if classification:
            wc = np.bincount(y_cls[idx], weights=wi, minlength=n_classes)
            total = float(np.sum(wc))
            node_imp = _class_impurity(wc, total, criterion)
            value[node_id, :] = wc
            pure = int(np.count_nonzero(wc > 0.0)) <= 1
        else:
            prod = wi * y_reg[idx]
            s_tot = _seq_sum(prod)
            sq_tot = _seq_sum(prod * y_reg[idx])
            total = _seq_sum(wi)
            mean = s_tot / total
            node_imp = sq_tot / total - mean * mean
            value[node_id, 0] = mean
            var_proxy = sq_tot - (s_tot * s_tot) / total
            pure = var_proxy <= 1e-12 * (1.0 + abs(sq_tot))

        impurity[node_id] = node_imp
        weighted_n[node_id] = total
        raw_n[node_id] = n_node

        if depth >= max_depth or n_node < mss or n_node < 2 * msl or pure:
            continue

        if k_feat >= p:
            candidates = feat_order
        else:
            feat_order[:] = np.arange(p)
            for j in range(k_feat):
                r = j + rng.next_below(p - j)
                feat_order[j], feat_order[r] = feat_order[r], feat_order[j]
            candidates = feat_order[:k_feat]

        if splitter == SPLIT_RANDOM:
            best = _random_split(X, y_cls, wi, idx, candidates, n_classes,
                                 criterion, msl, rng)
        elif classification:
            best = _best_split_class(X, y_cls, wi, idx, candidates,
                                     n_classes, criterion, msl)
        else:
            best = _best_split_reg(X, y_reg, wi, idx, candidates,
                                   criterion, msl)

        if best is None:
            continue
        f, thr = best
        feature[node_id] = f
        threshold[node_id] = thr

        mask = X[idx, f] <= thr
        left_idx = idx[mask]
        right_idx = idx[~mask]
        n_left = len(left_idx)
        samples[start:start + n_left] = left_idx
        samples[start + n_left:end] = right_idx
        # right pushed first so the left child pops next (pre-order ids)
        stack.append((start + n_left, end, depth + 1, node_id, 0))
        stack.append((start, start + n_left, depth + 1, node_id, 1))

    sl = slice(0, n_nodes)
    return (children_left[sl].copy(), children_right[sl].copy(),
            feature[sl].copy(), threshold[sl].copy(), impurity[sl].copy(),
            weighted_n[sl].copy(), raw_n[sl].copy(), value[sl].copy(),
            depth_arr[sl].copy())


def _class_proxy(wl, wr, cum_wl, cum_wr, criterion):
    """Per-position split score for classification; higher is better."""
    if criterion == CRIT_GINI:
        sql = np.sum(cum_wl * cum_wl, axis=1)
        sqr = np.sum(cum_wr * cum_wr, axis=1)
        return sql / wl + sqr / wr
    pl = cum_wl / wl[:, None]
    pr = cum_wr / wr[:, None]
    lt = np.where(cum_wl > 0.0, pl * _log2_det(np.where(cum_wl > 0.0, pl, 1.0)), 0.0)
    rt = np.where(cum_wr > 0.0, pr * _log2_det(np.where(cum_wr > 0.0, pr, 1.0)), 0.0)
    hl = -np.sum(lt, axis=1)
    hr = -np.sum(rt, axis=1)
    return -(wl * hl + wr * hr)


def _best_split_class(X, y_cls, wi, idx, candidates, n_classes, criterion, msl):
    n_node = len(idx)
    best_proxy = -np.inf
    best = None
    y_node = y_cls[idx]
    for f in candidates:
        vals = X[idx, f]
        order = np.argsort(vals, kind="stable")
        sv = vals[order]
        if sv[0] == sv[-1]:
            continue
        sy = y_node[order]
        sw = wi[order]
        mat = np.zeros((n_node, n_classes))
        mat[np.arange(n_node), sy] = sw
        cum = np.cumsum(mat, axis=0)
        cw = np.cumsum(sw)
        wc = cum[-1]
        w_total = cw[-1]

        lo = msl
        hi = n_node - msl
        if lo > hi:
            continue
        pos = np.arange(lo, hi + 1)
        valid = sv[pos - 1] != sv[pos]
        valid &= (cw[pos - 1] > 0.0) & (w_total - cw[pos - 1] > 0.0)
        if not np.any(valid):
            continue
        pos = pos[valid]
        wl = cw[pos - 1]
        wr = w_total - wl
        proxy = _class_proxy(wl, wr, cum[pos - 1], wc[None, :] - cum[pos - 1], criterion)
        j = int(np.argmax(proxy))
        if proxy[j] > best_proxy:
            best_proxy = proxy[j]
            i = int(pos[j])
            best = (int(f), 0.5 * (sv[i - 1] + sv[i]))
    return best


def _best_split_reg(X, y_reg, wi, idx, candidates, criterion, msl):
    n_node = len(idx)
    best_proxy = -np.inf
    best = None
    y_node = y_reg[idx]
    for f in candidates:
        vals = X[idx, f]
        order = np.argsort(vals, kind="stable")
        sv = vals[order]
        if sv[0] == sv[-1]:
            continue
        sy = y_node[order]
        sw = wi[order]
        cs = np.cumsum(sw * sy)
        cw = np.cumsum(sw)
        s_total = cs[-1]
        w_total = cw[-1]

        lo = msl
        hi = n_node - msl
        if lo > hi:
            continue
        pos = np.arange(lo, hi + 1)
        valid = sv[pos - 1] != sv[pos]
        valid &= (cw[pos - 1] > 0.0) & (w_total - cw[pos - 1] > 0.0)
        if not np.any(valid):
            continue
        pos = pos[valid]
        sl = cs[pos - 1]
        wl = cw[pos - 1]
        sr = s_total - sl
        wr = w_total - wl
        if criterion == CRIT_FRIEDMAN:
            diff = sl / wl - sr / wr
            proxy = (wl * wr) * (diff * diff)
        else:
            proxy = (sl * sl) / wl + (sr * sr) / wr
        j = int(np.argmax(proxy))
        if proxy[j] > best_proxy:
            best_proxy = proxy[j]
            i = int(pos[j])
            best = (int(f), 0.5 * (sv[i - 1] + sv[i]))
    return best


def _random_split(X, y_cls, wi, idx, candidates, n_classes, criterion, msl, rng):
    """Extra-trees splitter: one uniform threshold per candidate feature."""
    best_proxy = -np.inf
    best = None
    y_node = y_cls[idx]
    n_node = len(idx)
    for f in candidates:
        vals = X[idx, f]
        lo = float(np.min(vals))
        hi = float(np.max(vals))
        if lo == hi:
            # RNG is still consumed so candidate order stays aligned with
            # the compiled backend
            rng.next_double()
            continue
        t = lo + rng.next_double() * (hi - lo)
        if t >= hi:
            t = lo
        mask = vals <= t
        nl = int(np.count_nonzero(mask))
        if nl < msl or n_node - nl < msl:
            continue
        wl_c = np.bincount(y_node[mask], weights=wi[mask], minlength=n_classes)
        wc = np.bincount(y_node, weights=wi, minlength=n_classes)
        wr_c = wc - wl_c
        wl = float(np.sum(wl_c))
        wr = float(np.sum(wr_c))
        if wl <= 0.0 or wr <= 0.0:
            continue
        if criterion == CRIT_GINI:
            proxy = float(np.sum(wl_c * wl_c)) / wl + float(np.sum(wr_c * wr_c)) / wr
        else:
            hl = _class_impurity(wl_c, wl, CRIT_ENTROPY)
            hr = _class_impurity(wr_c, wr, CRIT_ENTROPY)
            proxy = -(wl * hl + wr * hr)
        if proxy > best_proxy:
            best_proxy = proxy
            best = (int(f), t)
    return best


def apply_tree(children_left, children_right, feature, threshold, X):
    """Route rows to leaves; returns one node id per row."""
    n = X.shape[0]
    node = np.zeros(n, dtype=np.int32)
    while True:
        f = feature[node]
        active = f >= 0
        if not np.any(active):
            return node
        rows = np.where(active)[0]
        cur = node[rows]
        go_left = X[rows, f[rows]] <= threshold[cur]
        node[rows] = np.where(go_left, children_left[cur], children_right[cur])
