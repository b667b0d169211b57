# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled tree-construction backend.

Bit-for-bit twin of ``pytree``: same xorshift64* generator, same stable
sort order (feature value, then position inside the node), same
accumulation order for every running sum, same strict ">" tie-breaking,
and the same polynomial log2 so entropy splits match exactly.  Any
semantic change must be mirrored in ``pytree.py``.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport frexp
from libcpp.algorithm cimport sort as cpp_sort
from libcpp.pair cimport pair
from libcpp.vector cimport vector

cnp.import_array()

cdef double _NEG_INF = -float("inf")

CRIT_GINI = 0
CRIT_ENTROPY = 1
CRIT_MSE = 2
CRIT_FRIEDMAN = 3

SPLIT_BEST = 0
SPLIT_RANDOM = 1

LEAF = -1

cdef int _C_GINI = 0
cdef int _C_ENTROPY = 1
cdef int _C_MSE = 2
cdef int _C_FRIEDMAN = 3

cdef double _INV_2_53 = 1.0 / 9007199254740992.0
cdef int _LOG2_TERMS = 20
cdef double _TWO_OVER_LN2 = 2.8853900817779268

ctypedef unsigned long long u64
ctypedef long long i64
ctypedef pair[double, i64] dpair


cdef inline u64 _xs_next(u64* s) nogil:
    cdef u64 x = s[0]
    x ^= x >> 12
    x ^= x << 25
    x ^= x >> 27
    s[0] = x
    return x * <u64>2685821657736338717ULL


cdef inline double _xs_double(u64* s) nogil:
    return <double>(_xs_next(s) >> 11) * _INV_2_53


cdef inline u64 _xs_below(u64* s, u64 n) nogil:
    return _xs_next(s) % n


cdef inline double _log2_det(double x) nogil:
    cdef int e
    cdef double m = frexp(x, &e)
    cdef double z = (m - 1.0) / (m + 1.0)
    cdef double z2 = z * z
    cdef double acc = 1.0 / (2.0 * _LOG2_TERMS - 1.0)
    cdef int k
    for k in range(_LOG2_TERMS - 1, 0, -1):
        acc = acc * z2 + 1.0 / (2.0 * <double>k - 1.0)
    return e + (_TWO_OVER_LN2 * z) * acc


cdef inline double _gini_impurity(double* wc, int c, double total) nogil:
    cdef double sq = 0.0
    cdef int k
    for k in range(c):
        sq += wc[k] * wc[k]
    return 1.0 - sq / (total * total)


cdef inline double _entropy_impurity(double* wc, int c, double total) nogil:
    cdef double acc = 0.0, p
    cdef int k
    for k in range(c):
        if wc[k] > 0.0:
            p = wc[k] / total
            acc += p * _log2_det(p)
    return -acc


cdef struct StackRec:
    i64 start
    i64 end
    int depth
    int parent
    int is_left


def rng_doubles(seed, Py_ssize_t count):
    """Raw generator output, exported so tests can compare backends."""
    cdef u64 st = <u64>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    if st == 0:
        st = <u64>0x9E3779B97F4A7C15ULL
    out = np.empty(count, dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    for i in range(count):
        ov[i] = _xs_double(&st)
    return out


def apply_tree(children_left, children_right, feature, threshold, X):
    """Route rows to leaves; returns one node id per row."""
    cdef const int[::1] cl = np.ascontiguousarray(children_left, dtype=np.int32)
    cdef const int[::1] cr = np.ascontiguousarray(children_right, dtype=np.int32)
    cdef const int[::1] ft = np.ascontiguousarray(feature, dtype=np.int32)
    cdef const double[::1] th = np.ascontiguousarray(threshold, dtype=np.float64)
    cdef const double[:, ::1] xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    out = np.zeros(n, dtype=np.int32)
    cdef int[::1] ov = out
    cdef Py_ssize_t i
    cdef int node, f
    with nogil:
        for i in range(n):
            node = 0
            f = ft[node]
            while f >= 0:
                if xv[i, f] <= th[node]:
                    node = cl[node]
                else:
                    node = cr[node]
                f = ft[node]
            ov[i] = node
    return out


def build_tree_raw(X, y_cls, y_reg, w, n_classes, criterion, splitter,
                   max_depth, min_samples_split, min_samples_leaf,
                   max_features, seed):
    """Grow a tree and return its structure as flat arrays.

    Same contract as the fallback: (children_left, children_right, feature,
    threshold, impurity, weighted_n, raw_n, value, depth).
    """
    cdef const double[:, ::1] xv = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    cdef int p = <int>xv.shape[1]
    cdef int c = int(n_classes)
    cdef bint classification = c > 0
    cdef const i64[::1] yc
    cdef const double[::1] yr
    if classification:
        yc = np.ascontiguousarray(y_cls, dtype=np.int64)
        yr = np.zeros(1, dtype=np.float64)
    else:
        yc = np.zeros(1, dtype=np.int64)
        yr = np.ascontiguousarray(y_reg, dtype=np.float64)
    cdef const double[::1] wv = np.ascontiguousarray(w, dtype=np.float64)

    cdef int crit = int(criterion)
    cdef int split_kind = int(splitter)
    cdef int maxd = int(max_depth)
    if maxd < 0:
        maxd = np.iinfo(np.int32).max
    cdef int k_feat = int(max_features)
    if k_feat < 1:
        k_feat = 1
    if k_feat > p:
        k_feat = p
    cdef i64 msl = int(min_samples_leaf)
    if msl < 1:
        msl = 1
    cdef i64 mss = int(min_samples_split)
    if mss < 2:
        mss = 2

    cdef u64 st = <u64>(int(seed) & 0xFFFFFFFFFFFFFFFF)
    if st == 0:
        st = <u64>0x9E3779B97F4A7C15ULL

    cdef Py_ssize_t cap = 2 * n + 1
    children_left = np.full(cap, LEAF, dtype=np.int32)
    children_right = np.full(cap, LEAF, dtype=np.int32)
    feature = np.full(cap, LEAF, dtype=np.int32)
    threshold = np.full(cap, np.nan)
    impurity = np.zeros(cap)
    weighted_n = np.zeros(cap)
    raw_n = np.zeros(cap, dtype=np.int32)
    cdef int n_out = c if classification else 1
    value = np.zeros((cap, n_out))
    depth_arr = np.zeros(cap, dtype=np.int32)

    cdef int[::1] clv = children_left
    cdef int[::1] crv = children_right
    cdef int[::1] ftv = feature
    cdef double[::1] thv = threshold
    cdef double[::1] impv = impurity
    cdef double[::1] wnv = weighted_n
    cdef int[::1] rnv = raw_n
    cdef double[:, ::1] valv = value
    cdef int[::1] dpv = depth_arr

    samples_arr = np.arange(n, dtype=np.int64)
    cdef i64[::1] samples = samples_arr
    feat_arr = np.arange(p, dtype=np.int64)
    cdef i64[::1] feat_order = feat_arr
    wc_arr = np.zeros(max(c, 1), dtype=np.float64)
    wl_arr = np.zeros(max(c, 1), dtype=np.float64)
    cdef double[::1] wc = wc_arr
    cdef double[::1] wl = wl_arr

    cdef vector[dpair] buf
    buf.resize(n if n > 0 else 1)
    cdef vector[i64] scratch
    scratch.resize(n if n > 0 else 1)
    cdef vector[StackRec] stack
    cdef StackRec rec

    rec = StackRec(0, n, 0, -1, 0)
    stack.push_back(rec)

    cdef int n_nodes = 0
    cdef int node_id, depth, parent, is_left, n_pure, best_f, f, fi, k
    cdef i64 start, end, n_node, i, g, r, tmp, nl, nr
    cdef double total, node_imp, wtot, wl_sum, wr_sum, proxy, best_proxy
    cdef double sql, sqr, d, hl, hr, lo, hi, t, thr, u
    cdef double s_tot, sq_tot, mean, var_proxy, prod, sl_sum, sr_sum, diff
    cdef bint pure, have_split

    while stack.size() > 0:
        rec = stack.back()
        stack.pop_back()
        start = rec.start
        end = rec.end
        depth = rec.depth
        parent = rec.parent
        is_left = rec.is_left
        node_id = n_nodes
        n_nodes += 1
        if parent >= 0:
            if is_left:
                clv[parent] = node_id
            else:
                crv[parent] = node_id
        dpv[node_id] = depth
        n_node = end - start

        if classification:
            for k in range(c):
                wc[k] = 0.0
            for i in range(n_node):
                g = samples[start + i]
                wc[yc[g]] += wv[g]
            total = 0.0
            for k in range(c):
                total += wc[k]
            if crit == _C_GINI:
                node_imp = _gini_impurity(&wc[0], c, total) if total > 0.0 else 0.0
            else:
                node_imp = _entropy_impurity(&wc[0], c, total) if total > 0.0 else 0.0
            for k in range(c):
                valv[node_id, k] = wc[k]
            n_pure = 0
            for k in range(c):
                if wc[k] > 0.0:
                    n_pure += 1
            pure = n_pure <= 1
        else:
            s_tot = 0.0
            sq_tot = 0.0
            total = 0.0
            for i in range(n_node):
                g = samples[start + i]
                prod = wv[g] * yr[g]
                s_tot += prod
                sq_tot += prod * yr[g]
                total += wv[g]
            mean = s_tot / total
            node_imp = sq_tot / total - mean * mean
            valv[node_id, 0] = mean
            var_proxy = sq_tot - (s_tot * s_tot) / total
            pure = var_proxy <= 1e-12 * (1.0 + (sq_tot if sq_tot >= 0.0 else -sq_tot))

        impv[node_id] = node_imp
        wnv[node_id] = total
        rnv[node_id] = <int>n_node

        if depth >= maxd or n_node < mss or n_node < 2 * msl or pure:
            continue

        if k_feat < p:
            for fi in range(p):
                feat_order[fi] = fi
            for fi in range(k_feat):
                r = fi + <i64>_xs_below(&st, <u64>(p - fi))
                tmp = feat_order[fi]
                feat_order[fi] = feat_order[r]
                feat_order[r] = tmp

        have_split = False
        best_proxy = _NEG_INF
        best_f = -1
        thr = 0.0

        if split_kind == SPLIT_RANDOM:
            for fi in range(k_feat):
                f = <int>feat_order[fi] if k_feat < p else fi
                lo = xv[samples[start], f]
                hi = lo
                for i in range(1, n_node):
                    d = xv[samples[start + i], f]
                    if d < lo:
                        lo = d
                    if d > hi:
                        hi = d
                if lo == hi:
                    _xs_double(&st)
                    continue
                u = _xs_double(&st)
                t = lo + u * (hi - lo)
                if t >= hi:
                    t = lo
                nl = 0
                for i in range(n_node):
                    if xv[samples[start + i], f] <= t:
                        nl += 1
                if nl < msl or n_node - nl < msl:
                    continue
                for k in range(c):
                    wl[k] = 0.0
                    wc[k] = 0.0
                for i in range(n_node):
                    g = samples[start + i]
                    if xv[g, f] <= t:
                        wl[yc[g]] += wv[g]
                for i in range(n_node):
                    g = samples[start + i]
                    wc[yc[g]] += wv[g]
                wl_sum = 0.0
                wr_sum = 0.0
                for k in range(c):
                    wl_sum += wl[k]
                for k in range(c):
                    wc[k] = wc[k] - wl[k]
                for k in range(c):
                    wr_sum += wc[k]
                if wl_sum <= 0.0 or wr_sum <= 0.0:
                    continue
                if crit == _C_GINI:
                    sql = 0.0
                    sqr = 0.0
                    for k in range(c):
                        sql += wl[k] * wl[k]
                    for k in range(c):
                        sqr += wc[k] * wc[k]
                    proxy = sql / wl_sum + sqr / wr_sum
                else:
                    hl = _entropy_impurity(&wl[0], c, wl_sum)
                    hr = _entropy_impurity(&wc[0], c, wr_sum)
                    proxy = -(wl_sum * hl + wr_sum * hr)
                if proxy > best_proxy:
                    best_proxy = proxy
                    best_f = f
                    thr = t
                    have_split = True
        elif classification:
            for fi in range(k_feat):
                f = <int>feat_order[fi] if k_feat < p else fi
                for i in range(n_node):
                    buf[i] = dpair(xv[samples[start + i], f], i)
                cpp_sort(buf.begin(), buf.begin() + n_node)
                if buf[0].first == buf[n_node - 1].first:
                    continue
                if msl > n_node - msl:
                    continue
                for k in range(c):
                    wc[k] = 0.0
                wtot = 0.0
                for i in range(n_node):
                    g = samples[start + buf[i].second]
                    wc[yc[g]] += wv[g]
                    wtot += wv[g]
                for k in range(c):
                    wl[k] = 0.0
                wl_sum = 0.0
                for i in range(1, n_node):
                    g = samples[start + buf[i - 1].second]
                    wl[yc[g]] += wv[g]
                    wl_sum += wv[g]
                    if i < msl:
                        continue
                    if i > n_node - msl:
                        break
                    if buf[i - 1].first == buf[i].first:
                        continue
                    wr_sum = wtot - wl_sum
                    if wl_sum <= 0.0 or wr_sum <= 0.0:
                        continue
                    if crit == _C_GINI:
                        sql = 0.0
                        sqr = 0.0
                        for k in range(c):
                            sql += wl[k] * wl[k]
                        for k in range(c):
                            d = wc[k] - wl[k]
                            sqr += d * d
                        proxy = sql / wl_sum + sqr / wr_sum
                    else:
                        hl = 0.0
                        hr = 0.0
                        for k in range(c):
                            if wl[k] > 0.0:
                                d = wl[k] / wl_sum
                                hl += d * _log2_det(d)
                        for k in range(c):
                            d = wc[k] - wl[k]
                            if d > 0.0:
                                d = d / wr_sum
                                hr += d * _log2_det(d)
                        hl = -hl
                        hr = -hr
                        proxy = -(wl_sum * hl + wr_sum * hr)
                    if proxy > best_proxy:
                        best_proxy = proxy
                        best_f = f
                        thr = 0.5 * (buf[i - 1].first + buf[i].first)
                        have_split = True
        else:
            for fi in range(k_feat):
                f = <int>feat_order[fi] if k_feat < p else fi
                for i in range(n_node):
                    buf[i] = dpair(xv[samples[start + i], f], i)
                cpp_sort(buf.begin(), buf.begin() + n_node)
                if buf[0].first == buf[n_node - 1].first:
                    continue
                if msl > n_node - msl:
                    continue
                s_tot = 0.0
                wtot = 0.0
                for i in range(n_node):
                    g = samples[start + buf[i].second]
                    s_tot += wv[g] * yr[g]
                    wtot += wv[g]
                sl_sum = 0.0
                wl_sum = 0.0
                for i in range(1, n_node):
                    g = samples[start + buf[i - 1].second]
                    sl_sum += wv[g] * yr[g]
                    wl_sum += wv[g]
                    if i < msl:
                        continue
                    if i > n_node - msl:
                        break
                    if buf[i - 1].first == buf[i].first:
                        continue
                    wr_sum = wtot - wl_sum
                    if wl_sum <= 0.0 or wr_sum <= 0.0:
                        continue
                    sr_sum = s_tot - sl_sum
                    if crit == _C_FRIEDMAN:
                        diff = sl_sum / wl_sum - sr_sum / wr_sum
                        proxy = (wl_sum * wr_sum) * (diff * diff)
                    else:
                        proxy = (sl_sum * sl_sum) / wl_sum + (sr_sum * sr_sum) / wr_sum
                    if proxy > best_proxy:
                        best_proxy = proxy
                        best_f = f
                        thr = 0.5 * (buf[i - 1].first + buf[i].first)
                        have_split = True

        if not have_split:
            continue

        ftv[node_id] = best_f
        thv[node_id] = thr

        nl = 0
        for i in range(n_node):
            g = samples[start + i]
            if xv[g, best_f] <= thr:
                scratch[nl] = g
                nl += 1
        nr = nl
        for i in range(n_node):
            g = samples[start + i]
            if not (xv[g, best_f] <= thr):
                scratch[nr] = g
                nr += 1
        for i in range(n_node):
            samples[start + i] = scratch[i]

        rec = StackRec(start + nl, end, depth + 1, node_id, 0)
        stack.push_back(rec)
        rec = StackRec(start, start + nl, depth + 1, node_id, 1)
        stack.push_back(rec)

    sl = slice(0, n_nodes)
    return (children_left[sl].copy(), children_right[sl].copy(),
            feature[sl].copy(), threshold[sl].copy(), impurity[sl].copy(),
            weighted_n[sl].copy(), raw_n[sl].copy(), value[sl].copy(),
            depth_arr[sl].copy())
