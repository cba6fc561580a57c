"""Compiled inner loops for tree growing and nearest-neighbour search.

Randomness inside the kernels comes from an explicit splitmix64 state so
that results depend only on the seeds passed in, never on numba's global
generator or on thread scheduling.
"""
import numpy as np
from numba import njit

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S11 = np.uint64(11)
_S27 = np.uint64(27)
_S30 = np.uint64(30)
_S31 = np.uint64(31)
_INV53 = 1.0 / 9007199254740992.0


@njit(cache=True)
def next_u64(state):
    state[0] += _GOLDEN
    z = state[0]
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


@njit(cache=True)
def randbelow(state, n):
    u = np.float64(next_u64(state) >> _S11) * _INV53
    k = np.int64(u * n)
    if k >= n:
        k = n - 1
    return k


@njit(cache=True)
def sort_pairs(xs, ids, n):
    """Sort ``xs[:n]`` ascending in place, carrying ``ids`` along.

    Quicksort with median-of-three pivots and an insertion-sort finish.
    """
    lo_stack = np.empty(64, dtype=np.int64)
    hi_stack = np.empty(64, dtype=np.int64)
    top = 0
    lo = 0
    hi = n - 1
    while True:
        while hi - lo > 16:
            mid = (lo + hi) >> 1
            if xs[mid] < xs[lo]:
                xs[mid], xs[lo] = xs[lo], xs[mid]
                ids[mid], ids[lo] = ids[lo], ids[mid]
            if xs[hi] < xs[lo]:
                xs[hi], xs[lo] = xs[lo], xs[hi]
                ids[hi], ids[lo] = ids[lo], ids[hi]
            if xs[hi] < xs[mid]:
                xs[hi], xs[mid] = xs[mid], xs[hi]
                ids[hi], ids[mid] = ids[mid], ids[hi]
            pivot = xs[mid]
            i = lo
            j = hi
            while i <= j:
                while xs[i] < pivot:
                    i += 1
                while xs[j] > pivot:
                    j -= 1
                if i <= j:
                    xs[i], xs[j] = xs[j], xs[i]
                    ids[i], ids[j] = ids[j], ids[i]
                    i += 1
                    j -= 1
            # recurse into the smaller side, loop on the larger
            if j - lo < hi - i:
                if i < hi:
                    lo_stack[top] = i
                    hi_stack[top] = hi
                    top += 1
                hi = j
            else:
                if lo < j:
                    lo_stack[top] = lo
                    hi_stack[top] = j
                    top += 1
                lo = i
        for a in range(lo + 1, hi + 1):
            xv = xs[a]
            iv = ids[a]
            b = a - 1
            while b >= lo and xs[b] > xv:
                xs[b + 1] = xs[b]
                ids[b + 1] = ids[b]
                b -= 1
            xs[b + 1] = xv
            ids[b + 1] = iv
        if top == 0:
            break
        top -= 1
        lo = lo_stack[top]
        hi = hi_stack[top]


@njit(cache=True)
def use_presorted(p, mtry, m, presort_ratio):
    """Cost model for a node of *m* rows: partitioning presorted rows
    touches ``p`` entries per row, sorting on demand about
    ``mtry * log2(m)``."""
    return p <= presort_ratio * mtry * np.log2(m + 1.0)


@njit(cache=True)
def grow_tree(XT, y, w, S, order, mtry, min_split, presort_ratio, scan_ratio, state,
              feature, threshold, left, right, value, importance):
    """Grow one CART regression tree in place; return the node count.

    ``XT`` is the transposed feature matrix (features x rows). ``S`` holds,
    for every feature, the rows in play (``w > 0``) sorted by that feature;
    it is reordered. Each split takes the best weighted SSE reduction over
    features drawn in seeded random order until ``mtry`` non-constant ones
    have been examined; ties keep the first candidate seen. Rows with
    ``x <= threshold`` go left and thresholds are midpoints between
    consecutive distinct values.

    Each node obtains a drawn feature's rows in sorted order in one of
    three ways. When ``S`` carries a row per feature, large nodes read
    those presorted rows and partition all of them at each split; once
    that stops paying (``use_presorted``) the node and its subtree only
    maintain ``S[0]``. Without presorted rows, a node whose size ``m``
    satisfies ``n <= scan_ratio * m * log2(m)`` filters the global order
    ``order[f]`` of all ``n`` rows down to its own rows; smaller nodes
    sort their rows on demand. All paths see the same split candidates in
    the same order, so the choice only affects speed (short of tied
    feature values, whose summation order may differ).
    """
    p = XT.shape[0]
    m = S.shape[1]
    n_all = XT.shape[1]
    feats = np.arange(p)
    stamp = np.full(n_all, -1, dtype=np.int64)
    xbuf = np.empty(m)
    ibuf = np.empty(m, dtype=S.dtype)
    tmp = np.empty(m, dtype=S.dtype)
    side = np.zeros(XT.shape[1], dtype=np.uint8)
    st_start = np.empty(m + 1, dtype=np.int64)
    st_end = np.empty(m + 1, dtype=np.int64)
    st_node = np.empty(m + 1, dtype=np.int64)
    st_start[0] = 0
    st_end[0] = m
    st_node[0] = 0
    full = S.shape[0] == p
    top = 1
    n_nodes = 1
    rows0 = S[0]

    while top > 0:
        top -= 1
        start = st_start[top]
        end = st_end[top]
        node = st_node[top]
        cnt = end - start

        wsum = 0.0
        s = 0.0
        ylo = np.inf
        yhi = -np.inf
        for q in range(start, end):
            idx = rows0[q]
            wi = w[idx]
            yi = y[idx]
            wsum += wi
            s += wi * yi
            if yi < ylo:
                ylo = yi
            if yi > yhi:
                yhi = yi
        value[node] = s / wsum
        feature[node] = -1
        left[node] = -1
        right[node] = -1
        threshold[node] = 0.0
        if cnt < 2 or wsum < min_split or ylo == yhi:
            continue
        if full and use_presorted(p, mtry, cnt, presort_ratio):
            mode = 0
        elif n_all <= scan_ratio * cnt * np.log2(cnt + 1.0):
            mode = 2
            for q in range(start, end):
                stamp[rows0[q]] = node
        else:
            mode = 1

        best_proxy = -np.inf
        best_f = -1
        best_thr = 0.0
        visited = 0
        k = 0
        while k < p and visited < mtry:
            r = k + randbelow(state, p - k)
            f = feats[r]
            feats[r] = feats[k]
            feats[k] = f
            k += 1
            xf = XT[f]
            if mode == 0:
                row = S[f]
                for q in range(cnt):
                    ibuf[q] = row[start + q]
                    xbuf[q] = xf[ibuf[q]]
            elif mode == 2:
                of = order[f]
                c = 0
                for q in range(n_all):
                    idx = of[q]
                    if stamp[idx] == node:
                        ibuf[c] = idx
                        xbuf[c] = xf[idx]
                        c += 1
            else:
                for q in range(cnt):
                    ibuf[q] = rows0[start + q]
                    xbuf[q] = xf[ibuf[q]]
                sort_pairs(xbuf, ibuf, cnt)
            if xbuf[0] == xbuf[cnt - 1]:
                continue
            visited += 1
            wl = 0.0
            sl = 0.0
            for q in range(cnt - 1):
                idx = ibuf[q]
                wl += w[idx]
                sl += w[idx] * y[idx]
                xa = xbuf[q]
                xb = xbuf[q + 1]
                if xa < xb:
                    wr = wsum - wl
                    sr = s - sl
                    proxy = sl * sl / wl + sr * sr / wr
                    if proxy > best_proxy:
                        best_proxy = proxy
                        best_f = f
                        thr = 0.5 * (xa + xb)
                        if thr >= xb or thr < xa:
                            thr = xa
                        best_thr = thr

        if best_f < 0:
            continue
        gain = best_proxy - s * s / wsum
        if gain > 0.0:
            importance[best_f] += gain

        xf = XT[best_f]
        if mode == 0:
            nl = 0
            for q in range(start, end):
                idx = S[best_f, q]
                if xf[idx] <= best_thr:
                    side[idx] = 1
                    nl += 1
                else:
                    side[idx] = 0
            for j in range(p):
                if j == best_f:
                    continue
                row = S[j]
                # branch-free: the side flags are a coin flip to the predictor
                a = start
                b = 0
                for q in range(start, end):
                    idx = row[q]
                    g = np.int64(side[idx])
                    row[a] = idx
                    tmp[b] = idx
                    a += g
                    b += 1 - g
                for q in range(b):
                    row[a + q] = tmp[q]
        else:
            nl = 0
            b = 0
            for q in range(start, end):
                idx = rows0[q]
                if xf[idx] <= best_thr:
                    rows0[start + nl] = idx
                    nl += 1
                else:
                    tmp[b] = idx
                    b += 1
            for q in range(b):
                rows0[start + nl + q] = tmp[q]

        lid = n_nodes
        rid = n_nodes + 1
        n_nodes += 2
        feature[node] = best_f
        threshold[node] = best_thr
        left[node] = lid
        right[node] = rid
        st_start[top] = start + nl
        st_end[top] = end
        st_node[top] = rid
        top += 1
        st_start[top] = start
        st_end[top] = start + nl
        st_node[top] = lid
        top += 1

    return n_nodes


@njit(cache=True)
def presorted_rows(order, counts, n_rows):
    """Restrict the first *n_rows* features' global sort order to the rows
    with ``counts > 0``."""
    p = n_rows
    n = order.shape[1]
    m = 0
    for i in range(n):
        if counts[i] > 0:
            m += 1
    S = np.empty((p, m), dtype=np.int32)
    for j in range(p):
        c = 0
        for q in range(n):
            idx = order[j, q]
            if counts[idx] > 0:
                S[j, c] = idx
                c += 1
    return S


@njit(cache=True)
def predict_row(XT, row, swap_f, swap_v, feature, threshold, left, right, value):
    """Tree output for row ``row`` of ``XT.T`` with feature ``swap_f`` replaced
    by ``swap_v`` (pass ``swap_f = -1`` for no replacement)."""
    node = 0
    while feature[node] >= 0:
        f = feature[node]
        x = swap_v if f == swap_f else XT[f, row]
        if x <= threshold[node]:
            node = left[node]
        else:
            node = right[node]
    return value[node]


@njit(cache=True, nogil=True)
def fit_forest(XT, y, order, seeds, mtry, min_split, bootstrap, permutation, root_ratio,
               presort_ratio, scan_ratio, impurity_out, perm_out, perm_valid):
    """Fit one tree per seed, recording per-tree importances.

    ``order[j]`` is the argsort of feature ``j`` over all rows. Bootstrap
    resamples are represented by integer row weights. A tree builds
    presorted rows for every feature only if ``use_presorted`` holds at the
    root under ``root_ratio``, since building them costs ``p * n``.

    ``impurity_out[t, j]`` is the SSE reduction credited to feature ``j`` in
    tree ``t``. With ``permutation`` set, ``perm_out[t, j]`` is the increase
    of out-of-bag MSE when column ``j`` is shuffled among the OOB rows and
    ``perm_valid[t]`` flags trees that had OOB rows at all.
    """
    p, n = XT.shape
    cap = 2 * n + 1
    feature = np.empty(cap, dtype=np.int64)
    threshold = np.empty(cap)
    left = np.empty(cap, dtype=np.int64)
    right = np.empty(cap, dtype=np.int64)
    value = np.empty(cap)
    counts = np.zeros(n)
    state = np.empty(1, dtype=np.uint64)

    for t in range(seeds.shape[0]):
        state[0] = seeds[t]
        if bootstrap:
            counts[:] = 0.0
            for q in range(n):
                counts[randbelow(state, n)] += 1.0
        else:
            counts[:] = 1.0
        m = 0
        for q in range(n):
            if counts[q] > 0:
                m += 1
        S = presorted_rows(order, counts, p if use_presorted(p, mtry, m, root_ratio) else 1)
        grow_tree(XT, y, counts, S, order, mtry, min_split, presort_ratio, scan_ratio, state,
                  feature, threshold, left, right, value, impurity_out[t])

        if not permutation:
            continue
        oob = np.flatnonzero(counts == 0.0)
        n_oob = oob.shape[0]
        if n_oob == 0:
            perm_valid[t] = False
            continue
        perm_valid[t] = True
        base = 0.0
        for q in range(n_oob):
            row = oob[q]
            e = predict_row(XT, row, -1, 0.0, feature, threshold, left, right, value) - y[row]
            base += e * e
        base /= n_oob
        shuffled = np.empty(n_oob, dtype=oob.dtype)
        for j in range(p):
            for q in range(n_oob):
                shuffled[q] = oob[q]
            for q in range(n_oob - 1, 0, -1):
                r = randbelow(state, q + 1)
                tmpi = shuffled[q]
                shuffled[q] = shuffled[r]
                shuffled[r] = tmpi
            err = 0.0
            for q in range(n_oob):
                row = oob[q]
                e = predict_row(XT, row, j, XT[j, shuffled[q]],
                                feature, threshold, left, right, value) - y[row]
                err += e * e
            perm_out[t, j] = err / n_oob - base


@njit(cache=True, nogil=True)
def knn(Z, queries, k, out_idx):
    """Exact k nearest neighbours (squared Euclidean) of ``Z[queries]`` among
    all rows of ``Z``, excluding the query row itself.

    Neighbours are ordered by distance; equal distances go to the lower row
    index.
    """
    m, p = Z.shape
    dist = np.empty(k)
    for qi in range(queries.shape[0]):
        i = queries[qi]
        filled = 0
        worst = np.inf
        for j in range(m):
            if j == i:
                continue
            d = 0.0
            for c in range(p):
                diff = Z[i, c] - Z[j, c]
                d += diff * diff
                if d > worst:
                    break
            if filled < k:
                pos = filled
                filled += 1
            elif d < worst:
                pos = k - 1
            else:
                continue
            while pos > 0 and dist[pos - 1] > d:
                dist[pos] = dist[pos - 1]
                out_idx[qi, pos] = out_idx[qi, pos - 1]
                pos -= 1
            dist[pos] = d
            out_idx[qi, pos] = j
            if filled == k:
                worst = dist[k - 1]
