"""Hot loops, each in a numba flavour and a vectorized numpy flavour.

All quantities are integers in "units": a weight w is stored as w * scale, so
that costs under rational flip weights stay exact.  The public functions at the
bottom dispatch on :func:`ccflip._accel.backend`.
"""
import numpy as np

from ._accel import backend, njit

I64 = np.int64


# ---------------------------------------------------------------- cost


@njit
def _cost_units_nb(labels, indptr, indices, ew, unit):
    n = labels.shape[0]
    plus = 0
    internal = 0
    for u in range(n):
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            if v > u:
                if labels[u] == labels[v]:
                    internal += 1
                else:
                    plus += ew[k]
    sizes = np.zeros(n, dtype=np.int64)
    for u in range(n):
        sizes[labels[u]] += 1
    pairs = 0
    for c in range(n):
        pairs += sizes[c] * (sizes[c] - 1) // 2
    return plus, (pairs - internal) * unit


def _cost_units_np(labels, indptr, indices, ew, unit):
    n = labels.shape[0]
    src = np.repeat(np.arange(n), np.diff(indptr))
    upper = indices > src
    same = labels[src] == labels[indices]
    plus = int(ew[upper & ~same].sum())
    internal = int(np.count_nonzero(upper & same))
    sizes = np.bincount(labels, minlength=n).astype(I64)
    pairs = int((sizes * (sizes - 1) // 2).sum())
    return plus, (pairs - internal) * unit


# ---------------------------------------------------------------- delta of C + S


@njit
def _delta_units_nb(labels, sizes, indptr, indices, ew, unit, members):
    n = labels.shape[0]
    ins = np.zeros(n, dtype=np.bool_)
    for u in members:
        ins[u] = True
    cnt = np.zeros(n, dtype=np.int64)
    for u in members:
        cnt[labels[u]] += 1
    k = members.shape[0]
    same_pairs = 0
    sep_pairs = 0
    for u in members:
        c = labels[u]
        if cnt[c] > 0:
            same_pairs += cnt[c] * (cnt[c] - 1) // 2
            sep_pairs += cnt[c] * (sizes[c] - cnt[c])
            cnt[c] = 0
    join_pairs = k * (k - 1) // 2 - same_pairs
    a_cnt = 0
    a_w = 0
    b_cnt = 0
    b_w = 0
    for u in members:
        for j in range(indptr[u], indptr[u + 1]):
            x = indices[j]
            if ins[x]:
                if labels[x] != labels[u]:
                    a_cnt += 1
                    a_w += ew[j]
            elif labels[x] == labels[u]:
                b_cnt += 1
                b_w += ew[j]
    a_cnt //= 2
    a_w //= 2
    return (join_pairs - a_cnt) * unit - a_w - (sep_pairs - b_cnt) * unit + b_w


def _delta_units_np(labels, sizes, indptr, indices, ew, unit, members):
    n = labels.shape[0]
    ins = np.zeros(n, dtype=bool)
    ins[members] = True
    labs, cnt = np.unique(labels[members], return_counts=True)
    cnt = cnt.astype(I64)
    k = members.shape[0]
    join_pairs = k * (k - 1) // 2 - int((cnt * (cnt - 1) // 2).sum())
    sep_pairs = int((cnt * (sizes[labs] - cnt)).sum())
    starts = indptr[members]
    lens = indptr[members + 1] - starts
    if lens.sum() == 0:
        return join_pairs * unit - sep_pairs * unit
    offs = np.repeat(starts - np.cumsum(lens) + lens, lens) + np.arange(lens.sum())
    src = np.repeat(members, lens)
    dst = indices[offs]
    w = ew[offs]
    same = labels[src] == labels[dst]
    inside = ins[dst]
    a = inside & ~same
    b = ~inside & same
    a_cnt = int(np.count_nonzero(a)) // 2
    a_w = int(w[a].sum()) // 2
    b_cnt = int(np.count_nonzero(b))
    b_w = int(w[b].sum())
    return (join_pairs - a_cnt) * unit - a_w - (sep_pairs - b_cnt) * unit + b_w


# ---------------------------------------------------------------- all-subset deltas


@njit
def _subset_deltas_nb(A, L):
    # delta(R + i) = delta(R) + sum_{j in R} B_ij - c_i, with i the lowest bit
    n = A.shape[0]
    B = np.empty((n, n), dtype=np.int64)
    c = np.zeros(n, dtype=np.int64)
    for i in range(n):
        for j in range(n):
            B[i, j] = A[i, j] * (1 + L[i, j])
            c[i] += A[i, j] * L[i, j]
    total = 1 << n
    out = np.zeros(total, dtype=np.int64)
    for mask in range(1, total):
        i = 0
        while not (mask >> i) & 1:
            i += 1
        rest = mask ^ (1 << i)
        acc = out[rest] - c[i]
        r = rest
        j = i + 1
        while r >> j:
            if (r >> j) & 1:
                acc += B[i, j]
            j += 1
        out[mask] = acc
    return out


def subset_masks(n):
    masks = np.arange(1 << n, dtype=I64)
    return ((masks[:, None] >> np.arange(n)) & 1).astype(I64)


def _subset_deltas_np(A, L):
    n = A.shape[0]
    B = A * (1 + L)
    c = (A * L).sum(axis=1)
    M = subset_masks(n)
    return ((M @ B) * M).sum(axis=1) // 2 - M @ c


# ---------------------------------------------------------------- partition oracle


@njit
def _rgs_search_nb(plus, minus, req, forb, min_size, prune):
    """Depth-first walk over restricted-growth strings in lexicographic order."""
    n = plus.shape[0]
    a = np.zeros(n, dtype=np.int64)
    mx = np.zeros(n, dtype=np.int64)
    partial = np.zeros(n + 1, dtype=np.int64)
    best_a = np.zeros(n, dtype=np.int64)
    best = np.int64(-1)
    leaves = 0
    sizes = np.zeros(n, dtype=np.int64)
    if n == 1:
        return best_a, np.int64(0), 1
    i = 1
    a[1] = -1
    while i >= 1:
        a[i] += 1
        if a[i] > mx[i - 1] + 1:
            i -= 1
            continue
        c = partial[i]
        ok = True
        for j in range(i):
            if a[j] == a[i]:
                if forb[i, j]:
                    ok = False
                    break
                c += minus[i, j]
            else:
                if req[i, j]:
                    ok = False
                    break
                c += plus[i, j]
        if not ok:
            continue
        if prune and best >= 0 and c >= best:
            continue
        partial[i + 1] = c
        mx[i] = max(mx[i - 1], a[i])
        if i == n - 1:
            for t in range(n):
                sizes[t] = 0
            for t in range(n):
                sizes[a[t]] += 1
            good = True
            for t in range(n):
                if sizes[a[t]] > 1 and sizes[a[t]] < min_size[t]:
                    good = False
                    break
            if not good:
                continue
            leaves += 1
            if best < 0 or c < best:
                best = c
                best_a[:] = a
            continue
        i += 1
        a[i] = -1
    return best_a, best, leaves


def all_rgs(n):
    """Every restricted-growth string of length n, in lexicographic order."""
    rows = np.zeros((1, 1), dtype=np.int8)
    mx = np.zeros(1, dtype=np.int64)
    for _ in range(1, n):
        counts = mx + 2
        rep = np.repeat(np.arange(rows.shape[0]), counts)
        vals = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
        rows = np.hstack([rows[rep], vals[:, None].astype(np.int8)])
        mx = np.maximum(mx[rep], vals)
    return rows


def _rgs_search_np(plus, minus, req, forb, min_size, prune):
    n = plus.shape[0]
    R = all_rgs(n)
    keep = np.ones(R.shape[0], dtype=bool)
    cost = np.zeros(R.shape[0], dtype=I64)
    for i in range(n):
        for j in range(i):
            same = R[:, i] == R[:, j]
            if req[i, j]:
                keep &= same
            if forb[i, j]:
                keep &= ~same
            cost += np.where(same, minus[i, j], plus[i, j])
    if np.any(min_size > 1):
        for t in range(n):
            size_t = (R == R[:, t:t + 1]).sum(axis=1)
            keep &= (size_t == 1) | (size_t >= min_size[t])
    idx = np.flatnonzero(keep)
    best = idx[np.argmin(cost[idx])]
    return R[best].astype(I64), cost[best], int(idx.shape[0])


# ---------------------------------------------------------------- sampled estimators


@njit
def _has_edge_nb(indptr, indices, u, v):
    lo = indptr[u]
    hi = indptr[u + 1]
    while lo < hi:
        mid = (lo + hi) // 2
        x = indices[mid]
        if x == v:
            return True
        if x < v:
            lo = mid + 1
        else:
            hi = mid
    return False


@njit
def _est_terms_nb(vs, samples, s_tilde, labels, indptr, indices, layer_labels,
                  layer_units, scale, dw, dw_c, csize, d_c):
    """eta0-scaled integer numerators of the stay and move estimators."""
    eta0 = samples.shape[0]
    nl = layer_units.shape[0]
    stays = np.empty(vs.shape[0], dtype=np.int64)
    moves = np.empty(vs.shape[0], dtype=np.int64)
    for t in range(vs.shape[0]):
        v = vs[t]
        s_st = 0
        s_mv = 0
        for j in range(eta0):
            u = samples[j]
            term = 0
            if u != v and _has_edge_nb(indptr, indices, v, u):
                w = scale
                for l in range(nl):
                    if layer_labels[l, u] != layer_labels[l, v]:
                        w += layer_units[l]
                term = w + scale
            s_mv += term
            if u != v and labels[u] == labels[v]:
                s_st += term - scale
        stays[t] = eta0 * (dw[v] - dw_c[v] + scale * (csize[v] - d_c[v] - 1)) + s_tilde * s_st
        moves[t] = eta0 * (dw[v] + scale * (s_tilde - 1)) - s_tilde * s_mv
    return stays, moves


def _est_terms_np(vs, samples, s_tilde, labels, indptr, indices, layer_labels,
                  layer_units, scale, dw, dw_c, csize, d_c):
    eta0 = samples.shape[0]
    V = np.repeat(vs, eta0)
    U = np.tile(samples, vs.shape[0])
    n = labels.shape[0]
    src = np.repeat(np.arange(n, dtype=I64), np.diff(indptr))
    keys = src * n + indices
    q = V * n + U
    pos = np.searchsorted(keys, q)
    pos = np.minimum(pos, max(keys.shape[0] - 1, 0))
    adj = (keys[pos] == q) if keys.shape[0] else np.zeros(q.shape[0], dtype=bool)
    adj &= U != V
    w = np.full(V.shape[0], scale, dtype=I64)
    for l in range(layer_units.shape[0]):
        w += layer_units[l] * (layer_labels[l, U] != layer_labels[l, V])
    term = np.where(adj, w + scale, 0).reshape(vs.shape[0], eta0)
    inc = ((labels[U] == labels[V]) & (U != V)).reshape(vs.shape[0], eta0)
    s_mv = term.sum(axis=1)
    s_st = np.where(inc, term - scale, 0).sum(axis=1)
    stays = eta0 * (dw[vs] - dw_c[vs] + scale * (csize[vs] - d_c[vs] - 1)) + s_tilde * s_st
    moves = eta0 * (dw[vs] + scale * (s_tilde - 1)) - s_tilde * s_mv
    return stays.astype(I64), moves.astype(I64)


# ---------------------------------------------------------------- dispatch


def cost_units(labels, indptr, indices, ew, unit):
    fn = _cost_units_nb if backend() == "numba" else _cost_units_np
    plus, minus = fn(labels, indptr, indices, ew, I64(unit))
    return int(plus), int(minus)


def delta_units(labels, sizes, indptr, indices, ew, unit, members):
    fn = _delta_units_nb if backend() == "numba" else _delta_units_np
    return int(fn(labels, sizes, indptr, indices, ew, I64(unit), members))


def subset_deltas(A, L):
    """Cost change of C + S for every vertex subset S, indexed by bitmask."""
    A = np.ascontiguousarray(A, dtype=I64)
    L = np.ascontiguousarray(L, dtype=I64)
    fn = _subset_deltas_nb if backend() == "numba" else _subset_deltas_np
    return fn(A, L)


def rgs_search(plus, minus, req, forb, min_size, prune=True):
    fn = _rgs_search_nb if backend() == "numba" else _rgs_search_np
    a, best, leaves = fn(np.ascontiguousarray(plus, dtype=I64), np.ascontiguousarray(minus, dtype=I64),
                         np.ascontiguousarray(req, dtype=np.bool_), np.ascontiguousarray(forb, dtype=np.bool_),
                         np.ascontiguousarray(min_size, dtype=I64), bool(prune))
    return np.asarray(a, dtype=I64), int(best), int(leaves)


def est_terms(vs, samples, s_tilde, labels, indptr, indices, layer_labels, layer_units,
              scale, dw, dw_c, csize, d_c):
    fn = _est_terms_nb if backend() == "numba" else _est_terms_np
    return fn(np.ascontiguousarray(vs, dtype=I64), np.ascontiguousarray(samples, dtype=I64),
              I64(s_tilde), labels, indptr, indices, layer_labels, layer_units, I64(scale),
              dw, dw_c, csize, d_c)
