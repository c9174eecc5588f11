"""numba kernels: weighted categorical tree growth and routing.

Trees grow best-first (highest weighted-Gini decrease first, node id as the
tie break), and node ids follow creation order. Consequences the rest of the
package leans on:

- the expansion sequence under a larger leaf budget is a bit-identical
  prefix of the sequence under any smaller budget (anytime property), so a
  forest grown once at the largest maxnodes serves every smaller maxnodes by
  truncation and every smaller ntree by slicing;
- per-node feature sampling is keyed by (tree seed, node id), never by
  traversal order, so parallel schedules cannot change results;
- split ties resolve to the lowest feature index via a strict-improvement
  scan in ascending feature order, and category-rate ties keep ascending
  category codes (stable insertion sort). Identical twin columns therefore
  always resolve to the earlier column.

Node layout per tree: node 0 is the root; expansion t (1-based) splits one
frontier node and appends its children at ids 2t-1 and 2t. ``split_at[n]``
records t for internal nodes (NEVER_SPLIT for leaves), so under a leaf
budget b a node is internal iff split_at[n] <= b-1. split_at strictly
increases along any root-to-leaf path.
"""

from __future__ import annotations

import numpy as np
from numba import njit

LEAF = -1
NEVER_SPLIT = np.iinfo(np.int32).max

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


@njit(cache=True, nogil=True, inline="always")
def _splitmix64(state):
    """One splitmix64 step: returns (new_state, output)."""
    state = state + _GOLDEN
    z = state
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    z = z ^ (z >> np.uint64(31))
    return state, z


@njit(cache=True, nogil=True, inline="always")
def _gini_sum(w_pos, w_all):
    # sum-weighted binary Gini: W * (1 - p^2 - q^2) == 2*w_pos*w_neg/W
    if w_all <= 0.0:
        return 0.0
    return 2.0 * w_pos * (w_all - w_pos) / w_all


@njit(cache=True, nogil=True)
def _heap_push(heap_dec, heap_node, size, dec, node):
    i = size
    heap_dec[i] = dec
    heap_node[i] = node
    while i > 0:
        up = (i - 1) // 2
        better = heap_dec[i] > heap_dec[up] or (
            heap_dec[i] == heap_dec[up] and heap_node[i] < heap_node[up]
        )
        if not better:
            break
        heap_dec[i], heap_dec[up] = heap_dec[up], heap_dec[i]
        heap_node[i], heap_node[up] = heap_node[up], heap_node[i]
        i = up
    return size + 1


@njit(cache=True, nogil=True)
def _heap_pop(heap_dec, heap_node, size):
    top_node = heap_node[0]
    size -= 1
    heap_dec[0] = heap_dec[size]
    heap_node[0] = heap_node[size]
    i = 0
    while True:
        left = 2 * i + 1
        right = left + 1
        best = i
        if left < size and (
            heap_dec[left] > heap_dec[best]
            or (heap_dec[left] == heap_dec[best] and heap_node[left] < heap_node[best])
        ):
            best = left
        if right < size and (
            heap_dec[right] > heap_dec[best]
            or (heap_dec[right] == heap_dec[best] and heap_node[right] < heap_node[best])
        ):
            best = right
        if best == i:
            break
        heap_dec[i], heap_dec[best] = heap_dec[best], heap_dec[i]
        heap_node[i], heap_node[best] = heap_node[best], heap_node[i]
        i = best
    return top_node, size


@njit(cache=True, nogil=True)
def _sample_features(n_features, mtry, tree_seed, node_id, feats):
    """Pick the candidate feature set for one node, ascending order.

    mtry == 0 means all features. Sampling is a partial Fisher-Yates keyed
    by (tree_seed, node_id) only.
    """
    if mtry <= 0 or mtry >= n_features:
        for f in range(n_features):
            feats[f] = f
        return n_features
    for f in range(n_features):
        feats[f] = f
    state = tree_seed ^ ((np.uint64(node_id) + np.uint64(1)) * _GOLDEN)
    for j in range(mtry):
        state, z = _splitmix64(state)
        pick = j + int(z % np.uint64(n_features - j))
        feats[j], feats[pick] = feats[pick], feats[j]
    # insertion sort the chosen prefix so the scan runs ascending
    for j in range(1, mtry):
        key = feats[j]
        i = j - 1
        while i >= 0 and feats[i] > key:
            feats[i + 1] = feats[i]
            i -= 1
        feats[i + 1] = key
    return mtry


@njit(cache=True, nogil=True)
def _order_present(codes, w, y, row_order, start, end, f, wtot, wpos, cats, rates):
    """Count one feature over a node segment and rate-order its present
    categories (ascending positive rate, ties by ascending category code).

    Returns the number of present categories; cats[:p] holds their codes in
    scan order and rates[:p] the matching rates.
    """
    k = wtot.shape[0]
    for c in range(k):
        wtot[c] = 0.0
        wpos[c] = 0.0
    for ii in range(start, end):
        i = row_order[ii]
        c = codes[i, f]
        wtot[c] += w[i]
        if y[i] == 1:
            wpos[c] += w[i]
    p = 0
    for c in range(k):
        if wtot[c] > 0.0:
            cats[p] = c
            rates[p] = wpos[c] / wtot[c]
            p += 1
    # stable insertion sort by rate; equal rates keep ascending code order
    for j in range(1, p):
        rate_key = rates[j]
        cat_key = cats[j]
        i = j - 1
        while i >= 0 and rates[i] > rate_key:
            rates[i + 1] = rates[i]
            cats[i + 1] = cats[i]
            i -= 1
        rates[i + 1] = rate_key
        cats[i + 1] = cat_key
    return p


@njit(cache=True, nogil=True)
def _best_split_for_node(
    codes, y, w, row_order, start, end,
    feats, n_feats, vocab_sizes,
    node_w, node_wpos,
    wtot, wpos, cats, rates,
):
    """Best (feature, prefix length) over the candidate features.

    The rate ordering makes the best of the p-1 contiguous prefixes the
    exact optimal binary-Gini category split. Strict > in ascending feature
    order breaks ties toward the lowest feature index and shortest prefix.
    Returns (feature, prefix_len, decrease); feature == -1 when no split
    has positive decrease.
    """
    g_node = _gini_sum(node_wpos, node_w)
    best_f = -1
    best_j = -1
    best_dec = 0.0
    for fi in range(n_feats):
        f = feats[fi]
        p = _order_present(codes, w, y, row_order, start, end, f, wtot, wpos, cats, rates)
        if p < 2:
            continue
        w_left = 0.0
        wpos_left = 0.0
        for j in range(p - 1):
            c = cats[j]
            w_left += wtot[c]
            wpos_left += wpos[c]
            w_right = node_w - w_left
            wpos_right = node_wpos - wpos_left
            dec = g_node - _gini_sum(wpos_left, w_left) - _gini_sum(wpos_right, w_right)
            if dec > best_dec:
                best_dec = dec
                best_f = f
                best_j = j
    return best_f, best_j, best_dec


@njit(cache=True, nogil=True)
def grow_tree(
    codes, y, w, cnt, vocab_sizes, row_order, n_rows,
    mtry, tree_seed, max_expansions, max_depth, minsplit, cp,
    feature, split_at, left_child, right_child, parent, depth,
    pred, frac, node_w, node_count, decrease,
    lut_offset, lut_pool,
    seg_start, seg_end,
    scratch_rows,
):
    """Grow one weighted categorical tree, best-first.

    codes: (n, F) int32 category codes for candidate rows.
    y: (n,) uint8 labels; w: (n,) float64 weights; cnt: (n,) int64 row
    multiplicities (the minsplit unit).
    row_order[:n_rows]: the row ids this tree trains on; permuted in place.
    mtry: per-node feature sample size (0 = all features).
    Split acceptance: decrease >= cp * root Gini, strictly positive beyond
    a 1e-12 relative guard, node count >= minsplit, depth < max_depth.

    Output arrays are caller-allocated (capacity 2*max_expansions+1); the
    function returns (n_nodes, n_expansions, lut_used).
    """
    n_features = vocab_sizes.shape[0]
    max_vocab = 0
    for f in range(n_features):
        if vocab_sizes[f] > max_vocab:
            max_vocab = vocab_sizes[f]

    wtot = np.empty(max_vocab, dtype=np.float64)
    wposb = np.empty(max_vocab, dtype=np.float64)
    cats = np.empty(max_vocab, dtype=np.int64)
    rates = np.empty(max_vocab, dtype=np.float64)
    feats = np.empty(n_features, dtype=np.int64)

    cap = feature.shape[0]
    heap_dec = np.empty(cap, dtype=np.float64)
    heap_node = np.empty(cap, dtype=np.int64)
    heap_size = 0
    cand_f = np.empty(cap, dtype=np.int64)
    cand_j = np.empty(cap, dtype=np.int64)
    cand_dec = np.empty(cap, dtype=np.float64)

    # root stats
    w_all = 0.0
    wpos_all = 0.0
    c_all = 0
    for ii in range(n_rows):
        i = row_order[ii]
        w_all += w[i]
        c_all += cnt[i]
        if y[i] == 1:
            wpos_all += w[i]

    feature[0] = LEAF
    split_at[0] = NEVER_SPLIT
    left_child[0] = -1
    right_child[0] = -1
    parent[0] = -1
    depth[0] = 0
    pred[0] = 1 if 2.0 * wpos_all >= w_all else 0
    frac[0] = wpos_all / w_all if w_all > 0.0 else 0.0
    node_w[0] = w_all
    node_count[0] = c_all
    decrease[0] = 0.0
    lut_offset[0] = -1
    seg_start[0] = 0
    seg_end[0] = n_rows
    n_nodes = 1
    lut_used = 0

    g_root = _gini_sum(wpos_all, w_all)
    threshold = cp * g_root
    guard = 1e-12 * g_root

    # node_wpos is recoverable from frac*node_w but kept exact in a scratch
    node_wpos = np.empty(cap, dtype=np.float64)
    node_wpos[0] = wpos_all

    def_ok = (
        c_all >= minsplit
        and 0 < max_depth
        and wpos_all > 0.0
        and wpos_all < w_all
        and max_expansions > 0
    )
    if def_ok:
        nf = _sample_features(n_features, mtry, tree_seed, 0, feats)
        bf, bj, bdec = _best_split_for_node(
            codes, y, w, row_order, 0, n_rows, feats, nf, vocab_sizes,
            w_all, wpos_all, wtot, wposb, cats, rates,
        )
        if bf >= 0 and bdec >= threshold and bdec > guard:
            cand_f[0] = bf
            cand_j[0] = bj
            cand_dec[0] = bdec
            heap_size = _heap_push(heap_dec, heap_node, heap_size, bdec, 0)

    n_exp = 0
    while heap_size > 0 and n_exp < max_expansions:
        node, heap_size = _heap_pop(heap_dec, heap_node, heap_size)
        n_exp += 1
        f = cand_f[node]
        start = seg_start[node]
        end = seg_end[node]

        # rebuild the committed feature's ordering; identical arithmetic to
        # the candidate pass, so the same prefix falls out
        p = _order_present(codes, w, y, row_order, start, end, f, wtot, wposb, cats, rates)
        k = vocab_sizes[f]
        off = lut_used
        for c in range(k):
            lut_pool[off + c] = 0
        for j in range(cand_j[node] + 1):
            lut_pool[off + cats[j]] = 1
        lut_used += k

        # stable partition: left block first, order preserved on both sides
        n_right = 0
        write = start
        for ii in range(start, end):
            i = row_order[ii]
            if lut_pool[off + codes[i, f]] == 1:
                row_order[write] = i
                write += 1
            else:
                scratch_rows[n_right] = i
                n_right += 1
        for jj in range(n_right):
            row_order[write + jj] = scratch_rows[jj]
        mid = write

        feature[node] = f
        split_at[node] = n_exp
        decrease[node] = cand_dec[node]
        lut_offset[node] = off

        child_depth = depth[node] + 1
        left = n_nodes
        right = n_nodes + 1
        n_nodes += 2
        left_child[node] = left
        right_child[node] = right

        for side in range(2):
            child = left if side == 0 else right
            cs = start if side == 0 else mid
            ce = mid if side == 0 else end
            cw = 0.0
            cwpos = 0.0
            cc = 0
            for ii in range(cs, ce):
                i = row_order[ii]
                cw += w[i]
                cc += cnt[i]
                if y[i] == 1:
                    cwpos += w[i]
            feature[child] = LEAF
            split_at[child] = NEVER_SPLIT
            left_child[child] = -1
            right_child[child] = -1
            parent[child] = node
            depth[child] = child_depth
            pred[child] = 1 if 2.0 * cwpos >= cw else 0
            frac[child] = cwpos / cw if cw > 0.0 else 0.0
            node_w[child] = cw
            node_count[child] = cc
            node_wpos[child] = cwpos
            decrease[child] = 0.0
            lut_offset[child] = -1
            seg_start[child] = cs
            seg_end[child] = ce

            if (
                cc >= minsplit
                and child_depth < max_depth
                and cwpos > 0.0
                and cwpos < cw
            ):
                nf = _sample_features(n_features, mtry, tree_seed, child, feats)
                bf, bj, bdec = _best_split_for_node(
                    codes, y, w, row_order, cs, ce, feats, nf, vocab_sizes,
                    cw, cwpos, wtot, wposb, cats, rates,
                )
                if bf >= 0 and bdec >= threshold and bdec > guard:
                    cand_f[child] = bf
                    cand_j[child] = bj
                    cand_dec[child] = bdec
                    heap_size = _heap_push(heap_dec, heap_node, heap_size, bdec, child)

    return n_nodes, n_exp, lut_used


@njit(cache=True, nogil=True)
def route_full(
    codes_q, base, feature, left_child, right_child, lut_offset, lut_pool,
    vocab_sizes, out_pred, out_frac, pred, frac,
):
    """Route rows to the full tree's leaves (no budget, no pruning)."""
    q = codes_q.shape[0]
    for r in range(q):
        node = 0
        while feature[base + node] != LEAF:
            f = feature[base + node]
            c = codes_q[r, f]
            if 0 <= c < vocab_sizes[f] and lut_pool[lut_offset[base + node] + c] == 1:
                node = left_child[base + node]
            else:
                node = right_child[base + node]
        out_pred[r] = pred[base + node]
        out_frac[r] = frac[base + node]


@njit(cache=True, nogil=True)
def route_flags(
    codes_q, feature, left_child, right_child, lut_offset, lut_pool,
    vocab_sizes, internal_ok, out_pred, out_frac, pred, frac,
):
    """Route rows with a per-node pruning mask: a node routes onward only
    while internal_ok says its split survives the active hyperparameters."""
    q = codes_q.shape[0]
    for r in range(q):
        node = 0
        while feature[node] != LEAF and internal_ok[node] == 1:
            f = feature[node]
            c = codes_q[r, f]
            if 0 <= c < vocab_sizes[f] and lut_pool[lut_offset[node] + c] == 1:
                node = left_child[node]
            else:
                node = right_child[node]
        out_pred[r] = pred[node]
        out_frac[r] = frac[node]


@njit(cache=True, nogil=True)
def grow_forest(
    codes, y, vocab_sizes,
    ntree, mtry, max_expansions, tree_seeds,
    feature, split_at, left_child, right_child, parent, depth,
    pred, frac, node_w, node_count, decrease, lut_offset, lut_pool,
    n_nodes_out, lut_used_out,
    cap_nodes, cap_lut,
):
    """Grow ntree bootstrap trees into pooled per-tree array slices.

    codes/y are already restricted to the training rows. Tree t trains on a
    with-replacement resample of those rows drawn from
    splitmix64(tree_seeds[t]); multiplicities become integer weights. Rows
    drawn zero times stay out of the tree entirely. minsplit is fixed at 2
    and cp at 0 (growth is bounded by max_expansions = maxnodes-1 and
    purity).
    """
    n = codes.shape[0]
    mult = np.zeros(n, dtype=np.int64)
    w = np.zeros(n, dtype=np.float64)
    cnt = np.zeros(n, dtype=np.int64)
    row_order = np.empty(n, dtype=np.int64)
    scratch = np.empty(n, dtype=np.int64)
    seg_a = np.empty(cap_nodes, dtype=np.int64)
    seg_b = np.empty(cap_nodes, dtype=np.int64)

    for t in range(ntree):
        state = tree_seeds[t]
        for i in range(n):
            mult[i] = 0
        for _ in range(n):
            state, z = _splitmix64(state)
            mult[int(z % np.uint64(n))] += 1
        n_rows = 0
        for i in range(n):
            if mult[i] > 0:
                row_order[n_rows] = i
                w[i] = float(mult[i])
                cnt[i] = mult[i]
                n_rows += 1

        nb = t * cap_nodes
        lb = t * cap_lut
        nn, _, lu = grow_tree(
            codes, y, w, cnt, vocab_sizes, row_order[:n_rows], n_rows,
            mtry, tree_seeds[t], max_expansions, 1 << 30, 2, 0.0,
            feature[nb : nb + cap_nodes], split_at[nb : nb + cap_nodes],
            left_child[nb : nb + cap_nodes], right_child[nb : nb + cap_nodes],
            parent[nb : nb + cap_nodes], depth[nb : nb + cap_nodes],
            pred[nb : nb + cap_nodes], frac[nb : nb + cap_nodes],
            node_w[nb : nb + cap_nodes], node_count[nb : nb + cap_nodes],
            decrease[nb : nb + cap_nodes],
            lut_offset[nb : nb + cap_nodes], lut_pool[lb : lb + cap_lut],
            seg_a, seg_b,
            scratch,
        )
        n_nodes_out[t] = nn
        lut_used_out[t] = lu


@njit(cache=True, nogil=True)
def forest_votes(
    codes_q, t0, t1, budgets,
    feature, split_at, left_child, right_child, lut_offset, lut_pool,
    vocab_sizes, pred, cap_nodes, cap_lut,
    votes,
):
    """Accumulate positive votes per (row, leaf-budget) over trees [t0, t1).

    budgets must be ascending. A node with split_at = s is a leaf under
    budget b iff b - 1 < s; split_at strictly increases along a path, so a
    single walk emits every budget in order.
    """
    q = codes_q.shape[0]
    n_budgets = budgets.shape[0]
    for t in range(t0, t1):
        nb = t * cap_nodes
        lb = t * cap_lut
        for r in range(q):
            node = 0
            bptr = 0
            while feature[nb + node] != LEAF:
                s = split_at[nb + node]
                while bptr < n_budgets and budgets[bptr] - 1 < s:
                    if pred[nb + node] == 1:
                        votes[r, bptr] += 1
                    bptr += 1
                if bptr == n_budgets:
                    break
                f = feature[nb + node]
                c = codes_q[r, f]
                if 0 <= c < vocab_sizes[f] and lut_pool[lb + lut_offset[nb + node] + c] == 1:
                    node = left_child[nb + node]
                else:
                    node = right_child[nb + node]
            if bptr < n_budgets and pred[nb + node] == 1:
                while bptr < n_budgets:
                    votes[r, bptr] += 1
                    bptr += 1


@njit(cache=True, nogil=True)
def forest_importance(
    t0, t1, budgets,
    feature, split_at, decrease, n_nodes, cap_nodes,
    imp,
):
    """Total split decrease per (budget, feature) over trees [t0, t1)."""
    n_budgets = budgets.shape[0]
    for t in range(t0, t1):
        nb = t * cap_nodes
        for node in range(n_nodes[t]):
            f = feature[nb + node]
            if f == LEAF:
                continue
            s = split_at[nb + node]
            for b in range(n_budgets):
                if budgets[b] - 1 >= s:
                    imp[b, f] += decrease[nb + node]


@njit(cache=True, nogil=True)
def fit_boost(
    codes, y, vocab_sizes,
    max_depth, n_rounds,
    feature, split_at, left_child, right_child, parent, depth,
    pred, frac, node_w, node_count, decrease, lut_offset, lut_pool,
    cap_nodes, cap_lut,
    n_nodes_out, raw_alpha_out, eps_out, imp_out,
):
    """The discrete reweighting boosting loop over weighted trees.

    codes/y are already restricted to the training rows. Round m fits a
    depth-bounded tree under the current weight distribution and records
    its raw coefficient a_m = ln((1-eps)/eps); the caller multiplies by the
    shrinkage. The weight update exp(alpha/shrinkage) = (1-eps)/eps is
    shrinkage-free, so the whole trajectory is too. Stops early when
    eps >= 0.5 (round discarded unless it is round one, kept with a = 0) or
    eps == 0 (eps clamped to 1e-10, round kept).

    Returns (rounds_kept, stop_code): 0 = rounds exhausted, 1 = eps 0,
    2 = eps >= 0.5, 3 = degenerate first round kept with a = 0.
    """
    n = codes.shape[0]
    w = np.full(n, 1.0 / n, dtype=np.float64)
    cnt = np.ones(n, dtype=np.int64)
    row_order = np.empty(n, dtype=np.int64)
    scratch = np.empty(n, dtype=np.int64)
    h = np.empty(n, dtype=np.uint8)
    hf = np.empty(n, dtype=np.float64)
    seg_a = np.empty(cap_nodes, dtype=np.int64)
    seg_b = np.empty(cap_nodes, dtype=np.int64)

    max_exp = (1 << max_depth) - 1
    if max_exp > (cap_nodes - 1) // 2:
        max_exp = (cap_nodes - 1) // 2

    rounds = 0
    stop = 0
    for m in range(n_rounds):
        for i in range(n):
            row_order[i] = i
        nb = m * cap_nodes
        lb = m * cap_lut
        nn, _, _ = grow_tree(
            codes, y, w, cnt, vocab_sizes, row_order, n,
            0, np.uint64(0), max_exp, max_depth, 2, 0.0,
            feature[nb : nb + cap_nodes], split_at[nb : nb + cap_nodes],
            left_child[nb : nb + cap_nodes], right_child[nb : nb + cap_nodes],
            parent[nb : nb + cap_nodes], depth[nb : nb + cap_nodes],
            pred[nb : nb + cap_nodes], frac[nb : nb + cap_nodes],
            node_w[nb : nb + cap_nodes], node_count[nb : nb + cap_nodes],
            decrease[nb : nb + cap_nodes],
            lut_offset[nb : nb + cap_nodes], lut_pool[lb : lb + cap_lut],
            seg_a, seg_b,
            scratch,
        )
        n_nodes_out[m] = nn

        route_full(
            codes, nb, feature, left_child, right_child,
            lut_offset, lut_pool[lb : lb + cap_lut], vocab_sizes, h, hf, pred, frac,
        )
        eps = 0.0
        for i in range(n):
            if h[i] != y[i]:
                eps += w[i]

        if eps >= 0.5:
            if m == 0:
                raw_alpha_out[0] = 0.0
                eps_out[0] = eps
                for node in range(nn):
                    f = feature[nb + node]
                    if f != LEAF:
                        imp_out[f] += decrease[nb + node]
                rounds = 1
                stop = 3
            else:
                stop = 2
            break

        rounds = m + 1
        if eps == 0.0:
            eps = 1e-10
            raw_alpha_out[m] = np.log((1.0 - eps) / eps)
            eps_out[m] = 0.0
            for node in range(nn):
                f = feature[nb + node]
                if f != LEAF:
                    imp_out[f] += decrease[nb + node]
            stop = 1
            break

        raw_alpha_out[m] = np.log((1.0 - eps) / eps)
        eps_out[m] = eps
        for node in range(nn):
            f = feature[nb + node]
            if f != LEAF:
                imp_out[f] += decrease[nb + node]

        ratio = (1.0 - eps) / eps
        total = 0.0
        for i in range(n):
            if h[i] != y[i]:
                w[i] *= ratio
            total += w[i]
        for i in range(n):
            w[i] /= total

    return rounds, stop


@njit(cache=True, nogil=True)
def boost_margins(
    codes_q, rounds, raw_alpha,
    feature, split_at, left_child, right_child, lut_offset, lut_pool,
    vocab_sizes, pred, cap_nodes, cap_lut,
    margins,
):
    """Normalized ensemble margin per row: sum(a_m h_m) / sum(a_m), with
    h in {-1, +1}. Computed on the raw (shrinkage-free) coefficients, so
    scores are bit-identical across shrinkage values. All-zero coefficient
    sums yield margin 0."""
    q = codes_q.shape[0]
    total = 0.0
    for m in range(rounds):
        total += raw_alpha[m]
    for r in range(q):
        acc = 0.0
        for m in range(rounds):
            nb = m * cap_nodes
            lb = m * cap_lut
            node = 0
            while feature[nb + node] != LEAF:
                f = feature[nb + node]
                c = codes_q[r, f]
                if 0 <= c < vocab_sizes[f] and lut_pool[lb + lut_offset[nb + node] + c] == 1:
                    node = left_child[nb + node]
                else:
                    node = right_child[nb + node]
            if pred[nb + node] == 1:
                acc += raw_alpha[m]
            else:
                acc -= raw_alpha[m]
        margins[r] = acc / total if total > 0.0 else 0.0
