"""Array-backed weighted categorical trees and the CART-style classifier.

A TreePool holds one or more trees in flat per-tree array slices, matching
the kernel layout in _kernel. Single trees are pools with n_trees = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernel
from ..dataset import Columns, encode_against

LEAF = _kernel.LEAF
NEVER_SPLIT = _kernel.NEVER_SPLIT

_POOL_FIELDS = (
    ("feature", np.int32),
    ("split_at", np.int32),
    ("left_child", np.int32),
    ("right_child", np.int32),
    ("parent", np.int32),
    ("depth", np.int32),
    ("pred", np.uint8),
    ("frac", np.float64),
    ("node_w", np.float64),
    ("node_count", np.int64),
    ("decrease", np.float64),
    ("lut_offset", np.int64),
)


@dataclass(eq=False)
class TreePool:
    """n_trees trees stored in stride-cap_nodes array slices.

    split_at[n] is the 1-based expansion index at which node n was split
    (NEVER_SPLIT for leaves); node ids follow creation order, so the tree
    truncated to any smaller expansion budget is addressable in place.
    """

    n_trees: int
    cap_nodes: int
    cap_lut: int
    n_nodes: np.ndarray
    feature: np.ndarray
    split_at: np.ndarray
    left_child: np.ndarray
    right_child: np.ndarray
    parent: np.ndarray
    depth: np.ndarray
    pred: np.ndarray
    frac: np.ndarray
    node_w: np.ndarray
    node_count: np.ndarray
    decrease: np.ndarray
    lut_offset: np.ndarray
    lut_pool: np.ndarray

    def tree_view(self, t: int) -> dict[str, np.ndarray]:
        nb = t * self.cap_nodes
        lb = t * self.cap_lut
        nn = int(self.n_nodes[t])
        out = {
            name: getattr(self, name)[nb : nb + nn] for name, _ in _POOL_FIELDS
        }
        out["lut_pool"] = self.lut_pool[lb : lb + self.cap_lut]
        return out


def alloc_pool(n_trees: int, cap_nodes: int, cap_lut: int) -> TreePool:
    arrays = {
        name: np.zeros(n_trees * cap_nodes, dtype=dt) for name, dt in _POOL_FIELDS
    }
    return TreePool(
        n_trees=n_trees,
        cap_nodes=cap_nodes,
        cap_lut=cap_lut,
        n_nodes=np.zeros(n_trees, dtype=np.int64),
        lut_pool=np.zeros(n_trees * cap_lut, dtype=np.uint8),
        **arrays,
    )


def lut_capacity(vocab_sizes: np.ndarray, max_expansions: int) -> int:
    # each expansion writes one LUT of at most max(vocab) bytes
    return int(max(int(vocab_sizes.max()), 1) * max(max_expansions, 1))


def grow_single(
    codes: np.ndarray,
    y: np.ndarray,
    w: np.ndarray,
    cnt: np.ndarray,
    vocab_sizes: np.ndarray,
    *,
    mtry: int = 0,
    tree_seed: int = 0,
    max_expansions: int,
    max_depth: int,
    minsplit: int,
    cp: float,
) -> TreePool:
    """Grow one tree over all rows of codes and trim the pool to fit."""
    n = codes.shape[0]
    cap_nodes = 2 * max_expansions + 1
    cap_lut = lut_capacity(vocab_sizes, max_expansions)
    pool = alloc_pool(1, cap_nodes, cap_lut)
    row_order = np.arange(n, dtype=np.int64)
    scratch = np.empty(n, dtype=np.int64)
    seg_a = np.empty(cap_nodes, dtype=np.int64)
    seg_b = np.empty(cap_nodes, dtype=np.int64)
    nn, _, lu = _kernel.grow_tree(
        codes, y, w, cnt, vocab_sizes, row_order, n,
        mtry, np.uint64(tree_seed), max_expansions, max_depth, minsplit, cp,
        pool.feature, pool.split_at, pool.left_child, pool.right_child,
        pool.parent, pool.depth, pool.pred, pool.frac, pool.node_w,
        pool.node_count, pool.decrease, pool.lut_offset, pool.lut_pool,
        seg_a, seg_b, scratch,
    )
    pool.n_nodes[0] = nn
    trimmed = TreePool(
        n_trees=1,
        cap_nodes=nn,
        cap_lut=max(lu, 1),
        n_nodes=pool.n_nodes.copy(),
        lut_pool=pool.lut_pool[: max(lu, 1)].copy(),
        **{name: getattr(pool, name)[:nn].copy() for name, _ in _POOL_FIELDS},
    )
    return trimmed


def route_single(
    pool: TreePool, vocab_sizes: np.ndarray, codes_q: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Leaf majority and positive-weight fraction per query row."""
    q = codes_q.shape[0]
    out_pred = np.empty(q, dtype=np.uint8)
    out_frac = np.empty(q, dtype=np.float64)
    _kernel.route_full(
        codes_q, 0, pool.feature, pool.left_child, pool.right_child,
        pool.lut_offset, pool.lut_pool, vocab_sizes,
        out_pred, out_frac, pool.pred, pool.frac,
    )
    return out_pred, out_frac


@dataclass(eq=False)
class CartModel:
    """Single cost-complexity-gated tree classifier."""

    columns: Columns
    cp: float
    minsplit: int
    max_depth: int
    pool: TreePool
    root_gini: float

    @property
    def family(self) -> str:
        return "cart"

    def hyperparameters(self) -> dict:
        return {"cp": self.cp, "minsplit": self.minsplit, "max_depth": self.max_depth}


def vocab_sizes_of(columns: Columns) -> np.ndarray:
    return np.array([len(vocab) for _, vocab in columns], dtype=np.int64)


def fit_cart(
    columns: Columns,
    codes: np.ndarray,
    y: np.ndarray,
    *,
    cp: float,
    minsplit: int,
    max_depth: int,
) -> CartModel:
    """Fit the tree directly under its own acceptance gates.

    Equivalent to growing under looser gates and pruning: gates only decide
    which greedy splits are kept, never which split a node prefers.
    """
    n = codes.shape[0]
    vocab_sizes = vocab_sizes_of(columns)
    w = np.ones(n, dtype=np.float64)
    cnt = np.ones(n, dtype=np.int64)
    # children of every committed split are nonempty, so leaves <= n
    max_expansions = max(1, n)
    pool = grow_single(
        codes, y, w, cnt, vocab_sizes,
        max_expansions=max_expansions, max_depth=max_depth,
        minsplit=minsplit, cp=cp,
    )
    wpos = float((w * (y == 1)).sum())
    wall = float(w.sum())
    root_g = 2.0 * wpos * (wall - wpos) / wall if wall > 0 else 0.0
    return CartModel(
        columns=columns, cp=cp, minsplit=minsplit, max_depth=max_depth,
        pool=pool, root_gini=root_g,
    )


def prune_mask(
    pool: TreePool, root_gini: float, *, cp: float, minsplit: int, max_depth: int
) -> np.ndarray:
    """Per-node flags: does this node's split survive the given gates?

    Meant for trees grown under looser gates. A node whose ancestor fails
    is unreachable; route_flags never visits it, so no reachability fixup
    is needed for routing. Importance must intersect with reachability,
    see reachable_mask.
    """
    nn = int(pool.n_nodes[0])
    feature = pool.feature[:nn]
    ok = (
        (feature != LEAF)
        & (pool.decrease[:nn] >= cp * root_gini)
        & (pool.node_count[:nn] >= minsplit)
        & (pool.depth[:nn] < max_depth)
    )
    return ok.astype(np.uint8)


def reachable_mask(pool: TreePool, internal_ok: np.ndarray) -> np.ndarray:
    """Nodes that are split points in the pruned tree: their own gates pass
    and every ancestor's do too. Node ids are creation-ordered, so parents
    precede children and one forward pass settles it."""
    nn = int(pool.n_nodes[0])
    out = np.zeros(nn, dtype=bool)
    for node in range(nn):
        par = int(pool.parent[node])
        if par < 0:
            out[node] = bool(internal_ok[node])
        else:
            out[node] = bool(out[par]) and bool(internal_ok[node])
    return out


def route_pruned(
    pool: TreePool, vocab_sizes: np.ndarray, internal_ok: np.ndarray, codes_q: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    q = codes_q.shape[0]
    out_pred = np.empty(q, dtype=np.uint8)
    out_frac = np.empty(q, dtype=np.float64)
    _kernel.route_flags(
        codes_q, pool.feature, pool.left_child, pool.right_child,
        pool.lut_offset, pool.lut_pool, vocab_sizes, internal_ok,
        out_pred, out_frac, pool.pred, pool.frac,
    )
    return out_pred, out_frac


def cart_predict(model: CartModel, codes_q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    vocab_sizes = vocab_sizes_of(model.columns)
    ok = (model.pool.feature != LEAF).astype(np.uint8)
    pred, frac = route_pruned(model.pool, vocab_sizes, ok, codes_q)
    return pred.astype(bool), frac


def cart_predict_rows(model: CartModel, rows: Sequence) -> tuple[np.ndarray, np.ndarray]:
    return cart_predict(model, encode_against(model.columns, rows))


def cart_importance(model: CartModel) -> np.ndarray:
    """Raw total Gini decrease per feature over the tree's splits."""
    nn = int(model.pool.n_nodes[0])
    imp = np.zeros(len(model.columns), dtype=np.float64)
    for node in range(nn):
        f = int(model.pool.feature[node])
        if f != LEAF:
            imp[f] += float(model.pool.decrease[node])
    return imp


def pool_to_dict(pool: TreePool) -> dict:
    out = {
        "n_trees": pool.n_trees,
        "cap_nodes": pool.cap_nodes,
        "cap_lut": pool.cap_lut,
        "n_nodes": pool.n_nodes.tolist(),
        "lut_pool": pool.lut_pool.tolist(),
    }
    for name, _ in _POOL_FIELDS:
        out[name] = getattr(pool, name).tolist()
    return out


def pool_from_dict(data: dict) -> TreePool:
    arrays = {
        name: np.array(data[name], dtype=dt) for name, dt in _POOL_FIELDS
    }
    return TreePool(
        n_trees=int(data["n_trees"]),
        cap_nodes=int(data["cap_nodes"]),
        cap_lut=int(data["cap_lut"]),
        n_nodes=np.array(data["n_nodes"], dtype=np.int64),
        lut_pool=np.array(data["lut_pool"], dtype=np.uint8),
        **arrays,
    )
