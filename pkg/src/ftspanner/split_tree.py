"""Compressed split-tree with tight-virtual boxes and representative points.

Nodes live in flat numpy arrays indexed by node id. Ids follow a preorder
walk, so every child id exceeds its parent's and a node's points occupy the
contiguous slice ``perm[start:end]``. The lower child is always ``left``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np
from numba import njit

from .geometry import AABox, as_points, check_distinct


@dataclass(frozen=True)
class SplitTreeNode:
    id: int
    enclosing: AABox
    tight_virtual: AABox
    parent: int | None
    children: tuple[int, ...]
    start: int
    end: int
    level: int
    representatives: tuple[int, ...]

    @property
    def size(self) -> int:
        return self.end - self.start

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True, eq=False)
class CompressedSplitTree:
    points: np.ndarray
    perm: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    tv_lo: np.ndarray
    tv_hi: np.ndarray
    parent: np.ndarray
    left: np.ndarray
    right: np.ndarray
    start: np.ndarray
    end: np.ndarray
    level: np.ndarray
    split_dim: np.ndarray
    split_val: np.ndarray
    leaf_of_point: np.ndarray
    beta: float
    k: int | None = None
    rep_ptr: np.ndarray | None = None
    rep_idx: np.ndarray | None = None

    root = 0

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def n_nodes(self) -> int:
        return self.parent.shape[0]

    def is_leaf(self, i: int) -> bool:
        return self.left[i] < 0

    def size(self, i: int) -> int:
        return int(self.end[i] - self.start[i])

    def point_ids(self, i: int) -> np.ndarray:
        return self.perm[self.start[i]:self.end[i]]

    def reps(self, i: int) -> np.ndarray:
        if self.rep_ptr is None:
            raise RuntimeError("representatives not assigned")
        return self.rep_idx[self.rep_ptr[i]:self.rep_ptr[i + 1]]

    def tv_size(self) -> np.ndarray:
        return (self.tv_hi - self.tv_lo).max(axis=1)

    def node(self, i: int) -> SplitTreeNode:
        p = int(self.parent[i])
        kids = () if self.left[i] < 0 else (int(self.left[i]), int(self.right[i]))
        reps = () if self.rep_ptr is None else tuple(int(r) for r in self.reps(i))
        return SplitTreeNode(
            id=i, enclosing=AABox.from_arrays(self.lo[i], self.hi[i]),
            tight_virtual=AABox.from_arrays(self.tv_lo[i], self.tv_hi[i]),
            parent=None if p < 0 else p, children=kids,
            start=int(self.start[i]), end=int(self.end[i]),
            level=int(self.level[i]), representatives=reps)

    def ancestors(self, i: int) -> list[int]:
        out = []
        while i >= 0:
            out.append(i)
            i = int(self.parent[i])
        return out

    def to_json_nodes(self) -> list[dict]:
        out = []
        for i in range(self.n_nodes):
            kids = [] if self.left[i] < 0 else [int(self.left[i]), int(self.right[i])]
            reps = [] if self.rep_ptr is None else self.reps(i).tolist()
            out.append({
                "id": i, "parent": int(self.parent[i]) if self.parent[i] >= 0 else None,
                "children": kids, "lo": self.lo[i].tolist(), "hi": self.hi[i].tolist(),
                "tv_lo": self.tv_lo[i].tolist(), "tv_hi": self.tv_hi[i].tolist(),
                "reps": reps, "level": int(self.level[i])})
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json_nodes())


def build_tree(points, beta: float = 2.0) -> CompressedSplitTree:
    """Build the compressed split-tree of a set of distinct points."""
    pts = as_points(points)
    check_distinct(pts)
    if not 1.0 <= beta <= 2.0:
        raise ValueError(f"beta must lie in [1, 2], got {beta}")
    arrays = _build(pts, float(beta))
    names = ("perm", "lo", "hi", "tv_lo", "tv_hi", "parent", "left", "right",
             "start", "end", "level", "split_dim", "split_val", "leaf_of_point")
    return CompressedSplitTree(points=pts, beta=float(beta), **dict(zip(names, arrays)))


def child_tight_virtual(parent_tv: AABox, split: tuple[int, float],
                        child_enclosing: AABox, beta: float = 2.0) -> AABox:
    """Tight-virtual box of a child inside its half of ``parent_tv``.

    ``split`` is ``(dimension, coordinate)`` of the splitting hyperplane; the
    side is the one containing ``child_enclosing``.
    """
    dim, val = split
    clo, chi = (np.array(parent_tv.lo), np.array(parent_tv.hi))
    elo, ehi = child_enclosing.arrays()
    if ehi[dim] <= val:
        chi[dim] = val
    elif elo[dim] >= val:
        clo[dim] = val
    else:
        raise ValueError("child enclosing box straddles the split plane")
    if np.any(elo < clo) or np.any(ehi > chi):
        raise ValueError("child enclosing box is not inside the parent half-box")
    tlo, thi = np.empty_like(elo), np.empty_like(ehi)
    _fit_tv(elo, ehi, clo, chi, True, beta, tlo, thi)
    return AABox.from_arrays(tlo, thi)


@njit(cache=True)
def _fit_tv(elo, ehi, clo, chi, bounded, beta, out_lo, out_hi):
    d = elo.shape[0]
    big = 0.0
    for i in range(d):
        s = ehi[i] - elo[i]
        if s > big:
            big = s
    floor_w = big / beta
    for i in range(d):
        s = ehi[i] - elo[i]
        if s >= floor_w:
            out_lo[i] = elo[i]
            out_hi[i] = ehi[i]
            continue
        w = floor_w
        if bounded and w > chi[i] - clo[i]:
            w = chi[i] - clo[i]
        lo = (elo[i] + ehi[i]) / 2 - w / 2
        if lo > elo[i]:
            lo = elo[i]
        if bounded and lo < clo[i]:
            lo = clo[i]
        hi = lo + w
        if hi < ehi[i]:
            hi = ehi[i]
        if bounded and hi > chi[i]:
            hi = chi[i]
            lo = hi - w
            if lo < clo[i]:
                lo = clo[i]
            if lo > elo[i]:
                lo = elo[i]
        out_lo[i] = lo
        out_hi[i] = hi


@njit(cache=True)
def _build(pts, beta):
    n, d = pts.shape
    m = 2 * n - 1
    perm = np.arange(n)
    lo = np.empty((m, d))
    hi = np.empty((m, d))
    tv_lo = np.empty((m, d))
    tv_hi = np.empty((m, d))
    parent = np.full(m, -1, np.int64)
    left = np.full(m, -1, np.int64)
    right = np.full(m, -1, np.int64)
    start = np.empty(m, np.int64)
    end = np.empty(m, np.int64)
    level = np.zeros(m, np.int64)
    split_dim = np.full(m, -1, np.int64)
    split_val = np.full(m, np.nan)
    leaf_of = np.empty(n, np.int64)
    clo = np.empty(d)
    chi = np.empty(d)

    # stack entries: start, end, parent, side (0 lower / 1 upper)
    stack = np.empty((m, 4), np.int64)
    top = 0
    stack[0, 0] = 0
    stack[0, 1] = n
    stack[0, 2] = -1
    stack[0, 3] = 0
    top = 1
    nid = 0
    while top > 0:
        top -= 1
        s0 = stack[top, 0]
        s1 = stack[top, 1]
        par = stack[top, 2]
        side = stack[top, 3]
        i = nid
        nid += 1
        start[i] = s0
        end[i] = s1
        parent[i] = par
        for h in range(d):
            lo[i, h] = np.inf
            hi[i, h] = -np.inf
        for q in range(s0, s1):
            p = perm[q]
            for h in range(d):
                v = pts[p, h]
                if v < lo[i, h]:
                    lo[i, h] = v
                if v > hi[i, h]:
                    hi[i, h] = v
        if par < 0:
            _fit_tv(lo[i], hi[i], clo, chi, False, beta, tv_lo[i], tv_hi[i])
        else:
            level[i] = level[par] + 1
            if side == 0:
                left[par] = i
            else:
                right[par] = i
            for h in range(d):
                clo[h] = tv_lo[par, h]
                chi[h] = tv_hi[par, h]
            j = split_dim[par]
            if side == 0:
                chi[j] = split_val[par]
            else:
                clo[j] = split_val[par]
            _fit_tv(lo[i], hi[i], clo, chi, True, beta, tv_lo[i], tv_hi[i])
        if s1 - s0 == 1:
            leaf_of[perm[s0]] = i
            continue
        j = 0
        best = hi[i, 0] - lo[i, 0]
        for h in range(1, d):
            w = hi[i, h] - lo[i, h]
            if w > best:
                best = w
                j = h
        sv = (lo[i, j] + hi[i, j]) / 2
        split_dim[i] = j
        split_val[i] = sv
        # in-place partition: coordinate <= sv goes to the lower side
        a = s0
        b = s1 - 1
        while a <= b:
            if pts[perm[a], j] <= sv:
                a += 1
            else:
                tmp = perm[a]
                perm[a] = perm[b]
                perm[b] = tmp
                b -= 1
        # lower child is popped first so it receives the smaller id
        stack[top, 0] = a
        stack[top, 1] = s1
        stack[top, 2] = i
        stack[top, 3] = 1
        top += 1
        stack[top, 0] = s0
        stack[top, 1] = a
        stack[top, 2] = i
        stack[top, 3] = 0
        top += 1
    return (perm, lo, hi, tv_lo, tv_hi, parent, left, right, start, end, level,
            split_dim, split_val, leaf_of)


@njit(cache=True)
def _reps_k0(perm, start, left, right):
    m = left.shape[0]
    rep = np.empty(m, np.int64)
    spare = np.empty(m, np.int64)
    for i in range(m - 1, -1, -1):
        if left[i] < 0:
            rep[i] = perm[start[i]]
            spare[i] = rep[i]
        else:
            rep[i] = spare[left[i]]
            spare[i] = spare[right[i]]
    return rep


def assign_representatives(tree: CompressedSplitTree, k: int = 0) -> CompressedSplitTree:
    """Return a copy of ``tree`` with representative points filled in.

    ``k = 0``: one point per node with every point representing at most two
    nodes. A leaf is represented by its point, which then becomes the spare
    of its subtree; an internal node takes the spare of its lower child and
    passes on the spare of its upper child.

    ``k >= 1``: a node with at most ``k`` points lists all of them. A k-box
    (at least ``k+1`` points) picks ``k+1`` points, preferring points of its
    children's lists that still have credit (two per point, one spent per
    k-box use), then other credited points of the box, then any point of the
    box, each tier in increasing index order.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    m = tree.n_nodes
    if k == 0:
        rep = _reps_k0(tree.perm, tree.start, tree.left, tree.right)
        return replace(tree, k=0, rep_ptr=np.arange(m + 1, dtype=np.int64), rep_idx=rep)

    credit = np.full(tree.n, 2, dtype=np.int64)
    lists: list[np.ndarray] = [None] * m  # type: ignore[list-item]
    for i in range(m - 1, -1, -1):
        size = tree.size(i)
        if size <= k:
            lists[i] = np.sort(tree.point_ids(i))
            continue
        pool = np.union1d(lists[tree.left[i]], lists[tree.right[i]])
        chosen = list(pool[credit[pool] > 0][: k + 1])
        if len(chosen) < k + 1:
            box = np.sort(tree.point_ids(i))
            taken = set(chosen)
            extra = [p for p in box[credit[box] > 0] if p not in taken]
            chosen += extra[: k + 1 - len(chosen)]
            if len(chosen) < k + 1:
                taken = set(chosen)
                chosen += [p for p in box if p not in taken][: k + 1 - len(chosen)]
        arr = np.array(sorted(chosen), dtype=np.int64)
        np.subtract.at(credit, arr[credit[arr] > 0], 1)
        lists[i] = arr
    counts = np.array([len(x) for x in lists], dtype=np.int64)
    ptr = np.zeros(m + 1, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    return replace(tree, k=int(k), rep_ptr=ptr, rep_idx=np.concatenate(lists).astype(np.int64))


def representative_use_counts(tree: CompressedSplitTree) -> np.ndarray:
    """How many nodes each point represents."""
    return np.bincount(tree.rep_idx, minlength=tree.n)
