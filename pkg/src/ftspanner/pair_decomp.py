"""Well-separated pair decomposition and its bounded-separated refinement.

A WSPD pair ``(a, b)`` holds two tree nodes whose tight-virtual boxes are
``wsep``-separated. Each pair is refined into floating-virtual boxes
``fv1 ⊇ tv(a)`` and ``fv2 ⊇ tv(b)`` of almost equal size, each confined to
the half of its parent's tight-virtual box that holds the node, and whose
distance lies between ``rho1`` and ``rho2`` times their size. That distance
is the pair's edge distance.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from numba import njit

from .geometry import AABox, _box_distance, _box_size
from .params import SpannerParams
from .split_tree import CompressedSplitTree

INV_TOL = 1e-9


@dataclass(frozen=True)
class WspdPair:
    a: int
    b: int


@dataclass(frozen=True)
class BspdPair:
    b1: int
    b1p: int
    fv1: AABox
    fv2: AABox
    edge_distance: float
    case: int


@dataclass(frozen=True, eq=False)
class Wspd:
    a: np.ndarray
    b: np.ndarray

    def __len__(self) -> int:
        return self.a.shape[0]

    def pairs(self) -> list[WspdPair]:
        return [WspdPair(int(x), int(y)) for x, y in zip(self.a, self.b)]


@dataclass(frozen=True, eq=False)
class Bspd:
    """Array form of the BSPD; row ``r`` refines WSPD pair ``r``."""

    a: np.ndarray
    b: np.ndarray
    case: np.ndarray
    fv1_lo: np.ndarray
    fv1_hi: np.ndarray
    fv2_lo: np.ndarray
    fv2_hi: np.ndarray
    edge_distance: np.ndarray

    def __len__(self) -> int:
        return self.a.shape[0]

    def pair(self, r: int) -> BspdPair:
        return BspdPair(int(self.a[r]), int(self.b[r]),
                        AABox.from_arrays(self.fv1_lo[r], self.fv1_hi[r]),
                        AABox.from_arrays(self.fv2_lo[r], self.fv2_hi[r]),
                        float(self.edge_distance[r]), int(self.case[r]))

    def pairs(self) -> list[BspdPair]:
        return [self.pair(r) for r in range(len(self))]

    def to_json_list(self) -> list[dict]:
        return [{"b1": int(self.a[r]), "b1p": int(self.b[r]),
                 "fv1": {"lo": self.fv1_lo[r].tolist(), "hi": self.fv1_hi[r].tolist()},
                 "fv2": {"lo": self.fv2_lo[r].tolist(), "hi": self.fv2_hi[r].tolist()},
                 "edge_distance": float(self.edge_distance[r])}
                for r in range(len(self))]

    def dumps(self) -> str:
        return json.dumps(self.to_json_list())


# --------------------------------------------------------------------------
# WSPD


def build_wspd(tree: CompressedSplitTree, wsep: float) -> Wspd:
    """Pairs from recursing on the two children of every internal node,
    always splitting the pair member with the larger tight-virtual box."""
    if not wsep > 0:
        raise ValueError("separation must be positive")
    a, b = _wspd(tree.tv_lo, tree.tv_hi, tree.left, tree.right, float(wsep))
    return Wspd(a, b)


@njit(cache=True)
def _wspd(tv_lo, tv_hi, left, right, wsep):
    m = left.shape[0]
    size = np.empty(m)
    for i in range(m):
        size[i] = _box_size(tv_lo[i], tv_hi[i])
    cap = 1024
    out_a = np.empty(cap, np.int64)
    out_b = np.empty(cap, np.int64)
    cnt = 0
    stack = np.empty((max(m, 16), 2), np.int64)
    for root in range(m):
        if left[root] < 0:
            continue
        top = 0
        stack[0, 0] = left[root]
        stack[0, 1] = right[root]
        top = 1
        while top > 0:
            top -= 1
            a = stack[top, 0]
            b = stack[top, 1]
            sa = size[a]
            sb = size[b]
            smax = sa if sa > sb else sb
            if _box_distance(tv_lo[a], tv_hi[a], tv_lo[b], tv_hi[b]) >= wsep * smax:
                if cnt == cap:
                    cap *= 2
                    na = np.empty(cap, np.int64)
                    nb = np.empty(cap, np.int64)
                    na[:cnt] = out_a[:cnt]
                    nb[:cnt] = out_b[:cnt]
                    out_a = na
                    out_b = nb
                out_a[cnt] = a
                out_b[cnt] = b
                cnt += 1
                continue
            if top + 2 > stack.shape[0]:
                grown = np.empty((2 * stack.shape[0], 2), np.int64)
                grown[:top] = stack[:top]
                stack = grown
            if sa >= sb:
                stack[top, 0] = left[a]
                stack[top, 1] = b
                stack[top + 1, 0] = right[a]
                stack[top + 1, 1] = b
            else:
                stack[top, 0] = a
                stack[top, 1] = left[b]
                stack[top + 1, 0] = a
                stack[top + 1, 1] = right[b]
            top += 2
    return out_a[:cnt].copy(), out_b[:cnt].copy()


# --------------------------------------------------------------------------
# floating-virtual boxes


@njit(cache=True)
def _place(w, a, b, x, y, up):
    """Interval of length ``w`` containing ``[a, b]`` inside ``[x, y]``,
    pushed toward ``y`` when ``up`` else toward ``x``."""
    if w <= b - a:
        return a, b
    if up:
        hi = a + w
        if hi > y:
            hi = y
        lo = hi - w
        if lo > a:
            lo = a
        if lo < x:
            lo = x
        return lo, hi
    lo = b - w
    if lo < x:
        lo = x
    hi = lo + w
    if hi < b:
        hi = b
    if hi > y:
        hi = y
    return lo, hi


@njit(cache=True)
def _equal_size_box(big_size, slo, shi, clo, chi, toward, out_lo, out_hi):
    half = big_size / 2
    for i in range(slo.shape[0]):
        s = shi[i] - slo[i]
        w = s if s > half else half
        lo, hi = _place(w, slo[i], shi[i], clo[i], chi[i], toward[i] > 0.0)
        out_lo[i] = lo
        out_hi[i] = hi


@njit(cache=True)
def _container(i, tv_lo, tv_hi, parent, left, split_dim, split_val, out_lo, out_hi):
    p = parent[i]
    for h in range(tv_lo.shape[1]):
        out_lo[h] = tv_lo[p, h]
        out_hi[h] = tv_hi[p, h]
    j = split_dim[p]
    if left[p] == i:
        out_hi[j] = split_val[p]
    else:
        out_lo[j] = split_val[p]


@njit(cache=True)
def _pair_boxes(a, b, tv_lo, tv_hi, parent, left, split_dim, split_val, rho2,
                lo1, hi1, lo2, hi2, work):
    """Floating-virtual boxes of WSPD pair ``(a, b)``; returns (case, distance)."""
    d = tv_lo.shape[1]
    sa = _box_size(tv_lo[a], tv_hi[a])
    sb = _box_size(tv_lo[b], tv_hi[b])
    if sa >= sb:
        big = a
        small = b
        sbig = sa
    else:
        big = b
        small = a
        sbig = sb
    clo_s = work[0]
    chi_s = work[1]
    clo_b = work[2]
    chi_b = work[3]
    toward = work[4]
    bl = work[5]
    bh = work[6]
    fl = work[7]
    fh = work[8]
    _container(small, tv_lo, tv_hi, parent, left, split_dim, split_val, clo_s, chi_s)
    _container(big, tv_lo, tv_hi, parent, left, split_dim, split_val, clo_b, chi_b)
    for h in range(d):
        toward[h] = (tv_lo[big, h] + tv_hi[big, h]) - (clo_s[h] + chi_s[h])
    _equal_size_box(sbig, tv_lo[small], tv_hi[small], clo_s, chi_s, toward, bl, bh)
    dist = _box_distance(tv_lo[big], tv_hi[big], bl, bh)
    case = 1
    if dist <= rho2 * sbig:
        for h in range(d):
            fl[h] = tv_lo[big, h]
            fh[h] = tv_hi[big, h]
    else:
        case = 2
        delta = dist / rho2
        for h in range(d):
            up_big = (bl[h] + bh[h]) - (clo_b[h] + chi_b[h]) > 0.0
            lo, hi = _place(delta, tv_lo[big, h], tv_hi[big, h], clo_b[h], chi_b[h], up_big)
            fl[h] = lo
            fh[h] = hi
        for h in range(d):
            lo, hi = _place(delta, bl[h], bh[h], clo_s[h], chi_s[h], toward[h] > 0.0)
            bl[h] = lo
            bh[h] = hi
    if big == a:
        for h in range(d):
            lo1[h] = fl[h]
            hi1[h] = fh[h]
            lo2[h] = bl[h]
            hi2[h] = bh[h]
    else:
        for h in range(d):
            lo1[h] = bl[h]
            hi1[h] = bh[h]
            lo2[h] = fl[h]
            hi2[h] = fh[h]
    return case, _box_distance(lo1, hi1, lo2, hi2)


@njit(cache=True)
def _all_pair_boxes(pa, pb, tv_lo, tv_hi, parent, left, split_dim, split_val, rho2):
    p = pa.shape[0]
    d = tv_lo.shape[1]
    lo1 = np.empty((p, d))
    hi1 = np.empty((p, d))
    lo2 = np.empty((p, d))
    hi2 = np.empty((p, d))
    case = np.empty(p, np.int64)
    edist = np.empty(p)
    work = np.empty((9, d))
    for r in range(p):
        c, e = _pair_boxes(pa[r], pb[r], tv_lo, tv_hi, parent, left, split_dim,
                           split_val, rho2, lo1[r], hi1[r], lo2[r], hi2[r], work)
        case[r] = c
        edist[r] = e
    return case, lo1, hi1, lo2, hi2, edist


@njit(cache=True)
def _edge_distances(pa, pb, tv_lo, tv_hi, parent, left, split_dim, split_val, rho2):
    p = pa.shape[0]
    d = tv_lo.shape[1]
    out = np.empty(p)
    work = np.empty((13, d))
    for r in range(p):
        _, e = _pair_boxes(pa[r], pb[r], tv_lo, tv_hi, parent, left, split_dim,
                           split_val, rho2, work[9], work[10], work[11], work[12], work)
        out[r] = e
    return out


def find_equal_size_floating_box(big: AABox, small_tv: AABox, container: AABox,
                                 toward=None) -> AABox:
    """Box of size in ``[size(big)/2, size(big)]`` containing ``small_tv``
    inside ``container``.

    Each side is ``small_tv``'s own side widened to at least half the size of
    ``big``. ``toward`` (a point) picks, per dimension, the container end the
    box is pushed to; by default it sits as low as possible.
    """
    sbig = max(big.sides)
    if max(small_tv.sides) > sbig * (1 + INV_TOL):
        raise ValueError("small box is larger than big box")
    if not container.contains_box(small_tv):
        raise ValueError("small box is not inside the container")
    if any(s < sbig / 2 * (1 - INV_TOL) for s in container.sides):
        raise ValueError("container is too small for the requested size")
    d = big.dim
    clo, chi = container.arrays()
    if toward is None:
        tw = np.full(d, -1.0)
    else:
        tw = np.asarray(toward, dtype=np.float64) - (clo + chi) / 2
    lo, hi = np.empty(d), np.empty(d)
    _equal_size_box(sbig, *small_tv.arrays(), clo, chi, tw, lo, hi)
    return AABox.from_arrays(lo, hi)


def container_box(tree: CompressedSplitTree, i: int) -> AABox:
    """Half of the parent's tight-virtual box that holds node ``i``."""
    if tree.parent[i] < 0:
        raise ValueError("the root has no container")
    lo, hi = np.empty(tree.dim), np.empty(tree.dim)
    _container(i, tree.tv_lo, tree.tv_hi, tree.parent, tree.left, tree.split_dim,
               tree.split_val, lo, hi)
    return AABox.from_arrays(lo, hi)


def derive_bspd(tree: CompressedSplitTree, wspd: Wspd, params: SpannerParams,
                check: bool = True) -> Bspd:
    """Refine every WSPD pair into bounded-separated floating-virtual boxes.

    Case 1 keeps the larger tight-virtual box and pairs it with an
    almost-equal-size box around the smaller one. When that pair is too far
    apart, case 2 grows two cubes of side ``distance / rho2`` instead.
    """
    case, lo1, hi1, lo2, hi2, edist = _all_pair_boxes(
        wspd.a, wspd.b, tree.tv_lo, tree.tv_hi, tree.parent, tree.left,
        tree.split_dim, tree.split_val, float(params.rho2))
    bspd = Bspd(wspd.a, wspd.b, case, lo1, hi1, lo2, hi2, edist)
    if check:
        bad = bspd_violations(tree, bspd, params)
        if bad:
            raise RuntimeError(f"BSPD invariant violated: {bad[0]}")
    return bspd


def edge_distances(tree: CompressedSplitTree, wspd: Wspd, params: SpannerParams) -> np.ndarray:
    return _edge_distances(wspd.a, wspd.b, tree.tv_lo, tree.tv_hi, tree.parent,
                           tree.left, tree.split_dim, tree.split_val, float(params.rho2))


def bspd_violations(tree: CompressedSplitTree, bspd: Bspd, params: SpannerParams,
                    tol: float = INV_TOL) -> list[str]:
    """Every broken pair invariant, as messages (empty when all hold)."""
    msgs = []
    if len(bspd) == 0:
        return msgs
    s1 = (bspd.fv1_hi - bspd.fv1_lo).max(axis=1)
    s2 = (bspd.fv2_hi - bspd.fv2_lo).max(axis=1)
    smax = np.maximum(s1, s2)
    scale = np.maximum(smax, bspd.edge_distance) * tol + 1e-300
    checks = {
        "size ratio low": params.mu1 * s2 - s1 > scale,
        "size ratio high": s1 - params.mu2 * s2 > scale,
        "separation low": params.rho1 * smax - bspd.edge_distance > scale * params.rho1,
        "separation high": bspd.edge_distance - params.rho2 * smax > scale * params.rho2,
        "aspect 1": (bspd.fv1_hi - bspd.fv1_lo).max(1)
        > params.beta * (bspd.fv1_hi - bspd.fv1_lo).min(1) + scale,
        "aspect 2": (bspd.fv2_hi - bspd.fv2_lo).max(1)
        > params.beta * (bspd.fv2_hi - bspd.fv2_lo).min(1) + scale,
    }
    for side, node, lo, hi in ((1, bspd.a, bspd.fv1_lo, bspd.fv1_hi),
                               (2, bspd.b, bspd.fv2_lo, bspd.fv2_hi)):
        tl, th = tree.tv_lo[node], tree.tv_hi[node]
        checks[f"contains tv {side}"] = np.any((lo > tl) | (hi < th), axis=1)
        cl, ch = _containers(tree, node)
        checks[f"inside container {side}"] = np.any(
            (lo < cl - scale[:, None]) | (hi > ch + scale[:, None]), axis=1)
    for name, mask in checks.items():
        for r in np.flatnonzero(mask)[:5]:
            msgs.append(f"{name} at pair {int(r)} ({int(bspd.a[r])}, {int(bspd.b[r])})")
    return msgs


def _containers(tree: CompressedSplitTree, nodes: np.ndarray):
    p = tree.parent[nodes]
    lo = tree.tv_lo[p].copy()
    hi = tree.tv_hi[p].copy()
    j = tree.split_dim[p]
    lower = tree.left[p] == nodes
    rows = np.arange(len(nodes))
    hi[rows[lower], j[lower]] = tree.split_val[p[lower]]
    lo[rows[~lower], j[~lower]] = tree.split_val[p[~lower]]
    return lo, hi


def neighbor_sets(tree: CompressedSplitTree, pairs) -> dict[int, list[int]]:
    """``N>=(b)``: partners ``b'`` whose parent box is at least as large as
    ``b``'s parent box. Ties land in both sets."""
    psize = tree.tv_size()[np.maximum(tree.parent, 0)]
    out: dict[int, list[int]] = {}
    for a, b in zip(np.asarray(pairs.a).tolist(), np.asarray(pairs.b).tolist()):
        if psize[b] >= psize[a]:
            out.setdefault(a, []).append(b)
        if psize[a] >= psize[b]:
            out.setdefault(b, []).append(a)
    return {k: sorted(v) for k, v in out.items()}


def neighbor_counts(tree: CompressedSplitTree, pairs) -> tuple[int, int]:
    """``(max |N(b)|, max |N>=(b)|)`` over all nodes."""
    a, b = np.asarray(pairs.a), np.asarray(pairs.b)
    if a.size == 0:
        return 0, 0
    psize = tree.tv_size()[np.maximum(tree.parent, 0)]
    m = tree.n_nodes
    full = np.bincount(a, minlength=m) + np.bincount(b, minlength=m)
    ge = (np.bincount(a[psize[b] >= psize[a]], minlength=m)
          + np.bincount(b[psize[a] >= psize[b]], minlength=m))
    return int(full.max()), int(ge.max())


def coverage_counts(tree: CompressedSplitTree, wspd: Wspd) -> np.ndarray:
    """``n x n`` matrix counting how often each point pair is covered; every
    off-diagonal entry is 1 for a valid decomposition."""
    n = tree.n
    cov = np.zeros((n, n), dtype=np.int64)
    for a, b in zip(wspd.a.tolist(), wspd.b.tolist()):
        pa, pb = tree.point_ids(a), tree.point_ids(b)
        cov[np.ix_(pa, pb)] += 1
        cov[np.ix_(pb, pa)] += 1
    return cov


def separation_ok(tree: CompressedSplitTree, wspd: Wspd, wsep: float) -> bool:
    sz = tree.tv_size()
    for a, b in zip(wspd.a.tolist(), wspd.b.tolist()):
        dist = _box_distance(tree.tv_lo[a], tree.tv_hi[a], tree.tv_lo[b], tree.tv_hi[b])
        if dist < wsep * max(sz[a], sz[b]):
            return False
    return True
