"""Bounded-degree low-weight t-spanner (greedy over bounded-separated pairs).

Pairs are processed by increasing edge distance. The representative points
of a pair are joined unless either node already has an edge leaving its
floating-virtual box through one of the cones that cover the partner box.
Crossing edges are tracked per ``(node, cone)`` as the coordinate-wise
extremes of their far endpoints, pushed up the whole ancestor chain of the
near endpoint when the edge is added.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit, types
from numba.typed import Dict

from .geometry import (AABox, ConeFrame, _cap_radius, _cones_containing,
                       _select_cones, as_points, build_frame, check_distinct)
from .pair_decomp import (Bspd, Wspd, _pair_boxes, build_wspd, derive_bspd,
                          edge_distances)
from .params import SpannerParams, choose_parameters
from .split_tree import CompressedSplitTree, assign_representatives, build_tree


@dataclass(frozen=True, eq=False)
class SpannerGraph:
    """Undirected graph on point indices ``0..n-1`` with sorted edge rows."""

    n: int
    edges: np.ndarray
    t: float | None = None
    k: int | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if e.size:
            if np.any(e[:, 0] == e[:, 1]):
                raise ValueError("self-loop in edge list")
            if e.min() < 0 or e.max() >= self.n:
                raise ValueError("edge endpoint out of range")
            e = np.sort(e, axis=1)
            e = e[np.lexsort((e[:, 1], e[:, 0]))]
            if np.any(np.all(e[1:] == e[:-1], axis=1)):
                raise ValueError("duplicate edge")
        object.__setattr__(self, "edges", e)

    @property
    def edge_count(self) -> int:
        return int(self.edges.shape[0])

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(a), int(b)) for a, b in self.edges}

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n)

    def max_degree(self) -> int:
        return int(self.degrees().max()) if self.n else 0

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for a, b in self.edges.tolist():
            adj[a].append(b)
            adj[b].append(a)
        return [sorted(x) for x in adj]

    def lengths(self, points: np.ndarray) -> np.ndarray:
        return np.linalg.norm(points[self.edges[:, 0]] - points[self.edges[:, 1]], axis=1)

    def weight(self, points: np.ndarray) -> float:
        return float(self.lengths(points).sum())

    def to_dict(self) -> dict:
        out = {"n": self.n, "t": self.t, "edges": self.edges.tolist()}
        if self.k is not None:
            out["k"] = self.k
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "SpannerGraph":
        return cls(int(data["n"]), np.array(data["edges"], dtype=np.int64).reshape(-1, 2),
                   data.get("t"), data.get("k"))


@dataclass(frozen=True, eq=False)
class Construction:
    """Everything the greedy passes share: tree, frame, pairs and their order."""

    points: np.ndarray
    params: SpannerParams
    frame: ConeFrame
    tree: CompressedSplitTree
    wspd: Wspd
    edist: np.ndarray
    order: np.ndarray

    def bspd(self) -> Bspd:
        return derive_bspd(self.tree, self.wspd, self.params)


def prepare(points, t: float, k: int = 0, params: SpannerParams | None = None) -> Construction:
    pts = as_points(points)
    check_distinct(pts)
    if params is None:
        params = choose_parameters(t, pts.shape[1], k)
    frame = build_frame(params.alpha, pts.shape[1])
    tree = assign_representatives(build_tree(pts, params.beta), k)
    wspd = build_wspd(tree, params.wsep)
    edist = edge_distances(tree, wspd, params)
    if k == 0:
        reps = tree.rep_idx
        rd = np.linalg.norm(pts[reps[wspd.a]] - pts[reps[wspd.b]], axis=1)
    else:
        rd = np.zeros(len(wspd))
    order = np.lexsort((np.arange(len(wspd)), rd, edist)).astype(np.int64)
    return Construction(pts, params, frame, tree, wspd, edist, order)


def build_spanner(points, t: float, params: SpannerParams | None = None) -> SpannerGraph:
    """Bounded-degree t-spanner of ``points``."""
    con = prepare(points, t, 0, params)
    return run_spanner(con)


def run_spanner(con: Construction, trace: bool = False) -> SpannerGraph:
    tr, fr = con.tree, con.frame
    eu, ev, c1, c2 = _algorithm1(
        con.points, tr.tv_lo, tr.tv_hi, tr.parent, tr.left, tr.split_dim, tr.split_val,
        tr.leaf_of_point, tr.rep_idx, con.wspd.a, con.wspd.b, con.order,
        fr.axes, fr.half_angles, fr.planar, float(con.params.rho2), trace)
    meta = {"frame_size": len(fr), "pairs": len(con.wspd), "params": con.params.to_dict()}
    if trace:
        meta["trace"] = {"edges_in_order": np.column_stack([eu, ev]),
                         "cross_a": c1, "cross_b": c2}
    return SpannerGraph(con.points.shape[0], np.column_stack([eu, ev]), con.params.t, 0, meta)


# --------------------------------------------------------------------------
# kernel


@njit(cache=True)
def _crossing_exists(index, slots, node, m, cones, cnt, lo, hi):
    d = lo.shape[0]
    for q in range(cnt):
        key = node * m + cones[q]
        if key in index:
            s = index[key]
            for h in range(d):
                if slots[s, h] > hi[h] or slots[s, d + h] < lo[h]:
                    return True
    return False


@njit(cache=True)
def _record(index, slots, nslots, points, parent, leaf_of, x, y, m, cones, cnt):
    d = points.shape[1]
    node = leaf_of[x]
    while node >= 0:
        for q in range(cnt):
            key = node * m + cones[q]
            if key in index:
                s = index[key]
            else:
                if nslots == slots.shape[0]:
                    grown = np.empty((2 * slots.shape[0], 2 * d))
                    grown[:nslots] = slots[:nslots]
                    slots = grown
                s = nslots
                nslots += 1
                index[key] = s
                for h in range(d):
                    slots[s, h] = -np.inf
                    slots[s, d + h] = np.inf
            for h in range(d):
                v = points[y, h]
                if v > slots[s, h]:
                    slots[s, h] = v
                if v < slots[s, d + h]:
                    slots[s, d + h] = v
        node = parent[node]
    return slots, nslots


@njit(cache=True)
def _algorithm1(points, tv_lo, tv_hi, parent, left, split_dim, split_val, leaf_of,
                rep, pa, pb, order, axes, halves, planar, rho2, trace):
    n, d = points.shape
    m = axes.shape[0]
    index = Dict.empty(key_type=types.int64, value_type=types.int64)
    seen = Dict.empty(key_type=types.int64, value_type=types.boolean)
    slots = np.empty((1024, 2 * d))
    nslots = 0
    eu = np.empty(max(16, n), np.int64)
    ev = np.empty(max(16, n), np.int64)
    ne = 0
    npairs = order.shape[0]
    c1 = np.zeros(npairs if trace else 0, np.bool_)
    c2 = np.zeros(npairs if trace else 0, np.bool_)
    lo1 = np.empty(d)
    hi1 = np.empty(d)
    lo2 = np.empty(d)
    hi2 = np.empty(d)
    work = np.empty((9, d))
    cvec = np.empty(d)
    buf1 = np.empty(m, np.int64)
    buf2 = np.empty(m, np.int64)
    dirv = np.empty(d)
    for step in range(npairs):
        r = order[step]
        a = pa[r]
        b = pb[r]
        _pair_boxes(a, b, tv_lo, tv_hi, parent, left, split_dim, split_val, rho2,
                    lo1, hi1, lo2, hi2, work)
        rad = _cap_radius(lo1, hi1, lo2, hi2)
        for h in range(d):
            cvec[h] = (lo2[h] + hi2[h]) / 2 - (lo1[h] + hi1[h]) / 2
        n1 = _select_cones(cvec, rad, axes, halves, planar, buf1)
        cross1 = _crossing_exists(index, slots, a, m, buf1, n1, lo1, hi1)
        for h in range(d):
            cvec[h] = -cvec[h]
        n2 = _select_cones(cvec, rad, axes, halves, planar, buf2)
        cross2 = _crossing_exists(index, slots, b, m, buf2, n2, lo2, hi2)
        if trace:
            c1[step] = cross1
            c2[step] = cross2
        if cross1 or cross2:
            continue
        u = rep[a]
        v = rep[b]
        key = min(u, v) * n + max(u, v)
        if key in seen:
            continue
        seen[key] = True
        if ne == eu.shape[0]:
            gu = np.empty(2 * ne, np.int64)
            gv = np.empty(2 * ne, np.int64)
            gu[:ne] = eu[:ne]
            gv[:ne] = ev[:ne]
            eu = gu
            ev = gv
        eu[ne] = u
        ev[ne] = v
        ne += 1
        for h in range(d):
            dirv[h] = points[v, h] - points[u, h]
        cnt = _cones_containing(dirv, axes, halves, planar, buf1)
        slots, nslots = _record(index, slots, nslots, points, parent, leaf_of, u, v, m, buf1, cnt)
        for h in range(d):
            dirv[h] = -dirv[h]
        cnt = _cones_containing(dirv, axes, halves, planar, buf1)
        slots, nslots = _record(index, slots, nslots, points, parent, leaf_of, v, u, m, buf1, cnt)
    return eu[:ne].copy(), ev[:ne].copy(), c1, c2


# --------------------------------------------------------------------------
# reference implementation in plain Python


class CrossingEdgeIndex:
    """Per ``(node, cone, h)`` the stored edges whose far endpoint reaches
    furthest up and furthest down in dimension ``h``.

    Storing both extremes makes the crossing test exact: some far endpoint
    leaves a box exactly when one of its coordinates exceeds the box bounds.
    """

    def __init__(self, tree: CompressedSplitTree, frame: ConeFrame):
        self.tree = tree
        self.frame = frame
        self.points = tree.points
        self._hi: dict[tuple[int, int], list[tuple[float, int, int]]] = {}
        self._lo: dict[tuple[int, int], list[tuple[float, int, int]]] = {}

    def record_edge(self, node: int, edge: tuple[int, int], bases=None) -> None:
        x, y = edge
        if x not in set(self.tree.point_ids(node).tolist()):
            raise ValueError("edge endpoint x is not inside the node")
        cones = self.frame.cones_containing(self.points[y] - self.points[x])
        if bases is not None:
            allowed = set(bases)
            cones = [c for c in cones if c in allowed]
        for anc in self.tree.ancestors(node):
            for c in cones:
                self._store(anc, c, x, y)

    def _store(self, node: int, cone: int, x: int, y: int) -> None:
        d = self.points.shape[1]
        hi = self._hi.setdefault((node, cone), [(-math.inf, -1, -1)] * d)
        lo = self._lo.setdefault((node, cone), [(math.inf, -1, -1)] * d)
        for h in range(d):
            v = float(self.points[y, h])
            if v > hi[h][0]:
                hi[h] = (v, x, y)
            if v < lo[h][0]:
                lo[h] = (v, x, y)

    def stored(self, node: int, cone: int, h: int) -> tuple[tuple[int, int], tuple[int, int]] | None:
        if (node, cone) not in self._hi:
            return None
        top, bot = self._hi[(node, cone)][h], self._lo[(node, cone)][h]
        return (top[1], top[2]), (bot[1], bot[2])

    def crossing_edge_exists(self, node: int, fv: AABox, bases) -> bool:
        for c in bases:
            if (node, c) not in self._hi:
                continue
            hi, lo = self._hi[(node, c)], self._lo[(node, c)]
            for h in range(len(fv.lo)):
                if hi[h][0] > fv.hi[h] or lo[h][0] < fv.lo[h]:
                    return True
        return False


def record_edge(index: CrossingEdgeIndex, node: int, edge: tuple[int, int], bases=None) -> None:
    index.record_edge(node, edge, bases)


def crossing_edge_exists(node: int, fv: AABox, bases, index: CrossingEdgeIndex) -> bool:
    return index.crossing_edge_exists(node, fv, bases)


def scan_crossing(tree: CompressedSplitTree, frame: ConeFrame, edges, node: int,
                  fv: AABox, bases) -> bool:
    """Brute-force crossing test over an explicit edge list."""
    inside = set(tree.point_ids(node).tolist())
    allowed = set(bases)
    pts = tree.points
    for u, v in edges:
        for x, y in ((u, v), (v, u)):
            if x not in inside or fv.contains_point(pts[y]):
                continue
            if allowed.intersection(frame.cones_containing(pts[y] - pts[x])):
                return True
    return False


def pair_cones(frame: ConeFrame, fv1: AABox, fv2: AABox) -> tuple[list[int], list[int]]:
    """Cones through which each floating box sees the other."""
    lo1, hi1 = fv1.arrays()
    lo2, hi2 = fv2.arrays()
    rad = _cap_radius(lo1, hi1, lo2, hi2)
    c = (lo2 + hi2) / 2 - (lo1 + hi1) / 2
    out = []
    for vec in (c, -c):
        buf = np.empty(len(frame), dtype=np.int64)
        cnt = _select_cones(vec, rad, frame.axes, frame.half_angles, frame.planar, buf)
        out.append(buf[:cnt].tolist())
    return out[0], out[1]


def reference_spanner(con: Construction, brute_force: bool = False) -> SpannerGraph:
    """Same greedy pass in plain Python; ``brute_force`` swaps the index for
    a scan over all edges added so far."""
    tree, frame = con.tree, con.frame
    bspd = derive_bspd(tree, con.wspd, con.params)
    index = CrossingEdgeIndex(tree, frame)
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for r in con.order.tolist():
        pair = bspd.pair(r)
        ba, bb = pair_cones(frame, pair.fv1, pair.fv2)
        if brute_force:
            blocked = (scan_crossing(tree, frame, edges, pair.b1, pair.fv1, ba)
                       or scan_crossing(tree, frame, edges, pair.b1p, pair.fv2, bb))
        else:
            blocked = (index.crossing_edge_exists(pair.b1, pair.fv1, ba)
                       or index.crossing_edge_exists(pair.b1p, pair.fv2, bb))
        if blocked:
            continue
        u, v = int(tree.reps(pair.b1)[0]), int(tree.reps(pair.b1p)[0])
        key = (min(u, v), max(u, v))
        if key in seen:
            continue
        seen.add(key)
        edges.append((u, v))
        index.record_edge(int(tree.leaf_of_point[u]), (u, v))
        index.record_edge(int(tree.leaf_of_point[v]), (v, u))
    return SpannerGraph(con.points.shape[0], np.array(edges, dtype=np.int64).reshape(-1, 2),
                        con.params.t, 0)
