"""k-vertex-fault-tolerant t-spanner (greedy over bounded-separated pairs).

Each pair is handled by how many points its two nodes hold. Small boxes
(at most ``k`` points) are wired as cliques and linked point by point. Two
k-boxes get enough extra links to reach ``k+1`` disjoint crossing edges in
the pair's direction. Directional degrees ``deg(u, B)`` cap how many edges a
point takes per cone; every edge counts toward the lowest-index cone that
contains its direction.

``run_vfts`` is a numba engine; ``reference_vfts`` is the same procedure in
plain Python and serves as its oracle.
"""
from __future__ import annotations

from collections import defaultdict

import numpy as np
from numba import njit, types
from numba.typed import Dict

from .geometry import (AABox, _box_distance, _cap_radius, _cone_index, _cones_containing,
                       _select_cones)
from .pair_decomp import _pair_boxes
from .params import SpannerParams
from .spanner import Construction, SpannerGraph, pair_cones, prepare

Edge = tuple[int, int]


# --------------------------------------------------------------------------
# building blocks


def max_disjoint_crossing(edges: list[Edge]) -> tuple[list[Edge], list[int]]:
    """Maximum set of vertex-disjoint edges among ``(inside, outside)`` pairs.

    Augmenting-path bipartite matching between inside and outside endpoints,
    trying inside points and their neighbours in increasing index order.
    Returns the matched edges (sorted) and ``X``, their inside endpoints.
    """
    adj: dict[int, list[int]] = defaultdict(list)
    for x, y in sorted(set(edges)):
        adj[x].append(y)
    match_out: dict[int, int] = {}

    def augment(x: int, seen: set[int]) -> bool:
        for y in adj[x]:
            if y in seen:
                continue
            seen.add(y)
            if y not in match_out or augment(match_out[y], seen):
                match_out[y] = x
                return True
        return False

    for x in sorted(adj):
        augment(x, set())
    chosen = sorted((x, y) for y, x in match_out.items())
    return chosen, sorted(x for x, _ in chosen)


def merge_children_disjoint(points: np.ndarray, parent_lo: np.ndarray, parent_hi: np.ndarray,
                            child_lists: list[list[Edge]], k: int,
                            inside: set[int] | None = None) -> list[Edge]:
    """Greedy merge of children's disjoint crossing lists for their parent.

    Edges whose outer endpoint lies in the parent (the ``inside`` set when
    given, else the parent box) are dropped. The rest are taken furthest
    outer endpoint first, skipping any that share an endpoint with an edge
    already taken, up to ``k+1`` edges.
    """
    cand = []
    for lst in child_lists:
        for x, y in lst:
            p = points[y]
            if inside is not None:
                if y in inside:
                    continue
            elif np.all(p >= parent_lo) and np.all(p <= parent_hi):
                continue
            cand.append((-_box_distance(p, p, parent_lo, parent_hi), x, y))
    cand.sort()
    used: set[int] = set()
    out: list[Edge] = []
    for _, x, y in cand:
        if x in used or y in used:
            continue
        out.append((x, y))
        used.update((x, y))
        if len(out) == k + 1:
            break
    return out


def eligible_low_degree(members, degree, k: int, exclude=()) -> list[int]:
    """``Y_k``: members outside ``exclude`` with degree at most ``k``,
    by increasing degree then index. ``degree`` maps a point to its count."""
    ex = set(exclude)
    cand = [(degree(u), u) for u in members if u not in ex]
    return [u for dg, u in sorted(cand) if dg <= k]


# --------------------------------------------------------------------------
# public entry points


def build_vfts(points, t: float, k: int, params: SpannerParams | None = None) -> SpannerGraph:
    """(k, t)-vertex-fault-tolerant spanner of ``points``."""
    if k < 1:
        raise ValueError("k must be >= 1; use build_spanner for k = 0")
    con = prepare(points, t, k, params)
    return run_vfts(con, k)


def run_vfts(con: Construction, k: int) -> SpannerGraph:
    tr, fr = con.tree, con.frame
    eu, ev, max_ac = _algorithm2(
        con.points, tr.tv_lo, tr.tv_hi, tr.parent, tr.left, tr.split_dim, tr.split_val,
        tr.leaf_of_point, tr.perm, tr.start, tr.end, tr.rep_ptr, tr.rep_idx,
        con.wspd.a, con.wspd.b, con.order, fr.axes, fr.half_angles, fr.planar,
        float(con.params.rho2), int(k))
    meta = {"frame_size": len(fr), "pairs": len(con.wspd), "params": con.params.to_dict(),
            "max_all_crossing": int(max_ac)}
    return SpannerGraph(con.points.shape[0], np.column_stack([eu, ev]), con.params.t, k, meta)


# --------------------------------------------------------------------------
# reference implementation


class VftsState:
    """Edges, directional degrees and AllCrossing lists of a run in progress."""

    def __init__(self, con: Construction, k: int):
        self.k = k
        self.tree = con.tree
        self.frame = con.frame
        self.points = con.points
        self.pos = np.empty(self.tree.n, dtype=np.int64)
        self.pos[self.tree.perm] = np.arange(self.tree.n)
        self.edges: set[Edge] = set()
        self.order: list[Edge] = []
        self.deg: list[dict[int, int]] = [defaultdict(int) for _ in range(self.tree.n)]
        self.all_crossing: dict[tuple[int, int], list[Edge]] = defaultdict(list)
        self.max_all_crossing = 0
        self._buf = np.empty(len(self.frame), dtype=np.int64)

    def inside(self, node: int, y: int) -> bool:
        return bool(self.tree.start[node] <= self.pos[y] < self.tree.end[node])

    def cone_of(self, vec: np.ndarray) -> int:
        fr = self.frame
        return int(_cone_index(vec, fr.axes, fr.half_angles, fr.planar))

    def cones_of(self, vec: np.ndarray) -> list[int]:
        fr = self.frame
        cnt = _cones_containing(vec, fr.axes, fr.half_angles, fr.planar, self._buf)
        return self._buf[:cnt].tolist()

    def degree(self, u: int, cone: int) -> int:
        return self.deg[u].get(cone, 0)

    def add(self, u: int, v: int) -> bool:
        key = (min(u, v), max(u, v))
        if u == v or key in self.edges:
            return False
        self.edges.add(key)
        self.order.append((u, v))
        pts = self.points
        for x, y in ((u, v), (v, u)):
            vec = pts[y] - pts[x]
            self.deg[x][self.cone_of(vec)] += 1
            cones = self.cones_of(vec)
            node = int(self.tree.leaf_of_point[x])
            while node >= 0 and not self.inside(node, y):
                for c in cones:
                    lst = self.all_crossing[(node, c)]
                    lst.append((x, y))
                    self.max_all_crossing = max(self.max_all_crossing, len(lst))
                node = int(self.tree.parent[node])
        return True

    def crossing(self, node: int, bases, lo: np.ndarray, hi: np.ndarray) -> list[Edge]:
        out = []
        pts = self.points
        for c in bases:
            for x, y in self.all_crossing.get((node, c), ()):
                p = pts[y]
                if np.any(p < lo) or np.any(p > hi):
                    out.append((x, y))
        return out

    def disjoint_crossing(self, node, bases, lo, hi) -> tuple[list[Edge], list[int]]:
        return max_disjoint_crossing(self.crossing(node, bases, lo, hi))

    def disjoint_list(self, node: int, cone: int) -> list[Edge]:
        """DisjointCrossingEdge list of ``(node, cone)``, merged up from the leaves."""
        tr = self.tree
        if tr.left[node] < 0:
            lists = [self.all_crossing.get((node, cone), [])]
        else:
            lists = [self.disjoint_list(int(tr.left[node]), cone),
                     self.disjoint_list(int(tr.right[node]), cone)]
        return merge_children_disjoint(self.points, tr.lo[node], tr.hi[node], lists, self.k,
                                       set(tr.point_ids(node).tolist()))


def reference_vfts(con: Construction, k: int, state: VftsState | None = None) -> SpannerGraph:
    st = state if state is not None else VftsState(con, k)
    tree, pts = con.tree, con.points
    d = pts.shape[1]
    lo1, hi1, lo2, hi2 = (np.empty(d) for _ in range(4))
    work = np.empty((9, d))
    rho2 = float(con.params.rho2)
    for r in con.order.tolist():
        a, b = int(con.wspd.a[r]), int(con.wspd.b[r])
        _pair_boxes(a, b, tree.tv_lo, tree.tv_hi, tree.parent, tree.left, tree.split_dim,
                    tree.split_val, rho2, lo1, hi1, lo2, hi2, work)
        _process_pair(st, a, b, AABox.from_arrays(lo1, hi1), AABox.from_arrays(lo2, hi2))
    meta = {"frame_size": len(con.frame), "pairs": len(con.wspd),
            "max_all_crossing": st.max_all_crossing}
    edges = np.array(sorted(st.edges), dtype=np.int64).reshape(-1, 2)
    return SpannerGraph(pts.shape[0], edges, con.params.t, k, meta)


def _majority_cone(st: VftsState, center: np.ndarray, reps) -> int:
    votes: dict[int, int] = defaultdict(int)
    for u in reps:
        votes[st.cone_of(st.points[u] - center)] += 1
    top = max(votes.values())
    return min(c for c, v in votes.items() if v == top)


def _process_pair(st: VftsState, a: int, b: int, fv1: AABox, fv2: AABox) -> None:
    k, tree = st.k, st.tree
    reps_a = tree.reps(a).tolist()
    reps_b = tree.reps(b).tolist()
    small_a, small_b = tree.size(a) <= k, tree.size(b) <= k
    lo1, hi1 = fv1.arrays()
    lo2, hi2 = fv2.arrays()
    cone_a = _majority_cone(st, (lo1 + hi1) / 2, reps_b)
    cone_b = _majority_cone(st, (lo2 + hi2) / 2, reps_a)
    bases_a, bases_b = pair_cones(st.frame, fv1, fv2)

    def deg_a(u: int) -> int:
        return st.degree(u, cone_a)

    def deg_b(u: int) -> int:
        return st.degree(u, cone_b)

    if small_a and small_b:
        for grp in (reps_a, reps_b):
            for i, u in enumerate(grp):
                for w in grp[i + 1:]:
                    st.add(u, w)
        for u in reps_a:
            if deg_a(u) <= k:
                _link_lowest(st, u, reps_b, deg_b)
        for w in reps_b:
            if deg_b(w) <= k:
                _link_lowest(st, w, reps_a, deg_a)
        return

    if not small_a and not small_b:
        m1, x1 = st.disjoint_crossing(a, bases_a, lo1, hi1)
        m2, x2 = st.disjoint_crossing(b, bases_b, lo2, hi2)
        need = k + 1 - max(len(m1), len(m2))
        if need <= 0:
            return
        y1 = eligible_low_degree(tree.point_ids(a).tolist(), deg_a, k, x1)
        y2 = eligible_low_degree(tree.point_ids(b).tolist(), deg_b, k, x2)
        for u, w in list(zip(y1, y2))[:need]:
            st.add(u, w)
        return

    if small_a:
        reps_s, deg_s = reps_a, deg_a
        big, deg_big, bases_big, blo, bhi = b, deg_b, bases_b, lo2, hi2
    else:
        reps_s, deg_s = reps_b, deg_b
        big, deg_big, bases_big, blo, bhi = a, deg_a, bases_a, lo1, hi1
    for i, u in enumerate(reps_s):
        for w in reps_s[i + 1:]:
            st.add(u, w)
    members = tree.point_ids(big).tolist()
    for u in reps_s:
        matched, xb = st.disjoint_crossing(big, bases_big, blo, bhi)
        cnt = min(k + 1 - deg_s(u), k + 1 - len(matched))
        if cnt <= 0:
            continue
        added = 0
        for w in eligible_low_degree(members, deg_big, k, xb):
            if added == cnt:
                break
            if st.add(u, w):
                added += 1


def _link_lowest(st: VftsState, u: int, partners: list[int], deg) -> None:
    """Join ``u`` to the lowest-degree partner it is not yet adjacent to."""
    for _, w in sorted((deg(w), w) for w in partners):
        if (min(u, w), max(u, w)) not in st.edges:
            st.add(u, w)
            return


# --------------------------------------------------------------------------
# numba engine; mirrors the reference step for step


@njit(cache=True)
def _kuhn(keys, n, xmark, stamp):
    """Matching size over sorted unique edge keys ``x*n + y``; marks matched
    inside endpoints with ``stamp`` in ``xmark``."""
    ne = keys.shape[0]
    if ne == 0:
        return 0
    xs = keys // n
    ys = keys % n
    uy = np.unique(ys)
    yl = np.searchsorted(uy, ys)
    # left vertices in increasing x with contiguous neighbour ranges
    lstart = np.empty(ne + 1, np.int64)
    lx = np.empty(ne, np.int64)
    nl = 0
    for e in range(ne):
        if e == 0 or xs[e] != xs[e - 1]:
            lstart[nl] = e
            lx[nl] = xs[e]
            nl += 1
    lstart[nl] = ne
    ny = uy.shape[0]
    match = np.full(ny, -1, np.int64)
    seen = np.zeros(ny, np.int64)
    stack = np.empty(nl, np.int64)
    ptr = np.empty(nl, np.int64)
    chosen = np.empty(nl, np.int64)
    size = 0
    for root in range(nl):
        epoch = root + 1
        depth = 1
        stack[0] = root
        ptr[root] = lstart[root]
        found = False
        while depth > 0:
            x = stack[depth - 1]
            if ptr[x] == lstart[x + 1]:
                depth -= 1
                continue
            y = yl[ptr[x]]
            ptr[x] += 1
            if seen[y] == epoch:
                continue
            seen[y] = epoch
            chosen[depth - 1] = y
            if match[y] < 0:
                found = True
                break
            nxt = match[y]
            ptr[nxt] = lstart[nxt]
            stack[depth] = nxt
            depth += 1
        if found:
            for lev in range(depth):
                match[chosen[lev]] = stack[lev]
            size += 1
    for y in range(ny):
        if match[y] >= 0:
            xmark[lx[match[y]]] = stamp
    return size


@njit(cache=True)
def _algorithm2(points, tv_lo, tv_hi, parent, left, split_dim, split_val, leaf_of, perm,
                start, end, rep_ptr, rep_idx, pa, pb, order, axes, halves, planar, rho2, k):
    n, d = points.shape
    m = axes.shape[0]
    pos = np.empty(n, np.int64)
    for i in range(n):
        pos[perm[i]] = i
    edges = Dict.empty(key_type=types.int64, value_type=types.boolean)
    deg = Dict.empty(key_type=types.int64, value_type=types.int64)
    ac_slot = Dict.empty(key_type=types.int64, value_type=types.int64)
    slot_head = np.empty(1024, np.int64)
    slot_len = np.empty(1024, np.int64)
    nslot = 0
    ent_x = np.empty(4096, np.int64)
    ent_y = np.empty(4096, np.int64)
    ent_next = np.empty(4096, np.int64)
    nent = 0
    max_ac = 0
    eu = np.empty(max(16, n), np.int64)
    ev = np.empty(max(16, n), np.int64)
    ne = 0

    lo1 = np.empty(d)
    hi1 = np.empty(d)
    lo2 = np.empty(d)
    hi2 = np.empty(d)
    work = np.empty((9, d))
    cvec = np.empty(d)
    vec = np.empty(d)
    bases_a = np.empty(m, np.int64)
    bases_b = np.empty(m, np.int64)
    cbuf = np.empty(m, np.int64)
    votes = np.zeros(m, np.int64)
    xmark = np.zeros(n, np.int64)
    stamp = 0
    gather = np.empty(64, np.int64)

    for step in range(order.shape[0]):
        r = order[step]
        a = pa[r]
        b = pb[r]
        _pair_boxes(a, b, tv_lo, tv_hi, parent, left, split_dim, split_val, rho2,
                    lo1, hi1, lo2, hi2, work)
        ra0 = rep_ptr[a]
        ra1 = rep_ptr[a + 1]
        rb0 = rep_ptr[b]
        rb1 = rep_ptr[b + 1]
        small_a = end[a] - start[a] <= k
        small_b = end[b] - start[b] <= k

        # majority cones
        cone_a = _majority(points, rep_idx, rb0, rb1, lo1, hi1, axes, halves, planar, votes, vec)
        cone_b = _majority(points, rep_idx, ra0, ra1, lo2, hi2, axes, halves, planar, votes, vec)
        rad = _cap_radius(lo1, hi1, lo2, hi2)
        for h in range(d):
            cvec[h] = (lo2[h] + hi2[h]) / 2 - (lo1[h] + hi1[h]) / 2
        nba = _select_cones(cvec, rad, axes, halves, planar, bases_a)
        for h in range(d):
            cvec[h] = -cvec[h]
        nbb = _select_cones(cvec, rad, axes, halves, planar, bases_b)

        # work list of (u, v) insertions for this pair, applied in order
        if small_a and small_b:
            for side in range(2):
                g0 = ra0 if side == 0 else rb0
                g1 = ra1 if side == 0 else rb1
                for i in range(g0, g1):
                    for j in range(i + 1, g1):
                        res = _add(rep_idx[i], rep_idx[j], n, m, d, points, edges, deg, ac_slot,
                                   slot_head, slot_len, nslot, ent_x, ent_y, ent_next, nent,
                                   max_ac, eu, ev, ne, leaf_of, parent, start, end, pos,
                                   axes, halves, planar, cbuf, vec)
                        (slot_head, slot_len, nslot, ent_x, ent_y, ent_next, nent, max_ac,
                         eu, ev, ne) = res
            for side in range(2):
                s0 = ra0 if side == 0 else rb0
                s1 = ra1 if side == 0 else rb1
                p0 = rb0 if side == 0 else ra0
                p1 = rb1 if side == 0 else ra1
                cs = cone_a if side == 0 else cone_b
                cp = cone_b if side == 0 else cone_a
                for i in range(s0, s1):
                    u = rep_idx[i]
                    if deg.get(u * m + cs, 0) > k:
                        continue
                    # lowest (degree, index) partner not yet adjacent
                    best = -1
                    bkey = 0
                    for j in range(p0, p1):
                        w = rep_idx[j]
                        if min(u, w) * n + max(u, w) in edges:
                            continue
                        key = deg.get(w * m + cp, 0) * n + w
                        if best < 0 or key < bkey:
                            best = w
                            bkey = key
                    if best >= 0:
                        res = _add(u, best, n, m, d, points, edges, deg, ac_slot,
                                   slot_head, slot_len, nslot, ent_x, ent_y, ent_next, nent,
                                   max_ac, eu, ev, ne, leaf_of, parent, start, end, pos,
                                   axes, halves, planar, cbuf, vec)
                        (slot_head, slot_len, nslot, ent_x, ent_y, ent_next, nent, max_ac,
                         eu, ev, ne) = res
            continue

        if not small_a and not small_b:
            stamp += 1
            sa_ = stamp
            keys, gather = _crossing_keys(a, bases_a, nba, m, n, lo1, hi1, points, ac_slot,
                                          slot_head, ent_x, ent_y, ent_next, gather)
            l1 = _kuhn(keys, n, xmark, sa_)
            stamp += 1
            sb_ = stamp
            keys, gather = _crossing_keys(b, bases_b, nbb, m, n, lo2, hi2, points, ac_slot,
                                          slot_head, ent_x, ent_y, ent_next, gather)
            l2 = _kuhn(keys, n, xmark, sb_)
            need = k + 1 - max(l1, l2)
            if need <= 0:
                continue
            y1 = _eligible(perm, start[a], end[a], deg, m, cone_a, k, xmark, sa_, n)
            y2 = _eligible(perm, start[b], end[b], deg, m, cone_b, k, xmark, sb_, n)
            cnt = min(need, y1.shape[0], y2.shape[0])
            for i in range(cnt):
                res = _add(y1[i], y2[i], n, m, d, points, edges, deg, ac_slot,
                           slot_head, slot_len, nslot, ent_x, ent_y, ent_next, nent,
                           max_ac, eu, ev, ne, leaf_of, parent, start, end, pos,
                           axes, halves, planar, cbuf, vec)
                (slot_head, slot_len, nslot, ent_x, ent_y, ent_next, nent, max_ac,
                 eu, ev, ne) = res
            continue

        # mixed case
        if small_a:
            s0, s1, cs = ra0, ra1, cone_a
            big, cb, blo, bhi, bb, nbig = b, cone_b, lo2, hi2, bases_b, nbb
        else:
            s0, s1, cs = rb0, rb1, cone_b
            big, cb, blo, bhi, bb, nbig = a, cone_a, lo1, hi1, bases_a, nba
        for i in range(s0, s1):
            for j in range(i + 1, s1):
                res = _add(rep_idx[i], rep_idx[j], n, m, d, points, edges, deg, ac_slot,
                           slot_head, slot_len, nslot, ent_x, ent_y, ent_next, nent,
                           max_ac, eu, ev, ne, leaf_of, parent, start, end, pos,
                           axes, halves, planar, cbuf, vec)
                (slot_head, slot_len, nslot, ent_x, ent_y, ent_next, nent, max_ac,
                 eu, ev, ne) = res
        for i in range(s0, s1):
            u = rep_idx[i]
            stamp += 1
            keys, gather = _crossing_keys(big, bb, nbig, m, n, blo, bhi, points, ac_slot,
                                          slot_head, ent_x, ent_y, ent_next, gather)
            g = _kuhn(keys, n, xmark, stamp)
            cnt = min(k + 1 - deg.get(u * m + cs, 0), k + 1 - g)
            if cnt <= 0:
                continue
            ys = _eligible(perm, start[big], end[big], deg, m, cb, k, xmark, stamp, n)
            added = 0
            for w in ys:
                if added == cnt:
                    break
                if min(u, w) * n + max(u, w) in edges:
                    continue
                res = _add(u, w, n, m, d, points, edges, deg, ac_slot,
                           slot_head, slot_len, nslot, ent_x, ent_y, ent_next, nent,
                           max_ac, eu, ev, ne, leaf_of, parent, start, end, pos,
                           axes, halves, planar, cbuf, vec)
                (slot_head, slot_len, nslot, ent_x, ent_y, ent_next, nent, max_ac,
                 eu, ev, ne) = res
                added += 1
    return eu[:ne].copy(), ev[:ne].copy(), max_ac


@njit(cache=True)
def _majority(points, rep_idx, r0, r1, lo, hi, axes, halves, planar, votes, vec):
    d = lo.shape[0]
    best = -1
    top = 0
    for i in range(r0, r1):
        u = rep_idx[i]
        for h in range(d):
            vec[h] = points[u, h] - (lo[h] + hi[h]) / 2
        c = _cone_index(vec, axes, halves, planar)
        votes[c] += 1
        if votes[c] > top or (votes[c] == top and c < best):
            top = votes[c]
            best = c
    for i in range(r0, r1):
        u = rep_idx[i]
        for h in range(d):
            vec[h] = points[u, h] - (lo[h] + hi[h]) / 2
        votes[_cone_index(vec, axes, halves, planar)] = 0
    return best


@njit(cache=True)
def _crossing_keys(node, bases, nb, m, n, lo, hi, points, ac_slot, slot_head,
                   ent_x, ent_y, ent_next, gather):
    d = lo.shape[0]
    cnt = 0
    for q in range(nb):
        key = node * m + bases[q]
        if key not in ac_slot:
            continue
        e = slot_head[ac_slot[key]]
        while e >= 0:
            y = ent_y[e]
            out = False
            for h in range(d):
                if points[y, h] < lo[h] or points[y, h] > hi[h]:
                    out = True
                    break
            if out:
                if cnt == gather.shape[0]:
                    grown = np.empty(2 * cnt, np.int64)
                    grown[:cnt] = gather
                    gather = grown
                gather[cnt] = ent_x[e] * n + y
                cnt += 1
            e = ent_next[e]
    return np.unique(gather[:cnt]), gather


@njit(cache=True)
def _eligible(perm, s0, s1, deg, m, cone, k, xmark, stamp, n):
    keys = np.empty(s1 - s0, np.int64)
    cnt = 0
    for i in range(s0, s1):
        u = perm[i]
        if xmark[u] == stamp:
            continue
        dg = deg.get(u * m + cone, 0)
        if dg <= k:
            keys[cnt] = dg * n + u
            cnt += 1
    keys = np.sort(keys[:cnt])
    return keys % n


@njit(cache=True)
def _add(u, v, n, m, d, points, edges, deg, ac_slot, slot_head, slot_len, nslot,
         ent_x, ent_y, ent_next, nent, max_ac, eu, ev, ne, leaf_of, parent, start, end,
         pos, axes, halves, planar, cbuf, vec):
    key = min(u, v) * n + max(u, v)
    if u == v or key in edges:
        return (slot_head, slot_len, nslot, ent_x, ent_y, ent_next, nent, max_ac, eu, ev, ne)
    edges[key] = True
    if ne == eu.shape[0]:
        gu = np.empty(2 * ne, np.int64)
        gv = np.empty(2 * ne, np.int64)
        gu[:ne] = eu
        gv[:ne] = ev
        eu = gu
        ev = gv
    eu[ne] = u
    ev[ne] = v
    ne += 1
    for side in range(2):
        x = u if side == 0 else v
        y = v if side == 0 else u
        for h in range(d):
            vec[h] = points[y, h] - points[x, h]
        c0 = _cone_index(vec, axes, halves, planar)
        dk = x * m + c0
        deg[dk] = deg.get(dk, 0) + 1
        nc = _cones_containing(vec, axes, halves, planar, cbuf)
        node = leaf_of[x]
        while node >= 0 and not (start[node] <= pos[y] < end[node]):
            for q in range(nc):
                sk = node * m + cbuf[q]
                if sk in ac_slot:
                    s = ac_slot[sk]
                else:
                    if nslot == slot_head.shape[0]:
                        g1 = np.empty(2 * nslot, np.int64)
                        g2 = np.empty(2 * nslot, np.int64)
                        g1[:nslot] = slot_head
                        g2[:nslot] = slot_len
                        slot_head = g1
                        slot_len = g2
                    s = nslot
                    nslot += 1
                    ac_slot[sk] = s
                    slot_head[s] = -1
                    slot_len[s] = 0
                if nent == ent_x.shape[0]:
                    g1 = np.empty(2 * nent, np.int64)
                    g2 = np.empty(2 * nent, np.int64)
                    g3 = np.empty(2 * nent, np.int64)
                    g1[:nent] = ent_x
                    g2[:nent] = ent_y
                    g3[:nent] = ent_next
                    ent_x = g1
                    ent_y = g2
                    ent_next = g3
                ent_x[nent] = x
                ent_y[nent] = y
                ent_next[nent] = slot_head[s]
                slot_head[s] = nent
                nent += 1
                slot_len[s] += 1
                if slot_len[s] > max_ac:
                    max_ac = slot_len[s]
            node = parent[node]
    return (slot_head, slot_len, nslot, ent_x, ent_y, ent_next, nent, max_ac, eu, ev, ne)
