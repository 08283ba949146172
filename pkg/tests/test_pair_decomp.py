import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ftspanner.generators import exp_line
from ftspanner.geometry import AABox, box_distance, box_size
from ftspanner.pair_decomp import (bspd_violations, build_wspd, container_box,
                                   coverage_counts, derive_bspd,
                                   find_equal_size_floating_box, neighbor_counts,
                                   neighbor_sets, separation_ok)
from ftspanner.params import choose_parameters
from ftspanner.split_tree import build_tree
from oracles import uniform_points

P = choose_parameters(2.0, 2)


def decompose(pts, params=P):
    tree = build_tree(pts)
    wspd = build_wspd(tree, params.wsep)
    return tree, wspd, derive_bspd(tree, wspd, params)


def test_two_points():
    tree, wspd, bspd = decompose([[0, 0], [1, 0]])
    assert len(wspd) == 1
    assert {int(wspd.a[0]), int(wspd.b[0])} == {1, 2}
    pair = bspd.pair(0)
    assert box_size(pair.fv1) > 0 and box_size(pair.fv2) > 0
    assert not bspd_violations(tree, bspd, P)


@pytest.mark.parametrize("n", [3, 10, 33, 48])
def test_coverage_and_invariants(n):
    for seed in range(3):
        tree, wspd, bspd = decompose(uniform_points(n, seed=seed))
        cov = coverage_counts(tree, wspd)
        assert np.all(cov[~np.eye(n, dtype=bool)] == 1)
        sizes = [tree.size(a) * tree.size(b) for a, b in zip(wspd.a, wspd.b)]
        assert sum(sizes) == n * (n - 1) // 2
        assert separation_ok(tree, wspd, P.wsep)
        assert bspd_violations(tree, bspd, P) == []
        assert len(bspd) == len(wspd)


def test_invariants_recomputed_directly():
    tree, wspd, bspd = decompose(uniform_points(30, seed=9))
    for pair in bspd.pairs():
        s1, s2 = box_size(pair.fv1), box_size(pair.fv2)
        smax, dist = max(s1, s2), box_distance(pair.fv1, pair.fv2)
        assert dist == pytest.approx(pair.edge_distance, rel=1e-12)
        assert P.mu1 * s2 <= s1 * (1 + 1e-9) and s1 <= P.mu2 * s2 * (1 + 1e-9)
        assert P.rho1 * smax <= dist * (1 + 1e-9) <= P.rho2 * smax * (1 + 2e-9)
        for node, fv in ((pair.b1, pair.fv1), (pair.b1p, pair.fv2)):
            assert fv.contains_box(tree.node(node).tight_virtual)
            assert container_box(tree, node).contains_box(fv, tol=1e-9 * max(smax, dist))


def test_floating_boxes_of_disjoint_nodes_do_not_overlap():
    tree, wspd, bspd = decompose(uniform_points(16, seed=2))
    boxes = []
    for pair in bspd.pairs():
        boxes += [(pair.b1, pair.fv1), (pair.b1p, pair.fv2)]
    for i, (u, fu) in enumerate(boxes):
        for v, fv in boxes[i + 1:]:
            pu, pv = set(tree.point_ids(u).tolist()), set(tree.point_ids(v).tolist())
            if pu & pv:
                continue
            overlap = np.minimum(np.array(fu.hi), fv.hi) - np.maximum(np.array(fu.lo), fv.lo)
            assert np.any(overlap <= 1e-12)


class TestFloatingBox:
    def test_already_right_size(self):
        small = AABox((1, 1), (3, 2))
        assert find_equal_size_floating_box(AABox((0, 0), (2, 2)), small,
                                            AABox((0, 0), (4, 4))) == small

    def test_grow_inside_container(self):
        small = AABox((3.8, 3.8), (3.9, 3.9))
        out = find_equal_size_floating_box(AABox((0, 0), (2, 2)), small, AABox((0, 0), (4, 4)))
        assert 1 <= box_size(out) <= 2
        assert out.contains_box(small) and AABox((0, 0), (4, 4)).contains_box(out)

    def test_flush_corner(self):
        small = AABox((3.9, 3.9), (4.0, 4.0))
        out = find_equal_size_floating_box(AABox((0, 0), (2, 2)), small, AABox((0, 0), (4, 4)))
        assert out.hi == (4.0, 4.0)

    def test_bad_preconditions(self):
        with pytest.raises(ValueError):
            find_equal_size_floating_box(AABox((0, 0), (1, 1)), AABox((0, 0), (3, 3)),
                                         AABox((0, 0), (4, 4)))

    @given(st.floats(0.01, 1), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
    def test_property(self, s, fx, fy, grow):
        container = AABox((0, 0), (4, 4))
        side = s * 2
        lo = (fx * (4 - side), fy * (4 - side))
        small = AABox(lo, (lo[0] + side, lo[1] + side / 2))
        big_size = side + grow * (4 - side) / 2
        out = find_equal_size_floating_box(AABox((0, 0), (big_size, big_size)), small, container)
        assert big_size / 2 * (1 - 1e-12) <= box_size(out) <= big_size * (1 + 1e-12)
        assert out.contains_box(small) and container.contains_box(out, tol=1e-12)


class TestNeighbors:
    def test_two_points_tie(self):
        tree, wspd, _ = decompose([[0, 0], [1, 0]])
        assert neighbor_sets(tree, wspd) == {1: [2], 2: [1]}

    def test_every_pair_recorded(self):
        tree, wspd, _ = decompose(uniform_points(40, seed=1))
        ns = neighbor_sets(tree, wspd)
        for a, b in zip(wspd.a.tolist(), wspd.b.tolist()):
            assert b in ns.get(a, []) or a in ns.get(b, [])

    def test_exp_line_n_vs_nge(self):
        full, ge = [], []
        sizes = (40, 80, 160, 320)
        for n in sizes:
            tree, wspd, _ = decompose(exp_line(n))
            f, g = neighbor_counts(tree, wspd)
            full.append(f)
            ge.append(g)
        # |N(b)| grows linearly while |N>=(b)| stays flat
        assert full == [n - 1 for n in sizes]
        assert max(ge) <= 8


def test_bspd_dump():
    _, _, bspd = decompose(uniform_points(5, seed=0))
    rows = json.loads(bspd.dumps())
    assert set(rows[0]) == {"b1", "b1p", "fv1", "fv2", "edge_distance"}
    assert set(rows[0]["fv1"]) == {"lo", "hi"}
