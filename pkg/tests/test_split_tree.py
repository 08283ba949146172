import json
import time

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ftspanner.geometry import AABox, aspect_ratio, box_size
from ftspanner.pair_decomp import container_box
from ftspanner.split_tree import (assign_representatives, build_tree, child_tight_virtual,
                                  representative_use_counts)
from oracles import faces_touched, uniform_points


def distinct_points(max_n=40, d=2):
    return arrays(np.float64, st.tuples(st.integers(1, max_n), st.just(d)),
                  elements=st.floats(-1e3, 1e3, allow_nan=False, width=32),
                  unique=False).filter(lambda a: len(np.unique(a, axis=0)) == len(a))


def test_single_point():
    tree = build_tree([[0.3, 0.7]])
    assert tree.n_nodes == 1 and tree.is_leaf(0)
    assert box_size(tree.node(0).enclosing) == 0.0


def test_unit_square_corners():
    tree = build_tree([[0, 0], [1, 0], [0, 1], [1, 1]])
    assert tree.n_nodes == 7
    assert sum(tree.is_leaf(i) for i in range(7)) == 4
    assert tree.node(0).enclosing == AABox((0, 0), (1, 1))
    # tie between x and y goes to the lowest dimension
    assert tree.split_dim[0] == 0 and tree.split_val[0] == 0.5


def test_point_on_plane_goes_lower():
    tree = build_tree([[0.0, 0.0], [0.5, 0.1], [1.0, 0.0]])
    lower = tree.point_ids(tree.left[0]).tolist()
    assert 1 in lower


def test_duplicates_rejected():
    with pytest.raises(ValueError):
        build_tree([[0, 0], [0, 0]])


def test_hundred_points_faces():
    pts = uniform_points(100, seed=3)
    tree = build_tree(pts)
    assert tree.n_nodes == 199
    for i in range(tree.n_nodes):
        assert faces_touched(pts[tree.point_ids(i)], tree.lo[i], tree.hi[i])


def check_tree(tree):
    n, m = tree.n, tree.n_nodes
    assert m == 2 * n - 1
    assert sum(tree.is_leaf(i) for i in range(m)) == n
    assert sorted(tree.perm.tolist()) == list(range(n))
    for i in range(m):
        node = tree.node(i)
        enc, tv = node.enclosing, node.tight_virtual
        assert tv.contains_box(enc)
        assert box_size(tv) == box_size(enc)
        assert aspect_ratio(tv) <= tree.beta * (1 + 1e-12) or box_size(tv) == 0
        if node.is_leaf:
            assert node.size == 1
            assert tree.leaf_of_point[tree.perm[node.start]] == i
        else:
            l, r = node.children
            assert tree.level[l] == tree.level[r] == node.level + 1
            ids = np.concatenate([tree.point_ids(l), tree.point_ids(r)])
            assert sorted(ids.tolist()) == sorted(tree.point_ids(i).tolist())
            for c in (l, r):
                assert container_box(tree, c).contains_box(tree.node(c).tight_virtual)
                assert tv.contains_box(tree.node(c).tight_virtual)
            # disjoint up to the shared splitting plane
            tl, tr = tree.node(l).tight_virtual, tree.node(r).tight_virtual
            j = tree.split_dim[i]
            assert tl.hi[j] <= tree.split_val[i] <= tr.lo[j]


@pytest.mark.parametrize("n,d,seed", [(2, 2, 0), (37, 2, 1), (100, 3, 2), (64, 1, 3)])
def test_invariants_exhaustive(n, d, seed):
    check_tree(build_tree(uniform_points(n, d, seed)))


@given(distinct_points())
def test_invariants_property(pts):
    check_tree(build_tree(pts))


class TestChildTightVirtual:
    def test_fixed_point(self):
        parent = AABox((0, 0), (4, 4))
        enc = AABox((0.5, 0.5), (1.5, 1.2))
        assert child_tight_virtual(parent, (0, 2.0), enc) == enc

    def test_thin_child(self):
        parent = AABox((0, 0), (2, 2))
        enc = AABox((0.1, 0), (0.2, 2))
        tv = child_tight_virtual(parent, (0, 1.0), enc)
        assert box_size(tv) == 2 and aspect_ratio(tv) <= 2 and tv.contains_box(enc)
        assert AABox((0, 0), (1, 2)).contains_box(tv)

    def test_degenerate_child(self):
        parent = AABox((0, 0), (4, 4))
        enc = AABox((2.5, 1.0), (2.5, 3.0))
        tv = child_tight_virtual(parent, (0, 2.0), enc)
        assert tv.sides == (1.0, 2.0)
        assert AABox((2, 0), (4, 4)).contains_box(tv)

    def test_straddle_error(self):
        with pytest.raises(ValueError):
            child_tight_virtual(AABox((0, 0), (4, 4)), (0, 2.0), AABox((1, 1), (3, 3)))


class TestRepresentatives:
    def test_two_points_k0(self):
        tree = assign_representatives(build_tree([[0, 0], [1, 0]]), 0)
        assert tree.reps(1).tolist() == [tree.perm[tree.start[1]]]
        assert tree.reps(0)[0] in (0, 1)
        assert representative_use_counts(tree).max() <= 2

    def test_five_points_k2(self):
        tree = assign_representatives(build_tree(uniform_points(5, seed=4)), 2)
        for i in range(tree.n_nodes):
            reps = tree.reps(i).tolist()
            ids = set(tree.point_ids(i).tolist())
            assert len(set(reps)) == len(reps) and set(reps) <= ids
            assert len(reps) == (len(ids) if len(ids) <= 2 else 3)

    def test_two_hundred_points_k0(self):
        tree = assign_representatives(build_tree(uniform_points(200, seed=5)), 0)
        assert representative_use_counts(tree).max() == 2
        for i in range(tree.n_nodes):
            assert tree.reps(i)[0] in set(tree.point_ids(i).tolist())

    @given(distinct_points(30), st.integers(0, 4))
    def test_property(self, pts, k):
        tree = assign_representatives(build_tree(pts), k)
        for i in range(tree.n_nodes):
            reps = tree.reps(i).tolist()
            assert set(reps) <= set(tree.point_ids(i).tolist())
            assert len(reps) == (1 if k == 0 else min(tree.size(i), k + 1))
        if k == 0:
            assert representative_use_counts(tree).max() <= 2


def test_dump_format():
    tree = assign_representatives(build_tree(uniform_points(6, seed=1)), 0)
    nodes = json.loads(tree.dumps())
    assert len(nodes) == 11
    assert set(nodes[0]) == {"id", "parent", "children", "lo", "hi", "tv_lo", "tv_hi",
                             "reps", "level"}
    assert nodes[0]["parent"] is None and len(nodes[0]["children"]) == 2


@pytest.mark.slow
def test_build_time_scaling():
    build_tree(uniform_points(64))
    ratios = []
    for seed in range(5):
        times = []
        for e in range(13, 18):
            pts = uniform_points(2 ** e, seed=seed)
            t0 = time.perf_counter()
            build_tree(pts)
            times.append(time.perf_counter() - t0)
        ratios += [b / a for a, b in zip(times, times[1:])]
    assert np.mean(ratios) <= 2.6
