import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ftspanner.geometry import (AABox, Cone, angle_between, angular_span, box_distance,
                                box_size, build_frame, cone_contains, general_cone_direction)
from ftspanner.params import choose_parameters
from oracles import corners_visible, sampled_box_distance

coord = st.floats(-100, 100, allow_nan=False, allow_infinity=False)


@st.composite
def boxes(draw, d=2):
    a = [draw(coord) for _ in range(d)]
    b = [draw(coord) for _ in range(d)]
    return AABox(tuple(map(min, a, b)), tuple(map(max, a, b)))


def unit_square(shift=(0.0, 0.0), side=1.0):
    return AABox(shift, tuple(s + side for s in shift))


class TestBoxes:
    def test_overlapping_distance_zero(self):
        assert box_distance(AABox((0, 0), (1, 1)), AABox((0.5, 0.5), (1.5, 1.5))) == 0.0

    def test_axis_gap(self):
        assert box_distance(AABox((0, 0), (1, 1)), AABox((2, 0), (3, 1))) == 1.0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            box_distance(AABox((0, 0), (1, 1)), AABox((0, 0, 0), (1, 1, 1)))

    def test_sampling_oracle(self, rng):
        for _ in range(5):
            lo1 = rng.random(2) * 4
            lo2 = rng.random(2) * 4 + 3
            b1 = AABox.from_arrays(lo1, lo1 + rng.random(2))
            b2 = AABox.from_arrays(lo2, lo2 + rng.random(2))
            approx = sampled_box_distance(b1, b2, 100_000, rng)
            assert box_distance(b1, b2) <= approx + 1e-12
            assert approx - box_distance(b1, b2) < 1e-3

    @pytest.mark.parametrize("lo,hi,size", [((0, 0), (1, 2), 2.0), ((3, 3), (3, 3), 0.0),
                                            ((0, 0, 0), (1, 1, 1), 1.0)])
    def test_size(self, lo, hi, size):
        assert box_size(AABox(lo, hi)) == size

    def test_invalid_box(self):
        with pytest.raises(ValueError):
            AABox((1, 0), (0, 1))

    @given(boxes(), boxes())
    def test_distance_symmetric_nonnegative(self, b1, b2):
        d12 = box_distance(b1, b2)
        assert d12 == box_distance(b2, b1)
        assert d12 >= 0
        intersect = all(l1 <= h2 and l2 <= h1
                        for l1, h1, l2, h2 in zip(b1.lo, b1.hi, b2.lo, b2.hi))
        assert (d12 == 0) == intersect


class TestFrames:
    def test_planar_eight(self):
        fr = build_frame(math.pi / 4, 2)
        assert len(fr) == 8
        assert np.allclose(fr.half_angles, math.pi / 8)
        ang = np.arctan2(fr.axes[:, 1], fr.axes[:, 0]) % (2 * math.pi)
        assert np.allclose(np.sort(ang), np.arange(8) * math.pi / 4)

    def test_planar_sixteen(self):
        assert len(build_frame(math.pi / 8, 2)) == 16

    @pytest.mark.parametrize("alpha,d", [(0.5, 3), (0.3, 2), (0.9, 4)])
    def test_sampled_covering(self, alpha, d, rng):
        fr = build_frame(alpha, d)
        assert fr.angular_span <= alpha + 1e-12
        v = rng.standard_normal((100_000, d))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        cos = v @ fr.axes.T
        best = np.arccos(np.clip(cos, -1, 1)) - fr.half_angles
        assert np.all(best.min(axis=1) <= 1e-9)

    @pytest.mark.parametrize("alpha", [0.0, math.pi / 3, -1.0])
    def test_alpha_range(self, alpha):
        with pytest.raises(ValueError):
            build_frame(alpha, 2)

    def test_cone_index_is_lowest(self):
        fr = build_frame(math.pi / 4, 2)
        # exactly on the boundary of sectors 0 and 1
        v = (math.cos(math.pi / 8), math.sin(math.pi / 8))
        assert fr.cones_containing(v) == [0, 1]
        assert fr.cone_index(v) == 0


class TestCones:
    cone = Cone((1.0, 0.0), math.pi / 4)

    def test_inside(self):
        assert cone_contains((0, 0), self.cone, (1, 0))

    def test_outside(self):
        assert not cone_contains((0, 0), self.cone, (0, 1))

    def test_boundary_closed(self):
        assert cone_contains((0, 0), self.cone, (1, 1))

    def test_apex_error(self):
        with pytest.raises(ValueError):
            cone_contains((2, 3), self.cone, (2, 3))

    def test_bad_cone(self):
        with pytest.raises(ValueError):
            Cone((1.0, 1.0), 0.3)
        with pytest.raises(ValueError):
            Cone((1.0, 0.0), math.pi / 2)

    @given(coord, coord, coord, coord)
    def test_translation_invariant(self, ax, ay, sx, sy):
        q = (ax + 1.5, ay + 0.7)
        assert cone_contains((ax, ay), self.cone, q) == cone_contains(
            (ax + sx, ay + sy), self.cone, (q[0] + sx, q[1] + sy))

    @pytest.mark.parametrize("u,v,expect", [((1, 0), (0, 1), math.pi / 2),
                                            ((2, 2), (1, 1), 0.0),
                                            ((1, 0), (-1, 0), math.pi)])
    def test_angle_between(self, u, v, expect):
        assert angle_between(u, v) == pytest.approx(expect, abs=1e-12)

    def test_angle_zero_vector(self):
        with pytest.raises(ValueError):
            angle_between((0, 0), (1, 0))


class TestGeneralConeDirection:
    def test_diagonal(self):
        fr = build_frame(math.pi / 4, 2)
        eps = 1e-3
        base, target = AABox((0, 0), (eps, eps)), AABox((10, 10), (10 + eps, 10 + eps))
        cones = general_cone_direction(base, target, fr, 0.2)
        # sector 1 holds the pi/4 direction; its neighbours lie pi/4 away, beyond 0.2
        assert cones == [1]
        assert corners_visible(base, target, fr, cones)

    def test_collinear_limit(self):
        fr = build_frame(math.pi / 4, 2)
        base, target = AABox((0, 0), (0, 0)), AABox((1000, 0), (1000, 0))
        assert general_cone_direction(base, target, fr, 1e-9) == [0]

    def test_overlap_error(self):
        fr = build_frame(0.5, 2)
        with pytest.raises(ValueError):
            general_cone_direction(unit_square(), unit_square((0.5, 0.5)), fr)

    @pytest.mark.parametrize("d", [2, 3])
    def test_corner_oracle_and_span(self, d, rng):
        p = choose_parameters(2.0, d)
        fr = build_frame(p.alpha if d == 2 else 0.5, d)
        theta1 = 2 * math.sqrt(d) / p.rho1 + fr.alpha
        for _ in range(15):
            s = rng.random()
            lo1 = rng.random(d)
            b1 = AABox.from_arrays(lo1, lo1 + s * rng.random(d))
            direction = rng.standard_normal(d)
            direction /= np.linalg.norm(direction)
            lo2 = lo1 + direction * p.rho1 * 1.5
            b2 = AABox.from_arrays(lo2, lo2 + s * rng.random(d))
            cones = general_cone_direction(b1, b2, fr, theta1)
            assert corners_visible(b1, b2, fr, cones)
            assert angular_span(fr, cones) <= 4 * math.sqrt(d) / p.rho1 + 3 * fr.alpha + 1e-9
