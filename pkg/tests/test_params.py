import dataclasses
import json
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ftspanner.params import (choose_parameters, inequality_report, stretch_lhs,
                              verify_inequalities)


def test_closed_form_t2_d2():
    p = choose_parameters(2.0, 2)
    x = 1 / 51
    assert p.alpha == pytest.approx(x, rel=1e-15)
    assert p.theta == pytest.approx(19 * x, rel=1e-15)
    assert p.rho1 == pytest.approx(51 * math.sqrt(2), rel=1e-12)
    assert p.rho1 == pytest.approx(72.125, abs=5e-4)
    assert p.rho2 == pytest.approx(2 * 51 * math.sqrt(2) + 6 * math.sqrt(2), rel=1e-12)
    assert p.rho2 == pytest.approx(152.735, abs=5e-4)
    assert (p.mu1, p.mu2, p.beta) == (0.5, 2.0, 2.0)
    assert verify_inequalities(p)


def test_t15_composite_holds():
    p = choose_parameters(1.5, 2)
    assert p.alpha == pytest.approx(0.5 / 38.5, rel=1e-15)
    assert stretch_lhs(p) <= 1.5
    assert inequality_report(p)["stretch_composite"]


def test_rho2_equal_rho1_fails():
    p = dataclasses.replace(choose_parameters(2.0, 2), rho2=choose_parameters(2.0, 2).rho1)
    assert not verify_inequalities(p)


def test_theta_right_angle_fails():
    p = dataclasses.replace(choose_parameters(2.0, 2), theta=math.pi / 2)
    assert not verify_inequalities(p)


def test_invalid_t():
    with pytest.raises(ValueError):
        choose_parameters(1.0, 2)


def test_large_t_clamped():
    with pytest.warns(UserWarning):
        p = choose_parameters(5.0, 2)
    assert p.clamped and p.t_effective == 3.0 and p.t == 5.0
    assert p.rho1 == choose_parameters(3.0, 2).rho1
    assert verify_inequalities(p)


def test_json_round_trip():
    p = choose_parameters(2.0, 3, k=2)
    assert type(p).from_dict(json.loads(p.to_json())) == p


@given(st.floats(1.0001, 3.0), st.integers(1, 6))
def test_always_consistent(t, d):
    p = choose_parameters(t, d)
    assert verify_inequalities(p), inequality_report(p)
    assert 21 * p.alpha < 1


@given(st.floats(1.0001, 2.999), st.floats(0.0001, 0.5))
def test_monotone_in_t(t, dt):
    lo, hi = choose_parameters(t, 2), choose_parameters(min(t + dt, 3.0), 2)
    assert lo.rho1 >= hi.rho1
    assert lo.alpha <= hi.alpha
