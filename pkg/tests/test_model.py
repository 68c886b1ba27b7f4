import math

import pytest
from hypothesis import given, strategies as st

from sostree.model import ModelParams, alpha_weight, tau_from_theta, theta_from_tau, transfer_q

@pytest.mark.parametrize("m, expected", [(0, 0.0), (3, 3.0), (-4, 2.0), (1, 1.0), (-7, 7.0)])
def test_alpha_weight(m, expected):
    assert alpha_weight(m, ModelParams(0.5, p=0.5, q_w=1.0)) == expected


def test_transfer_q_examples():
    par = ModelParams(0.5, p=0.5, q_w=1.0)
    assert transfer_q(5, 5, par) == 1.0
    assert transfer_q(0, 1, par) == pytest.approx(0.5, abs=1e-16)
    assert transfer_q(0, 2, par) == pytest.approx(0.5, abs=1e-16)


def test_theta_from_tau_examples():
    assert theta_from_tau(2.5) == pytest.approx(0.5, abs=1e-16)
    t = theta_from_tau(10.0)
    assert t == pytest.approx((10 - math.sqrt(96)) / 2, rel=1e-14)
    assert abs(t + 1 / t - 10) < 1e-12
    near = theta_from_tau(2 + 1e-9)
    assert 0.999 < near < 1.0


@pytest.mark.parametrize("tau", [2.0, 1.0, -3.0])
def test_theta_from_tau_rejects(tau):
    with pytest.raises(ValueError):
        theta_from_tau(tau)


@pytest.mark.parametrize("kwargs", [dict(theta=0.0), dict(theta=1.0), dict(theta=0.5, p=0.0),
                                    dict(theta=0.5, q_w=-1.0), dict(theta=0.5, k=0), dict(theta=0.5, k=1.5)])
def test_params_validation(kwargs):
    with pytest.raises(ValueError):
        ModelParams(**kwargs)


@given(st.floats(min_value=1e-6, max_value=0.99))
def test_theta_tau_round_trip(theta):
    assert abs(theta_from_tau(tau_from_theta(theta)) - theta) <= 1e-14


@given(st.floats(min_value=0.99, max_value=1 - 1e-6))
def test_theta_tau_round_trip_near_one(theta):
    # d(theta)/d(tau) blows up like 1/sqrt(tau - 2): only a sqrt(eps)-type bound is possible here
    err = abs(theta_from_tau(tau_from_theta(theta)) - theta)
    assert err <= 4e-16 / (1 - theta) + 1e-15


@given(st.integers(-50, 50), st.integers(-50, 50), st.integers(-10**6, 10**6),
       st.floats(0.05, 0.95), st.floats(0.1, 3), st.floats(0.1, 3))
def test_transfer_symmetry_and_translation(i, j, c, theta, p, q):
    par = ModelParams(theta, p, q)
    assert transfer_q(i, j, par) == transfer_q(j, i, par)
    assert transfer_q(i + c, j + c, par) == transfer_q(i, j, par)
    assert (transfer_q(i, j, par) == 1.0) == (i == j)


@pytest.mark.parametrize("theta, p, q", [(0.5, 0.5, 1.0), (0.9, 1.0, 1.0), (0.2, 2.0, 0.7)])
def test_parity_subsequences_decrease(theta, p, q):
    par = ModelParams(theta, p, q)
    even = [transfer_q(0, 2 * t, par) for t in range(30)]
    odd = [transfer_q(0, 2 * t + 1, par) for t in range(30)]
    assert all(a > b for a, b in zip(even, even[1:]))
    assert all(a > b for a, b in zip(odd, odd[1:]))


def test_special_case_flag():
    assert ModelParams(0.3).is_special_k2
    assert not ModelParams(0.3, k=3).is_special_k2
