import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from berezin.errors import DomainError, InvalidInput, RefinementRequired
from berezin.matfun import (
    continuous_arg_lift,
    operator_norm,
    principal_power,
    tr_log_one_plus,
    tr_log_series,
)


def random_contraction(rng, size, norm):
    z = rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size))
    return z * (norm / np.linalg.norm(z, 2))


def test_operator_norm_examples():
    assert operator_norm(np.eye(3)) == pytest.approx(1)
    assert operator_norm(np.diag([3.0, 1.0])) == pytest.approx(3)
    assert operator_norm(np.array([[0, 2.0], [0, 0]])) == pytest.approx(2, rel=1e-12)


def test_tr_log_examples():
    assert tr_log_one_plus(np.zeros((2, 2))) == 0
    val = tr_log_one_plus(np.diag([0.5, -0.25]))
    assert val == pytest.approx(math.log(1.5) + math.log(0.75), abs=1e-15)
    with pytest.raises(DomainError):
        tr_log_one_plus(np.diag([1.0, 0.0]))


def test_series_examples():
    assert tr_log_series(np.zeros((2, 2))) == 0
    assert tr_log_series(np.array([[0.5]]), 1e-14) == pytest.approx(math.log(1.5), abs=1e-13)
    assert tr_log_series(np.array([[0, 0.9], [0, 0]])) == 0
    with pytest.raises(InvalidInput):
        tr_log_series(np.zeros((1, 1)), 0)
    with pytest.raises(DomainError):
        tr_log_series(np.eye(2))


def test_eigen_route_matches_series_at_norm_08():
    z = random_contraction(np.random.default_rng(3), 3, 0.8)
    assert abs(tr_log_one_plus(z) - tr_log_series(z, 1e-15)) < 1e-10


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 4), st.floats(0.0, 0.9), st.integers(0, 2**32 - 1))
def test_trlog_routes_and_bound(size, norm, seed):
    z = random_contraction(np.random.default_rng(seed), size, norm)
    a = tr_log_one_plus(z)
    assert abs(a - tr_log_series(z, 1e-13)) < 1e-9
    assert abs(a.imag) < size * math.pi / 2


def test_lift_examples():
    assert continuous_arg_lift(np.ones(5), 0.0) == 0
    loop = np.exp(1j * 2 * math.pi * np.arange(65) / 64)
    assert continuous_arg_lift(loop, 0.0) == pytest.approx(2 * math.pi)


@pytest.mark.parametrize("direction", [1, -1])
def test_lift_three_quarter_turn(direction):
    # 1 -> i -> -1 -> -i, refined to 8 steps per quarter
    t = direction * np.linspace(0, 1.5 * math.pi, 25)
    assert continuous_arg_lift(np.exp(1j * t), 0.0) == pytest.approx(direction * 1.5 * math.pi)


def test_lift_refinement_and_start_checks():
    with pytest.raises(RefinementRequired):
        continuous_arg_lift([1, 1j, -1, -1j], 0.0)
    with pytest.raises(InvalidInput):
        continuous_arg_lift([1, 1j], 1.0)


def test_lift_full_loop_adds_two_pi():
    rng = np.random.default_rng(5)
    path = 2 + np.exp(1j * np.cumsum(rng.uniform(-0.2, 0.2, 40)))
    loop = np.exp(1j * 2 * math.pi * np.arange(1, 129) / 128) * path[-1]
    base = continuous_arg_lift(path, cmath.phase(path[0]))
    assert continuous_arg_lift(np.concatenate([path, loop]), cmath.phase(path[0])) == \
        pytest.approx(base + 2 * math.pi, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 60))
def test_lift_path_additivity_exact(seed, cut):
    rng = np.random.default_rng(seed)
    path = rng.uniform(0.5, 2, 80) * np.exp(1j * np.cumsum(rng.uniform(-1.2, 1.2, 80)))
    start = cmath.phase(path[0])
    whole = continuous_arg_lift(path, start)
    first = continuous_arg_lift(path[:cut], start)
    assert continuous_arg_lift(path[cut - 1:], first) == whole


def test_principal_power():
    assert principal_power(1j, 1) == pytest.approx(-1j)
    for alpha in (0.3, 0.5, 1.7):
        assert principal_power(1j, alpha, "upper-half-plane") == \
            pytest.approx(cmath.exp(-1j * alpha * math.pi / 2))
        w = cmath.exp(2j * math.pi / 3)
        assert principal_power(w, alpha, "upper-half-plane") == \
            pytest.approx(cmath.exp(-2j * math.pi * alpha / 3))
    with pytest.raises(DomainError):
        principal_power(0, 0.5)
    with pytest.raises(DomainError):
        principal_power(-1j, 0.5, "upper-half-plane")
