import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from berezin.cocycle import (
    CoverElement,
    berezin_sigma,
    class_residual,
    cocycle_c,
    cocycle_matrix,
    conjugation_integer_shift,
    conjugation_shift,
    cover_mul,
    det_phi,
    integer_class,
    loop_lift,
    sigma_alpha,
    tr_log_pair,
    trivializer_gamma,
)
from berezin.errors import InvalidInput, NumericalFailure
from berezin.symplectic import random_symplectic, rotation

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(1, 3)


def triple(n, seed, spread=1.0):
    rng = np.random.default_rng(seed)
    return [random_symplectic(n, rng, spread) for _ in range(3)]


def test_normalisation():
    g = random_symplectic(2, 1)
    assert cocycle_c(np.eye(4), g) == 0
    assert cocycle_c(g, np.eye(4)) == 0
    assert cocycle_c(rotation(0.7), random_symplectic(1, 2)) == 0


def test_known_pair():
    # Phi1^-1 Psi1 = 0.6i and conj(Psi2) Phi2^-1 = 0.8, so 1 + Z = 1 + 0.48i
    g1 = np.diag([2.0, 0.5])
    g2 = rotation(math.pi / 4) @ np.diag([3.0, 1 / 3]) @ rotation(-math.pi / 4)
    assert cocycle_matrix(g1, g2)[0, 0] == pytest.approx(0.48j, abs=1e-15)
    assert cocycle_c(g1, g2) == pytest.approx(math.atan(0.48), abs=1e-15)
    # second route: arg of Phi1^-1 Phi(g1 g2) Phi2^-1 from the product itself
    w = det_phi(g1 @ g2) / (det_phi(g1) * det_phi(g2))
    assert cocycle_c(g1, g2) == pytest.approx(cmath.phase(w), abs=1e-14)


def test_dimension_mismatch():
    with pytest.raises(InvalidInput):
        cocycle_c(np.eye(2), np.eye(4))


@settings(max_examples=150, deadline=None)
@given(dims, seeds)
def test_cocycle_identity(n, seed):
    g1, g2, g3 = triple(n, seed, 1.5)
    r = cocycle_c(g1, g2) + cocycle_c(g1 @ g2, g3) - cocycle_c(g1, g2 @ g3) - cocycle_c(g2, g3)
    assert abs(r) < 1e-9


@settings(max_examples=150, deadline=None)
@given(dims, seeds, st.floats(0.1, 2.0))
def test_uniform_bound(n, seed, spread):
    g1, g2, _ = triple(n, seed, spread)
    assert abs(cocycle_c(g1, g2)) < n * math.pi / 2


@settings(max_examples=100, deadline=None)
@given(dims, seeds)
def test_real_part_is_coboundary(n, seed):
    g1, g2, _ = triple(n, seed)
    re = tr_log_pair(g1, g2).real
    expected = (math.log(abs(det_phi(g1 @ g2))) - math.log(abs(det_phi(g1)))
                - math.log(abs(det_phi(g2))))
    assert abs(re - expected) < 1e-9


def test_gamma_examples():
    assert trivializer_gamma(np.eye(2)) == 0
    assert trivializer_gamma(rotation(math.pi / 2)) == pytest.approx(3 * math.pi / 2)
    assert trivializer_gamma(np.diag([5.0, 0.2])) == 0
    assert 0 <= trivializer_gamma(random_symplectic(3, 4)) < 2 * math.pi


def test_integer_class_examples():
    assert integer_class(np.eye(2), np.eye(2)) == 0
    r = rotation(3 * math.pi / 4)
    assert trivializer_gamma(r) == pytest.approx(5 * math.pi / 4)
    assert trivializer_gamma(r @ r) == pytest.approx(math.pi / 2)
    assert integer_class(r, r) == 1


@settings(max_examples=150, deadline=None)
@given(dims, seeds)
def test_integer_class_residual(n, seed):
    g1, g2, _ = triple(n, seed, 1.5)
    x = class_residual(g1, g2)
    assert abs(x - round(x)) < 1e-8
    assert integer_class(g1, g2) == round(x)


def test_integer_class_flags_branch_bugs(monkeypatch):
    import berezin.cocycle as mod
    monkeypatch.setattr(mod, "cocycle_c", lambda *a, **k: 0.5)
    with pytest.raises(NumericalFailure):
        mod.integer_class(np.eye(2), np.eye(2))


@settings(max_examples=60, deadline=None)
@given(dims, seeds)
def test_conjugation_gives_equivalent_cocycle(n, seed):
    g1, g2, h = triple(n, seed, 1.0)
    h_inv = np.linalg.inv(h)
    conj = lambda g: h_inv @ g @ h
    delta = lambda f: f(g1 @ g2) - f(g1) - f(g2)
    shift = lambda g: conjugation_shift(h, g)
    assert abs(cocycle_c(conj(g1), conj(g2)) - cocycle_c(g1, g2) - delta(shift)) < 1e-9
    beta = lambda g: conjugation_integer_shift(h, g)
    assert integer_class(conj(g1), conj(g2)) - integer_class(g1, g2) == -(
        beta(g1) + beta(g2) - beta(g1 @ g2))


def test_sigma_examples():
    g = random_symplectic(2, 9)
    assert berezin_sigma(np.eye(4), g) == pytest.approx(1)
    assert berezin_sigma(rotation(0.4), rotation(2.0)) == pytest.approx(1)
    assert sigma_alpha(g, g, 0.0) == 1
    assert sigma_alpha(g, g.T, 0.5) == berezin_sigma(g, g.T)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 3), seeds)
def test_sigma_phase_and_modulus(n, seed):
    g1, g2, _ = triple(n, seed)
    s = berezin_sigma(g1, g2)
    t = tr_log_pair(g1, g2)
    assert abs(abs(s) * math.exp(0.5 * t.real) - 1) < 1e-10
    assert abs(math.remainder(cmath.phase(s) + cocycle_c(g1, g2) / 2, 2 * math.pi)) < 1e-9


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), seeds)
def test_sigma_alpha_one_is_inverse_determinant(n, seed):
    g1, g2, _ = triple(n, seed)
    z = cocycle_matrix(g1, g2)
    direct = 1 / np.linalg.det(np.eye(n) + z)
    assert abs(sigma_alpha(g1, g2, 1.0) - direct) < 1e-10 * max(1, abs(direct))


def test_loop_lift():
    e = loop_lift(0.0)
    assert np.allclose(e.g, np.eye(2)) and e.x == 0
    deck = loop_lift(2 * math.pi, n=3)
    assert np.allclose(deck.g, np.eye(6), atol=1e-15) and deck.x == 2 * math.pi
    quarter = loop_lift(math.pi / 2)
    assert np.allclose(quarter.g, rotation(-math.pi / 2), atol=1e-15)
    loop_lift(17.3, n=2).validate()


def test_cover_mul_examples():
    e = CoverElement(np.eye(2), 0.0)
    out = cover_mul(e, e)
    assert np.array_equal(out.g, np.eye(2)) and out.x == 0
    y1, y2 = 2.5, 4.1
    prod = cover_mul(loop_lift(y1, 2), loop_lift(y2, 2))
    assert prod.x == pytest.approx(y1 + y2)
    assert np.allclose(prod.g, loop_lift(y1 + y2, 2).g)
    with pytest.raises(NumericalFailure):
        cover_mul(CoverElement(np.eye(2), 1.0), e)


def lifted(g):
    return CoverElement(g, trivializer_gamma(g))


@settings(max_examples=100, deadline=None)
@given(dims, seeds)
def test_cover_associativity(n, seed):
    e1, e2, e3 = (lifted(g) for g in triple(n, seed))
    left = cover_mul(cover_mul(e1, e2), e3)
    right = cover_mul(e1, cover_mul(e2, e3))
    assert abs(left.x - right.x) < 1e-9
