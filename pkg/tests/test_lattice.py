import cmath
import math

import numpy as np
import pytest

from berezin.cocycle import sigma_alpha
from berezin.errors import BranchAmbiguity, DomainError, InvalidInput
from berezin.lattice import (
    OMEGA,
    cayley,
    holonomy,
    is_relation,
    mobius_disk,
    mobius_halfplane,
    multiplier_halfplane,
    normalized_multiplier_disk,
    obstruction_witness,
    parse_word,
    relator_winding,
    word_matrix,
)
from berezin.symplectic import random_symplectic, to_blocks, torsion_generators

I0, J0, K0 = torsion_generators()
ALPHAS = (0.3, 0.5, 1, 1.7, 2)


def ball_point(rng, n, radius=0.9):
    w = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    w = w + w.T
    return radius * rng.uniform() * w / np.linalg.norm(w, 2)


def test_halfplane_examples():
    z = 0.4 + 1.3j
    assert mobius_halfplane(np.eye(2), z) == z
    assert abs(mobius_halfplane(I0, 1j) - 1j) < 1e-15
    assert abs(mobius_halfplane(J0, OMEGA) - OMEGA) < 1e-15
    with pytest.raises(DomainError):
        mobius_halfplane(I0, -1j)
    with pytest.raises(InvalidInput):
        mobius_halfplane(np.diag([2.0, 2.0]), z)


def test_halfplane_right_action():
    rng = np.random.default_rng(3)
    for _ in range(50):
        g1, g2 = random_symplectic(1, rng), random_symplectic(1, rng)
        z = complex(rng.normal(), rng.uniform(0.1, 3))
        lhs = mobius_halfplane(g1 @ g2, z)
        assert abs(lhs - mobius_halfplane(g2, mobius_halfplane(g1, z))) < 1e-10 * (1 + abs(lhs))


def test_multiplier_halfplane_examples():
    z = 0.2 + 0.7j
    for alpha in ALPHAS:
        assert multiplier_halfplane(K0, z, alpha) == 1
        assert abs(multiplier_halfplane(I0, 1j, alpha) - cmath.exp(-0.5j * math.pi * alpha)) < 1e-15
        got = multiplier_halfplane(J0, OMEGA, alpha)
        assert abs(got - cmath.exp(-2j * math.pi * alpha / 3)) < 1e-15


def test_multiplier_branch_ambiguity():
    minus = -np.eye(2)
    with pytest.raises(BranchAmbiguity):
        multiplier_halfplane(minus, 1j, 0.5)
    assert multiplier_halfplane(minus, 1j, 2) == pytest.approx(1)
    # rotating from the identity to -1 through R(t) carries the argument to -pi
    path = [(np.array([[math.cos(t), math.sin(t)], [-math.sin(t), math.cos(t)]]), 1j)
            for t in np.linspace(0, math.pi, 20)]
    got = multiplier_halfplane(path[-1][0], 1j, 0.5, path=path)
    assert abs(got - cmath.exp(0.5j * math.pi)) < 1e-12
    with pytest.raises(BranchAmbiguity):
        multiplier_halfplane(path[-1][0], 1j, 0.5, path=[path[0], path[10], path[-1]])


def test_disk_examples():
    rng = np.random.default_rng(0)
    for n in (1, 2):
        g = random_symplectic(n, rng)
        phi, psi = to_blocks(g)
        assert np.allclose(mobius_disk(g, np.zeros((n, n))), np.linalg.solve(phi, psi))
        z = ball_point(rng, n)
        assert np.allclose(mobius_disk(np.eye(2 * n), z), z, atol=1e-15)
        assert normalized_multiplier_disk(g, np.zeros((n, n)), 0.7) == 1
        assert normalized_multiplier_disk(g, z, 0) == 1
        assert np.allclose(mobius_disk(to_blocks(g), z), mobius_disk(g, z))
    with pytest.raises(DomainError):
        mobius_disk(np.eye(2), 1.0)
    with pytest.raises(InvalidInput):
        mobius_disk(np.eye(4), np.array([[0, 0.1], [0.2, 0]]))


@pytest.mark.parametrize("n", [1, 2])
def test_disk_composition_is_right_action(n):
    rng = np.random.default_rng(10 + n)
    worst = 0
    for _ in range(100):
        g1, g2 = random_symplectic(n, rng), random_symplectic(n, rng)
        z = ball_point(rng, n)
        lhs = mobius_disk(g1 @ g2, z)
        worst = max(worst, np.max(np.abs(lhs - mobius_disk(g2, mobius_disk(g1, z)))))
    assert worst < 1e-10


@pytest.mark.parametrize("n", [1, 2])
def test_disk_multiplier_cocycle(n):
    rng = np.random.default_rng(20 + n)
    for _ in range(200):
        g1, g2 = random_symplectic(n, rng), random_symplectic(n, rng)
        z = ball_point(rng, n)
        alpha = rng.uniform(0, 3)
        lhs = normalized_multiplier_disk(g1, z, alpha) * \
            normalized_multiplier_disk(g2, mobius_disk(g1, z), alpha)
        sigma = sigma_alpha(g1, g2, alpha)
        assert abs(lhs - sigma * normalized_multiplier_disk(g1 @ g2, z, alpha)) < 1e-9
        # the phase read off at z = 0 is sigma_alpha itself
        at_zero = normalized_multiplier_disk(g2, mobius_disk(g1, np.zeros((n, n))), alpha)
        assert abs(at_zero - sigma) < 1e-10


def test_models_agree_through_cayley():
    rng = np.random.default_rng(5)
    for _ in range(50):
        g = random_symplectic(1, rng)
        z = complex(rng.normal(), rng.uniform(0.1, 3))
        w = cayley(z)
        assert abs(w) < 1
        assert abs(mobius_disk(g, w) - cayley(mobius_halfplane(g, z))) < 1e-12


def test_word_parsing_and_relations():
    assert np.array_equal(parse_word("I^-1")[0], parse_word(["i"])[0])
    assert np.array_equal(parse_word("K-")[0] @ K0, np.eye(2))
    assert is_relation("I,I,I,I") and is_relation(["J"] * 3) and is_relation("I,K,I,K,I,K")
    assert not is_relation("I,I")
    assert word_matrix("I,I")[0, 0] == -1
    with pytest.raises(InvalidInput):
        parse_word("L")
    with pytest.raises(InvalidInput):
        holonomy("I,K", 0.5)


def test_holonomy_examples():
    for alpha in ALPHAS:
        expected = cmath.exp(-2j * math.pi * alpha)
        assert abs(holonomy("K,K^-1", alpha) - 1) < 1e-15
        assert abs(holonomy(["I"] * 4, alpha) - expected) < 1e-9
        assert abs(holonomy(["J"] * 3, alpha) - expected) < 1e-9


def test_holonomy_base_point_and_concatenation():
    words = ["I,I,I,I", "J,J,J", "I,K,I,K,I,K", "K,I,K,I,K,I", "j,j,j", "I,I,J,J,J,I,I"]
    for alpha in (0.3, 1.7):
        for w in words:
            base = holonomy(w, alpha)
            for z0 in (2j, 0.5 + 0.4j, -3 + 0.01j):
                assert abs(holonomy(w, alpha, base_point=z0) - base) < 1e-9
        for w1 in words:
            for w2 in words:
                both = holonomy(w1 + "," + w2, alpha)
                assert abs(both - holonomy(w1, alpha) * holonomy(w2, alpha)) < 1e-9
    assert relator_winding("I,I,I,I") == 1 and relator_winding("j,j,j") == -1
    assert relator_winding("I,I,I,I,J,J,J") == 2


def test_integer_alpha_is_trivial():
    for w in ("I,I,I,I", "J,J,J", "I,K,I,K,I,K", "I^-1,I^-1,I^-1,I^-1"):
        for alpha in (1, 2, 3):
            assert abs(holonomy(w, alpha) - 1) < 1e-9


def test_obstruction_witness():
    for alpha in ALPHAS:
        r = obstruction_witness(alpha)
        assert r.nontrivial == (alpha != round(alpha))
        assert abs(r.holonomy_I4 - r.holonomy_J3) < 1e-9
    half = obstruction_witness(0.5)
    assert abs(half.holonomy_I4 + 1) < 1e-12 and half.nontrivial
    assert obstruction_witness(1).deviation < 1e-9
    d = obstruction_witness(0.3).to_dict()
    assert sorted(d) == ["alpha", "deviation", "expected", "holonomy_I4", "holonomy_J3",
                         "nontrivial"]
