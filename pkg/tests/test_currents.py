import math

import numpy as np
import pytest
from scipy.integrate import quad

from berezin.cocycle import cocycle_c
from berezin.currents import (
    Identity,
    Torus,
    big_cocycle_C,
    big_cocycle_C_with_error,
    constant_current,
    current_cocycle,
    disk_grid,
    embed,
    gamma_circ,
    linear_torus_map,
    nu_tilde,
    pair_mul,
    shear_map,
    sine_profile,
    torus_grid,
    trig_profile,
)
from berezin.errors import InvalidInput, NumericalFailure, Unsupported
from berezin.symplectic import random_integer_symplectic, sl2_embed, torsion_generators

PX = trig_profile([(1, 0.05, 0.1), (2, 0.03, 0.0)])
PY = trig_profile([(1, 0.0, 0.1), (3, 0.02, 0.01)])
PZ = trig_profile([(2, 0.04, -0.02)])


def shears(dim=2):
    n = dim // 2
    return (shear_map(dim, (0, n), PX), shear_map(dim, (n, 0), PY),
            shear_map(dim, (0, n), PZ))


def test_grid_weights_sum_to_volume():
    for grid in (torus_grid(2, 64), torus_grid(4, 6), disk_grid(0.7, 40, 33)):
        assert abs(grid.weights.sum() - grid.domain.volume) < 1e-12
    with pytest.raises(InvalidInput):
        Torus(3)


def test_linear_maps_reduce_to_matrix_cocycle():
    grid = torus_grid(4, 4)
    for seed in range(5):
        a1 = random_integer_symplectic(2, seed)
        a2 = random_integer_symplectic(2, seed + 100)
        got = big_cocycle_C(linear_torus_map(a1), linear_torus_map(a2), grid)
        assert abs(got - cocycle_c(a1, a2)) < 1e-12


def test_identity_factor_gives_zero():
    grid = torus_grid(2, 32)
    sx, sy, _ = shears()
    assert big_cocycle_C(Identity(Torus(2)), sy, grid) == 0
    assert big_cocycle_C(sx, Identity(Torus(2)), grid) == 0


def test_linear_map_examples():
    _, _, k0 = torsion_generators()
    x = np.random.default_rng(0).uniform(size=(50, 4))
    assert np.allclose(linear_torus_map(np.eye(4, dtype=int))(x), x)
    q = linear_torus_map(sl2_embed(k0, 2))
    y = q(x)
    assert np.allclose(y[:, 0], np.mod(x[:, 0] - x[:, 2], 1))
    assert np.allclose(y[:, 1:], x[:, 1:])
    with pytest.raises(InvalidInput):
        linear_torus_map(np.diag([2, 2]))


def test_linear_map_preserves_grid_measure():
    # the image of the midpoint grid under an integer map is a permutation
    # of the grid modulo 1 whenever the grid is invariant; check the mass
    grid = torus_grid(2, 16)
    q = linear_torus_map(random_integer_symplectic(1, 3))
    img = q(grid.nodes)
    assert abs(grid.weights.sum() - 1) < 1e-12
    assert np.all((img >= 0) & (img < 1))


def test_shear_examples():
    x = np.random.default_rng(1).uniform(size=(200, 2))
    assert np.array_equal(shear_map(2, (0, 1), sine_profile(0.0))(x), x)
    sx, sy, _ = shears()
    assert np.allclose(np.linalg.det(sx.jacobian(x)), 1, atol=1e-15)
    comp = (sx @ sy).jacobian(x)
    assert np.max(np.abs(comp - sx.jacobian(sy(x)) @ sy.jacobian(x))) < 1e-12
    with pytest.raises(InvalidInput):
        shear_map(4, (0, 1), PX)


def test_self_convergence():
    sx, sy, _ = shears()
    values = [big_cocycle_C(sx, sy, torus_grid(2, n)) for n in (8, 16, 32, 64)]
    diffs = np.abs(np.diff(values))
    assert abs(values[-1]) > 1e-4
    # periodic midpoint is spectral, so each halving beats the second-order ratio 4
    assert np.all(diffs[1:] * 4 <= diffs[:-1])
    value, err = big_cocycle_C_with_error(sx, sy, torus_grid(2, 128))
    assert abs(value - values[-1]) < 1e-10 and err < 1e-12


@pytest.mark.parametrize("n_grid", [64, 128])
def test_cocycle_identity_on_shears(n_grid):
    sx, sy, sz = shears()
    grid = torus_grid(2, n_grid)
    terms = [big_cocycle_C_with_error(a, b, grid)
             for a, b in ((sx, sy), (sx @ sy, sz), (sx, sy @ sz), (sy, sz))]
    residual = terms[0][0] + terms[1][0] - terms[2][0] - terms[3][0]
    assert abs(residual) < 3 * sum(e for _, e in terms)


def test_cocycle_identity_mixed_with_linear():
    grid = torus_grid(4, 8)
    sx, sy, _ = shears(4)
    a = linear_torus_map(random_integer_symplectic(2, 8, 2))
    terms = [big_cocycle_C_with_error(p, q, grid)
             for p, q in ((sx, a), (sx @ a, sy), (sx, a @ sy), (a, sy))]
    residual = terms[0][0] + terms[1][0] - terms[2][0] - terms[3][0]
    assert abs(residual) < 3 * sum(e for _, e in terms)


def test_substitution_invariance_linear():
    # integrand of C(q1, q2) evaluated at q3(y) and summed over y
    grid = torus_grid(2, 16)
    a1, a2, a3 = (linear_torus_map(random_integer_symplectic(1, s)) for s in (1, 2, 3))
    direct = big_cocycle_C(a1, a2, grid)
    moved = big_cocycle_C(a1, a2 @ a3, grid) + big_cocycle_C(a2, a3, grid) \
        - big_cocycle_C(a1 @ a2, a3, grid)
    assert abs(direct - moved) < 1e-12


def test_non_symplectic_jacobian_reports_node():
    sx, _, _ = shears()
    bad = shear_map(2, (0, 1), PX)
    bad._jacobian = lambda x: 2 * np.broadcast_to(np.eye(2), (len(x), 2, 2)).copy()
    with pytest.raises(NumericalFailure, match="node"):
        big_cocycle_C(sx, bad, torus_grid(2, 4))


def test_gamma_circ_shears_and_identity():
    grid = torus_grid(2, 32)
    assert gamma_circ(Identity(Torus(2)), grid) == 0
    sx, _, _ = shears()
    x = grid.nodes
    # det Phi = 1 + i f'/2 stays in the right half plane along the isotopy
    expected = np.arctan(PX.df(x[:, 1]) / 2)
    assert np.max(np.abs(nu_tilde(sx, x) - expected)) < 1e-14
    oracle = quad(lambda t: math.atan(PX.df(t) / 2), 0, 1, epsabs=1e-14)[0]
    assert abs(gamma_circ(sx, grid) - oracle) < 1e-12
    odd = shear_map(2, (0, 1), sine_profile(0.1))
    assert abs(gamma_circ(odd, grid)) < 1e-15


def test_gamma_circ_needs_isotopy():
    q = linear_torus_map(random_integer_symplectic(1, 2))
    with pytest.raises(Unsupported):
        gamma_circ(q, torus_grid(2, 4))


@pytest.mark.parametrize("dim", [2, 4])
def test_trivializer_identity_on_shears(dim):
    sx, sy, sz = shears(dim)
    grid = torus_grid(dim, 64 if dim == 2 else 12)
    for a, b in ((sx, sy), (sy, sz), (sx @ sy, sz)):
        c, err = big_cocycle_C_with_error(a, b, grid)
        delta = gamma_circ(a @ b, grid) - gamma_circ(a, grid) - gamma_circ(b, grid)
        assert abs(c - delta) < max(3 * err, 1e-12)


def test_pair_mul_examples():
    grid = torus_grid(2, 8)
    x = grid.nodes
    sx, sy, _ = shears()
    e = constant_current(Identity(Torus(2)), np.eye(2), grid)
    out = pair_mul(e, embed(sy, grid))
    assert np.allclose(out.p(x), sy(x)) and np.allclose(out.h(x), sy.jacobian(x))
    round_trip = pair_mul(constant_current(sx, np.eye(2), grid),
                          constant_current(sx.inverse(), np.eye(2), grid))
    d = round_trip.p(x) - x
    assert np.max(np.abs(d - np.round(d))) < 1e-14
    assert np.allclose(round_trip.sample(), np.eye(2))
    a1, a2 = random_integer_symplectic(1, 5), random_integer_symplectic(1, 6)
    prod = pair_mul(constant_current(linear_torus_map(a1), a1, grid),
                    constant_current(linear_torus_map(a2), a2, grid))
    assert np.allclose(prod.sample(), a1 @ a2)
    with pytest.raises(InvalidInput):
        pair_mul(e, constant_current(sx, np.eye(2), torus_grid(2, 4)))


def test_embedded_currents_match_big_cocycle():
    grid = torus_grid(2, 32)
    sx, sy, _ = shears()
    assert current_cocycle(embed(sx, grid), embed(sy, grid)) == \
        pytest.approx(big_cocycle_C(sx, sy, grid), abs=1e-17)


def test_reduction_is_bit_stable():
    sx, sy, _ = shears()
    grid = torus_grid(2, 256)
    assert big_cocycle_C(sx, sy, grid) == big_cocycle_C(sx, sy, grid)
