"""Real symplectic matrices and their complex block form.

Block convention: a 2n x 2n matrix is ``[[A, B], [C, D]]`` with n x n blocks,
and the skew form is ``K = [[0, 1], [-1, 0]]``.  Conjugating by
``J = (1/sqrt 2) [[1, i], [i, 1]]`` gives

    J^-1 g J = [[Phi, Psi], [conj(Psi), conj(Phi)]]

with ``Phi = (A + D + i(B - C)) / 2`` and ``Psi = (B + C + i(A - D)) / 2``.
Under this convention the rotation ``R(t) = [[cos t, -sin t], [sin t, cos t]]``
has ``Phi = exp(-i t)``.
"""

from typing import NamedTuple

import numpy as np
from scipy.linalg import expm

from .errors import InvalidInput

TOL_SYMP = 1e-9


class BlockPair(NamedTuple):
    """Complex blocks (Phi, Psi) of a real symplectic matrix.

    Arrays may carry leading batch dimensions: ``phi.shape == (..., n, n)``.
    """

    phi: np.ndarray
    psi: np.ndarray


def standard_form(n):
    """Return the 2n x 2n skew form K = [[0, 1], [-1, 0]]."""
    k = np.zeros((2 * n, 2 * n))
    k[:n, n:] = np.eye(n)
    k[n:, :n] = -np.eye(n)
    return k


def half_dim(m):
    m = np.asarray(m)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2] or m.shape[-1] % 2:
        raise InvalidInput(f"expected square matrices of even size, got shape {m.shape}")
    return m.shape[-1] // 2


def check_symplectic(m, tol=TOL_SYMP):
    """Residual ``||m^t K m - K||`` (operator norm) and whether it is acceptable.

    The acceptance threshold scales as ``tol * (1 + ||m||^2)`` so that products
    of many well-conditioned factors are not rejected for rounding alone.

    Returns
    -------
    (float, bool)
    """
    m = np.asarray(m, dtype=float)
    n = half_dim(m)
    if m.ndim != 2:
        raise InvalidInput("check_symplectic takes a single matrix")
    if not np.all(np.isfinite(m)):
        raise InvalidInput("matrix has non-finite entries")
    k = standard_form(n)
    residual = float(np.linalg.norm(m.T @ k @ m - k, 2))
    scale = 1.0 + np.linalg.norm(m, 2) ** 2
    return residual, residual <= tol * scale


def symplectic_residuals(ms):
    """Batched ``||m^t K m - K||`` for an array of shape (..., 2n, 2n)."""
    ms = np.asarray(ms, dtype=float)
    k = standard_form(half_dim(ms))
    r = np.swapaxes(ms, -1, -2) @ k @ ms - k
    return np.linalg.norm(r, 2, axis=(-2, -1))


def is_integer_symplectic(m):
    """Exact check of ``m^t K m == K`` in integer arithmetic."""
    m = np.asarray(m)
    if not np.issubdtype(m.dtype, np.integer):
        if not np.all(np.isfinite(m)) or not np.array_equal(m, np.round(m)):
            return False
    mi = np.asarray(np.round(m), dtype=object)
    n = half_dim(mi)
    k = np.asarray(standard_form(n).astype(int), dtype=object)
    return bool(np.all(mi.T.dot(k).dot(mi) == k))


def to_blocks(g, check=True):
    """Blocks (Phi, Psi) of ``J^-1 g J``; accepts batches (..., 2n, 2n)."""
    g = np.asarray(g, dtype=float)
    n = half_dim(g)
    if check:
        if g.ndim == 2:
            _, ok = check_symplectic(g)
            if not ok:
                raise InvalidInput("matrix is not symplectic within tolerance")
        else:
            res = symplectic_residuals(g)
            scale = 1.0 + np.linalg.norm(g, 2, axis=(-2, -1)) ** 2
            if not np.all(res <= TOL_SYMP * scale):
                raise InvalidInput("batch contains non-symplectic matrices")
    a = g[..., :n, :n]
    b = g[..., :n, n:]
    c = g[..., n:, :n]
    d = g[..., n:, n:]
    phi = 0.5 * ((a + d) + 1j * (b - c))
    psi = 0.5 * ((b + c) + 1j * (a - d))
    return BlockPair(phi, psi)


def block_residuals(bp):
    """Residuals of ``Phi Phi* - Psi Psi* = 1`` and ``Phi* Phi - Psi^t conj(Psi) = 1``."""
    phi, psi = (np.asarray(x, dtype=complex) for x in bp)
    eye = np.eye(phi.shape[-1])
    h = lambda x: np.conj(np.swapaxes(x, -1, -2))
    r1 = np.linalg.norm(phi @ h(phi) - psi @ h(psi) - eye, 2, axis=(-2, -1))
    r2 = np.linalg.norm(h(phi) @ phi - np.swapaxes(psi, -1, -2) @ np.conj(psi) - eye, 2,
                        axis=(-2, -1))
    return r1, r2


def validate_blocks(bp, tol=1e-9):
    """Raise InvalidInput unless ``bp`` satisfies the block-pair invariants."""
    phi, psi = (np.asarray(x, dtype=complex) for x in bp)
    if phi.shape != psi.shape or phi.shape[-1] != phi.shape[-2]:
        raise InvalidInput("phi and psi must be square matrices of equal shape")
    if not (np.all(np.isfinite(phi)) and np.all(np.isfinite(psi))):
        raise InvalidInput("blocks have non-finite entries")
    r1, r2 = block_residuals((phi, psi))
    scale = 1.0 + np.linalg.norm(phi, 2, axis=(-2, -1)) ** 2
    if np.any(r1 > tol * scale) or np.any(r2 > tol * scale):
        raise InvalidInput("blocks violate Phi Phi* - Psi Psi* = 1")
    z1 = np.linalg.solve(phi, psi)
    z2 = np.swapaxes(np.linalg.solve(np.swapaxes(phi, -1, -2),
                                     np.swapaxes(np.conj(psi), -1, -2)), -1, -2)
    if np.any(np.linalg.norm(z1, 2, axis=(-2, -1)) >= 1.0) or \
            np.any(np.linalg.norm(z2, 2, axis=(-2, -1)) >= 1.0):
        raise InvalidInput("blocks violate ||Phi^-1 Psi|| < 1")


def from_blocks(bp, check=True):
    """Inverse of :func:`to_blocks`: the real matrix with blocks (Phi, Psi)."""
    phi, psi = (np.asarray(x, dtype=complex) for x in bp)
    if check:
        validate_blocks((phi, psi))
    n = phi.shape[-1]
    g = np.empty(phi.shape[:-2] + (2 * n, 2 * n))
    g[..., :n, :n] = phi.real + psi.imag
    g[..., n:, n:] = phi.real - psi.imag
    g[..., :n, n:] = phi.imag + psi.real
    g[..., n:, :n] = psi.real - phi.imag
    return g


def rotation(theta):
    """The 2 x 2 rotation matrix R(theta); its Phi block is exp(-i theta)."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def random_symplectic(n, seed, spread=1.0):
    """``expm(K S)`` for a random symmetric S with entries uniform in [-spread, spread].

    ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    if n < 1 or n > 8:
        raise InvalidInput("n must be in 1..8")
    if spread < 0 or spread > 2:
        raise InvalidInput("spread must be in [0, 2]")
    rng = np.random.default_rng(seed)
    s = rng.uniform(-spread, spread, size=(2 * n, 2 * n))
    s = np.triu(s) + np.triu(s, 1).T
    return expm(standard_form(n) @ s)


def sl2_embed(h, n):
    """Place the 2 x 2 unimodular ``h`` on the coordinate pair (1, n+1) of Sp(2n, Z)."""
    h = np.asarray(h)
    if h.shape != (2, 2) or not np.array_equal(h, np.round(h)):
        raise InvalidInput("h must be a 2 x 2 integer matrix")
    h = h.astype(np.int64)
    if h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0] != 1:
        raise InvalidInput("det h must equal 1")
    g = np.eye(2 * n, dtype=np.int64)
    g[0, 0], g[0, n], g[n, 0], g[n, n] = h[0, 0], h[0, 1], h[1, 0], h[1, 1]
    assert is_integer_symplectic(g)
    return g


def torsion_generators():
    """The matrices I, J, K of SL(2, Z) with I^4 = J^3 = 1 and IK = J."""
    i0 = np.array([[0, -1], [1, 0]], dtype=np.int64)
    j0 = np.array([[0, -1], [1, -1]], dtype=np.int64)
    k0 = np.array([[1, -1], [0, 1]], dtype=np.int64)
    eye = np.eye(2, dtype=np.int64)
    assert np.array_equal(np.linalg.matrix_power(i0, 4), eye)
    assert np.array_equal(np.linalg.matrix_power(j0, 3), eye)
    assert np.array_equal(i0 @ k0, j0)
    return i0, j0, k0


def elementary_integer_symplectic(n, rng):
    """One random elementary generator of Sp(2n, Z).

    Draws uniformly among: a transvection ``[[1, E], [0, 1]]`` or its transpose
    with E a symmetric elementary matrix, and ``diag(A, A^-t)`` with A an
    elementary shear of SL(n, Z).
    """
    rng = np.random.default_rng(rng)
    g = np.eye(2 * n, dtype=np.int64)
    kind = rng.integers(3) if n > 1 else rng.integers(2)
    sign = int(rng.choice([-1, 1]))
    i, j = (int(x) for x in rng.integers(n, size=2))
    if kind in (0, 1):
        e = np.zeros((n, n), dtype=np.int64)
        e[i, j] += sign
        if i != j:
            e[j, i] += sign
        if kind == 0:
            g[:n, n:] = e
        else:
            g[n:, :n] = e
    else:
        if i == j:
            j = (i + 1) % n
        a = np.eye(n, dtype=np.int64)
        a[i, j] = sign
        a_inv_t = np.eye(n, dtype=np.int64)
        a_inv_t[j, i] = -sign
        g[:n, :n] = a
        g[n:, n:] = a_inv_t
    return g


def random_integer_symplectic(n, seed, length=4):
    """Product of ``length`` random elementary generators of Sp(2n, Z)."""
    rng = np.random.default_rng(seed)
    g = np.eye(2 * n, dtype=np.int64)
    for _ in range(length):
        g = g @ elementary_integer_symplectic(n, rng)
    assert is_integer_symplectic(g)
    return g
