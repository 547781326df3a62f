"""The Berezin cocycle on Sp(2n, R), its trivializer and the universal cover.

For g1, g2 with blocks (Phi_k, Psi_k) the product formula
``Phi(g1 g2) = Phi1 Phi2 + Psi1 conj(Psi2)`` gives

    Phi1^-1 Phi(g1 g2) Phi2^-1 = 1 + Z,   Z = Phi1^-1 Psi1 conj(Psi2) Phi2^-1,

with ``||Z|| < 1``.  Everything here is built on ``tr ln(1 + Z)``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, NumericalFailure
from .matfun import tr_log_one_plus
from .symplectic import from_blocks, half_dim, to_blocks

TWO_PI = 2 * math.pi
INTEGER_TOL = 1e-6
COVER_TOL = 1e-9


def _pair_blocks(g1, g2, check):
    g1 = np.asarray(g1, dtype=float)
    g2 = np.asarray(g2, dtype=float)
    if half_dim(g1) != half_dim(g2):
        raise InvalidInput(f"dimension mismatch: {g1.shape} vs {g2.shape}")
    return to_blocks(g1, check=check), to_blocks(g2, check=check)


def cocycle_matrix(g1, g2, check=True):
    """The matrix ``Z`` with ``Phi1^-1 Phi(g1 g2) Phi2^-1 = 1 + Z``; batches allowed."""
    (phi1, psi1), (phi2, psi2) = _pair_blocks(g1, g2, check)
    left = np.linalg.solve(phi1, psi1)
    # conj(Psi2) Phi2^-1, via a transposed solve
    right = np.swapaxes(np.linalg.solve(np.swapaxes(phi2, -1, -2),
                                        np.swapaxes(np.conj(psi2), -1, -2)), -1, -2)
    return left @ right


def tr_log_pair(g1, g2, check=True):
    """Complex ``tr ln(1 + Z)`` for the pair; real part is a coboundary."""
    return tr_log_one_plus(cocycle_matrix(g1, g2, check), check=check)


def cocycle_c(g1, g2, check=True):
    """Berezin cocycle ``c(g1, g2) = Im tr ln(1 + Z)``.

    Satisfies ``|c| < n pi / 2`` and ``c(e, g) = c(g, e) = 0``.  Batched
    inputs of shape (..., 2n, 2n) return an array.
    """
    val = tr_log_pair(g1, g2, check)
    return val.imag if isinstance(val, np.ndarray) else float(val.imag)


def det_phi(g, check=True):
    phi, _ = to_blocks(g, check=check)
    return np.linalg.det(phi)


def trivializer_gamma(g, check=True):
    """``arg det Phi(g)`` normalised to [0, 2 pi)."""
    arg = np.angle(det_phi(g, check))
    out = np.where(arg < 0, arg + TWO_PI, arg)
    out = np.where(out >= TWO_PI, 0.0, out)
    return float(out) if out.ndim == 0 else out


def class_residual(g1, g2, check=True):
    """``(c + gamma(g1) + gamma(g2) - gamma(g1 g2)) / 2 pi`` before rounding."""
    g1 = np.asarray(g1, dtype=float)
    g2 = np.asarray(g2, dtype=float)
    total = (cocycle_c(g1, g2, check) + trivializer_gamma(g1, check)
             + trivializer_gamma(g2, check) - trivializer_gamma(g1 @ g2, check=False))
    return total / TWO_PI


def integer_class(g1, g2, check=True):
    """The Z-valued cocycle obtained by rounding :func:`class_residual`.

    Raises NumericalFailure if the unrounded value is further than 1e-6 from
    an integer: that means a branch was mishandled, and a silently wrong
    integer would be worse.
    """
    x = class_residual(g1, g2, check)
    k = np.rint(x)
    if np.any(np.abs(x - k) > INTEGER_TOL):
        raise NumericalFailure(f"class residual {np.max(np.abs(x - k)):.3g} too large")
    return int(k) if np.ndim(k) == 0 else k.astype(int)


def berezin_sigma(g1, g2, check=True):
    """``det(1 + Z)^(-1/2)`` through the principal trace-log."""
    return sigma_alpha(g1, g2, 0.5, check)


def sigma_alpha(g1, g2, alpha, check=True):
    """``exp(-alpha tr ln(1 + Z))``: the multiplicative form of ``alpha * c``."""
    val = np.exp(-alpha * tr_log_pair(g1, g2, check))
    return complex(val) if np.ndim(val) == 0 else val


@dataclass(frozen=True)
class CoverElement:
    """A point ``(g, x)`` of the universal cover: ``e^{ix}`` is the phase of det Phi(g)."""

    g: np.ndarray
    x: float

    def __post_init__(self):
        g = np.array(self.g, dtype=float)
        g.setflags(write=False)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "x", float(self.x))

    def phase_error(self):
        d = det_phi(self.g)
        return abs(d / abs(d) - complex(math.cos(self.x), math.sin(self.x)))

    def validate(self, tol=COVER_TOL):
        err = self.phase_error()
        if err > tol:
            raise NumericalFailure(f"cover element phase mismatch {err:.3g}")
        return self


def cover_mul(e1, e2):
    """``(g1, x1)(g2, x2) = (g1 g2, x1 + x2 + c(g1, g2))``, validated on both ends."""
    e1.validate()
    e2.validate()
    out = CoverElement(e1.g @ e2.g, e1.x + e2.x + cocycle_c(e1.g, e2.g))
    return out.validate()


def loop_lift(y, n=1):
    """Lift of the loop ``g(y)`` with ``Phi = diag(e^{iy}, 1, ..., 1)`` and ``Psi = 0``."""
    phi = np.eye(n, dtype=complex)
    phi[0, 0] = complex(math.cos(y), math.sin(y))
    g = from_blocks((phi, np.zeros((n, n), dtype=complex)))
    return CoverElement(g, y).validate()


def conjugation_shift(h, g):
    """x-shift picked up by ``(g, x)`` under conjugation by ``(h, 0)`` in the cover.

    ``(h, 0)^-1 (g, x) (h, 0) = (h^-1 g h, x + shift)`` with
    ``shift = c(h^-1, g) + c(h^-1 g, h) - c(h, h^-1)``.  Consequently
    ``c(h^-1 g1 h, h^-1 g2 h) - c(g1, g2)`` is the coboundary of ``shift``.
    """
    h = np.asarray(h, dtype=float)
    g = np.asarray(g, dtype=float)
    h_inv = np.linalg.inv(h)
    return cocycle_c(h_inv, g) + cocycle_c(h_inv @ g, h) - cocycle_c(h, h_inv)


def conjugation_integer_shift(h, g):
    """Integer ``(gamma(g) + shift - gamma(h^-1 g h)) / 2 pi``.

    The integer cocycle of the conjugated pair equals the original one minus
    the coboundary of this function, so both define the same class.
    """
    h = np.asarray(h, dtype=float)
    g = np.asarray(g, dtype=float)
    conj = np.linalg.inv(h) @ g @ h
    x = (trivializer_gamma(g) + conjugation_shift(h, g)
         - trivializer_gamma(conj, check=False)) / TWO_PI
    k = round(x)
    if abs(x - k) > INTEGER_TOL:
        raise NumericalFailure(f"conjugation shift residual {abs(x - k):.3g}")
    return k
