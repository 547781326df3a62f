"""Linear-fractional actions, normalized multipliers and relator holonomy.

Both models act on the right.  In the half-plane model the row vector
``(1, z) g`` equals ``(a + z c) (1, z^[g])``, so

    j(g1 g2, z) = j(g1, z) j(g2, z^[g1]),    j(g, z) = a + z c,

and in the disk model the same holds with ``j = Phi + z conj(Psi)``.  The
multipliers ``j^(-alpha)`` satisfy this rule only up to the phase
``sigma_alpha(g1, g2)``; around a relation word of SL(2, Z) the phases
multiply to ``exp(-2 pi i alpha k)`` with an integer winding ``k``.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import BranchAmbiguity, DomainError, InvalidInput, NumericalFailure
from .matfun import LIFT_JUMP, operator_norm, tr_log_one_plus
from .symplectic import BlockPair, to_blocks, torsion_generators, validate_blocks

OMEGA = cmath.exp(2j * math.pi / 3)
BASE_POINT = 2j
SECOND_BASE_POINT = 0.3 + 1.7j
PERIOD_TOL = 1e-9
WITNESS_TOL = 1e-9


def _real_sl2(g):
    g = np.asarray(g, dtype=float)
    if g.shape != (2, 2) or not np.all(np.isfinite(g)):
        raise InvalidInput("expected a finite real 2 x 2 matrix")
    det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
    if abs(det - 1) > 1e-12 * (1 + np.sum(g * g)):
        raise InvalidInput(f"det g = {det!r}, expected 1")
    return g


def _upper(z):
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise InvalidInput("z must be finite")
    if not z.imag > 0:
        raise DomainError(f"z = {z} is not in the upper half-plane")
    return z


def _j_halfplane(g, z):
    w = g[0, 0] + z * g[1, 0]
    # a + z c = 0 needs c = 0 = a, impossible for det g = 1 and Im z > 0
    if w == 0:
        raise NumericalFailure("a + z c vanished")
    return w


def mobius_halfplane(g, z):
    """``z^[g] = (a + z c)^-1 (b + z d)`` on the upper half-plane."""
    g = _real_sl2(g)
    z = _upper(z)
    out = (g[0, 1] + z * g[1, 1]) / _j_halfplane(g, z)
    assert out.imag > 0
    return out


def _is_integer(alpha):
    return float(alpha) == round(float(alpha))


def _principal_arg(w, alpha):
    if w.imag == 0 and w.real < 0 and not _is_integer(alpha):
        raise BranchAmbiguity(f"a + z c = {w.real} lies on the cut; supply a path")
    return math.atan2(w.imag, w.real) if w.imag != 0 or w.real > 0 else math.pi


def multiplier_halfplane(g, z, alpha, path=None):
    """``(a + z c)^(-alpha)``.

    Without ``path`` the argument is taken in (-pi, pi].  For ``c != 0`` the
    value ``a + z c`` never leaves the open half-plane selected by the sign
    of ``c``, so this is the branch continuous in ``z``.  ``path`` is a
    sequence of ``(g_k, z_k)`` samples ending at ``(g, z)``; the argument
    then starts at the principal value of the first sample and is carried
    along the path in steps below pi/2.
    """
    alpha = float(alpha)
    if not math.isfinite(alpha):
        raise InvalidInput("alpha must be finite")
    if path is None:
        w = _j_halfplane(_real_sl2(g), _upper(z))
        arg = _principal_arg(w, alpha)
    else:
        values = [_j_halfplane(_real_sl2(gk), _upper(zk)) for gk, zk in path]
        if not values:
            raise InvalidInput("empty path")
        end = _j_halfplane(_real_sl2(g), _upper(z))
        if abs(values[-1] - end) > 1e-12 * (1 + abs(end)):
            raise InvalidInput("path does not end at (g, z)")
        arg = _principal_arg(values[0], alpha)
        steps = np.angle(np.array(values[1:]) / np.array(values[:-1]))
        if steps.size and np.max(np.abs(steps)) >= LIFT_JUMP:
            raise BranchAmbiguity("path too coarse to carry the branch")
        arg += float(steps.sum())
        w = end
    return cmath.exp(-alpha * complex(math.log(abs(w)), arg))


def _blocks(g):
    if isinstance(g, BlockPair):
        phi, psi = (np.asarray(x, dtype=complex) for x in g)
        validate_blocks((phi, psi))
        return phi, psi
    return to_blocks(g)


def _ball_point(z, n):
    scalar = np.ndim(z) == 0
    z = np.asarray(z, dtype=complex).reshape(n, n) if scalar else np.asarray(z, dtype=complex)
    if z.shape != (n, n):
        raise InvalidInput(f"z must be {n} x {n}, got shape {z.shape}")
    if not np.all(np.isfinite(z)):
        raise InvalidInput("z has non-finite entries")
    if np.max(np.abs(z - z.T)) > 1e-12 * (1 + np.max(np.abs(z))):
        raise InvalidInput("z must be complex symmetric")
    if operator_norm(z) >= 1:
        raise DomainError(f"||z|| = {operator_norm(z):.6g} is not < 1")
    return z, scalar


def mobius_disk(g, z):
    """``z^[g] = (Phi + z conj(Psi))^-1 (Psi + z conj(Phi))`` on the matrix ball.

    ``g`` is a real symplectic matrix or its :class:`BlockPair`; ``z`` is a
    complex symmetric n x n matrix (a scalar when n = 1) with ``||z|| < 1``.
    """
    phi, psi = _blocks(g)
    z, scalar = _ball_point(z, phi.shape[-1])
    out = np.linalg.solve(phi + z @ np.conj(psi), psi + z @ np.conj(phi))
    if operator_norm(out) >= 1:
        raise NumericalFailure("image left the ball")
    return complex(out[0, 0]) if scalar else out


def normalized_multiplier_disk(g, z, alpha):
    """``det(1 + z conj(Psi) Phi^-1)^(-alpha)`` through the principal trace-log.

    ``||z conj(Psi) Phi^-1|| < 1`` on the ball, so the series branch is the
    principal one and the value is single-valued.
    """
    phi, psi = _blocks(g)
    z, _ = _ball_point(z, phi.shape[-1])
    w = z @ np.linalg.solve(phi.T, np.conj(psi).T).T
    return complex(cmath.exp(-float(alpha) * tr_log_one_plus(w)))


def cayley(z):
    """The point of the unit disk intertwining the two models at ``z``.

    With the block convention used here ``w = (u + i) / (1 + i u)`` carries
    the half-plane action at ``u`` to the disk action at ``w``; it maps the
    lower half-plane onto the disk, so ``u = conj(z)`` for ``Im z > 0``.
    """
    u = np.conj(_upper(z))
    return complex((u + 1j) / (1 + 1j * u))


GENERATORS = dict(zip("IJK", torsion_generators()))


def parse_word(word):
    """Generator symbols as integer matrices.

    ``word`` is a list or a comma-separated string of ``I``, ``J``, ``K``
    and their inverses, written ``I^-1``, ``I-`` or lowercase ``i``.
    """
    if isinstance(word, str):
        word = [w for w in word.split(",") if w.strip()]
    out = []
    for token in word:
        t = str(token).strip()
        inverse = t.endswith("^-1") or t.endswith("-")
        base = t[:-3] if t.endswith("^-1") else t.rstrip("-")
        if len(base) == 1 and base.islower():
            base, inverse = base.upper(), not inverse
        if base not in GENERATORS:
            raise InvalidInput(f"unknown generator {token!r}")
        g = GENERATORS[base]
        if inverse:
            g = np.array([[g[1, 1], -g[0, 1]], [-g[1, 0], g[0, 0]]], dtype=np.int64)
        out.append(g)
    return out


def word_matrix(word):
    """Exact integer product of the word, composed left to right."""
    prod = np.eye(2, dtype=object)
    for g in parse_word(word):
        prod = prod.dot(np.asarray(g, dtype=object))
    return prod


def is_relation(word):
    return bool(np.all(word_matrix(word) == np.eye(2, dtype=object)))


@dataclass(frozen=True)
class MobiusScalarPair:
    """A group element, its tracked point and the accumulated ``log j``.

    ``log_j`` holds ``sum log|j| + i sum arg j`` with each argument on the
    branch continuous in ``z``; the scalar is ``exp(-alpha log_j)``.
    """

    g: np.ndarray
    z: complex
    log_j: complex = 0j

    @classmethod
    def start(cls, z):
        return cls(np.eye(2, dtype=np.int64), _upper(z))

    def then(self, h):
        h = np.asarray(h)
        w = _j_halfplane(_real_sl2(h), self.z)
        if w.imag == 0 and w.real < 0:
            raise BranchAmbiguity("generator with c = 0 and a < 0")
        step = complex(math.log(abs(w)), math.atan2(w.imag, w.real))
        return MobiusScalarPair(self.g.dot(h), mobius_halfplane(h, self.z), self.log_j + step)

    def scalar(self, alpha):
        return cmath.exp(-float(alpha) * self.log_j)


def track_word(word, z0):
    pair = MobiusScalarPair.start(z0)
    for g in parse_word(word):
        pair = pair.then(g)
    return pair


def _base_point(word):
    syms = {str(t).strip() for t in (word.split(",") if isinstance(word, str) else word)}
    syms.discard("")
    if syms == {"I"}:
        return 1j
    if syms == {"J"}:
        return OMEGA
    return BASE_POINT


def relator_winding(word):
    """Integer ``k`` with ``sum arg j = 2 pi k`` around a relation word."""
    if not is_relation(word):
        raise InvalidInput("word is not a relation in SL(2, Z)")
    log_j = track_word(word, _base_point(word)).log_j
    k = round(log_j.imag / (2 * math.pi))
    if abs(log_j.imag - 2 * math.pi * k) > 1e-9 or abs(log_j.real) > 1e-9:
        raise NumericalFailure(f"relator period {log_j} is not in 2 pi i Z")
    return k


def holonomy(word, alpha, base_point=None):
    """Scalar accumulated by a relation word, normalized by theta = 1.

    Starts at i for powers of I, at exp(2 pi i / 3) for powers of J and at
    2i otherwise; the result is checked against a second base point.
    """
    alpha = float(alpha)
    if not math.isfinite(alpha):
        raise InvalidInput("alpha must be finite")
    if not is_relation(word):
        raise InvalidInput("word is not a relation in SL(2, Z)")
    z0 = _base_point(word) if base_point is None else base_point
    value = track_word(word, z0).scalar(alpha)
    other = track_word(word, SECOND_BASE_POINT).scalar(alpha)
    if abs(value - other) > PERIOD_TOL:
        raise NumericalFailure(f"holonomy depends on the base point: {value} vs {other}")
    return value


@dataclass(frozen=True)
class ObstructionReport:
    alpha: float
    holonomy_I4: complex
    holonomy_J3: complex
    expected: complex
    deviation: float
    nontrivial: bool

    def to_dict(self):
        pack = lambda w: [w.real, w.imag]
        return {"alpha": self.alpha, "holonomy_I4": pack(self.holonomy_I4),
                "holonomy_J3": pack(self.holonomy_J3), "expected": pack(self.expected),
                "deviation": self.deviation, "nontrivial": self.nontrivial}


def obstruction_witness(alpha):
    """Holonomies of I^4 and J^3; a value away from 1 rules out a linearization."""
    alpha = float(alpha)
    h_i = holonomy(["I"] * 4, alpha)
    h_j = holonomy(["J"] * 3, alpha)
    dev = abs(h_i - 1)
    return ObstructionReport(alpha, h_i, h_j, cmath.exp(-2j * math.pi * alpha), dev,
                             dev > WITNESS_TOL)

