"""Area-preserving maps of planar disks: twists, turning angles, flux and Calabi.

The basic object is a differential rotation about a center c,

    x -> c + R(theta(|x - c|)) (x - c),

which is symplectic for every radial profile theta.  An epsilon-twist uses a
profile that climbs through a full turn across a thin annulus; a radial shear
uses a compact bump.  The canonical isotopy scales theta by s, and the twist
profile is shifted by -2 pi so that the isotopy is the identity near the
outer boundary of the disk.
"""

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .cocycle import cocycle_c
from .currents import (
    Composition,
    Disk,
    QuadratureGrid,
    Symplectomorphism,
    det_phi_of,
    disk_grid,
    gamma_circ,
    integrate,
)
from .errors import DomainError, InvalidInput, RefinementRequired
from .matfun import LIFT_JUMP, lift_batch

TWO_PI = 2 * math.pi
K2 = np.array([[0.0, -1.0], [1.0, 0.0]])
BOUNDARY_TOL = 1e-9


# ---------------------------------------------------------------- profiles

def _sigma(x):
    pos = x > 0
    return np.where(pos, np.exp(-1.0 / np.where(pos, x, 1.0)), 0.0)


def _dsigma(x):
    pos = x > 0
    safe = np.where(pos, x, 1.0)
    return np.where(pos, np.exp(-1.0 / safe) / safe ** 2, 0.0)


def smooth_step(x):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1."""
    x = np.asarray(x, dtype=float)
    a, b = _sigma(x), _sigma(1 - x)
    return a / (a + b)


def smooth_step_deriv(x):
    x = np.asarray(x, dtype=float)
    a, b = _sigma(x), _sigma(1 - x)
    da, db = _dsigma(x), _dsigma(1 - x)
    return (da * b + a * db) / (a + b) ** 2


def nu(x):
    """Twist profile: 0 on (-inf, 0], 2 pi on [1/2, inf), smooth and nondecreasing."""
    return TWO_PI * smooth_step(2 * np.asarray(x, dtype=float))


def nu_deriv(x):
    return 2 * TWO_PI * smooth_step_deriv(2 * np.asarray(x, dtype=float))


def bump(t):
    """``exp(1 - 1/(1 - t^2))`` on |t| < 1, zero outside; bump(0) = 1."""
    t = np.asarray(t, dtype=float)
    inside = np.abs(t) < 1
    u = np.where(inside, 1 - t * t, 1.0)
    return np.where(inside, np.exp(1 - 1 / u), 0.0)


def bump_deriv(t):
    t = np.asarray(t, dtype=float)
    inside = np.abs(t) < 1
    u = np.where(inside, 1 - t * t, 1.0)
    return np.where(inside, np.exp(1 - 1 / u) * (-2 * t / u ** 2), 0.0)


# ---------------------------------------------------------------- maps

class DifferentialRotation(Symplectomorphism):
    """``x -> c + R(s theta(rho)) (x - c)`` with ``rho = |x - c|``.

    The Jacobian is ``R(theta) (1 + theta'(rho) rho K u u^T)`` with ``u`` the
    unit radial vector, so its determinant is 1 for any profile.  Angles are
    reduced mod 2 pi before taking cos and sin, which keeps full turns exact.
    """

    has_isotopy = True

    def __init__(self, domain, center, theta, dtheta, support_radius,
                 feature_scale, scale=1.0, label="rotation"):
        super().__init__(domain)
        self.center = np.asarray(center, dtype=float)
        self.theta, self.dtheta = theta, dtheta
        self.scale = float(scale)
        self.support = (tuple(self.center), float(support_radius))
        self.feature_scale = float(feature_scale)
        self.label = label

    def _check(self, x):
        d = np.hypot(x[:, 0] - self.domain.center[0], x[:, 1] - self.domain.center[1])
        if np.any(d > self.domain.radius * (1 + 1e-12)):
            raise DomainError(f"{self.label}: point outside the disk of radius "
                              f"{self.domain.radius}")

    def _polar(self, x):
        self._check(x)
        u = x - self.center
        rho = np.hypot(u[:, 0], u[:, 1])
        return u, rho

    def _angle(self, rho):
        return np.remainder(self.scale * self.theta(rho), TWO_PI)

    def _map(self, x):
        u, rho = self._polar(x)
        a = self._angle(rho)
        cos, sin = np.cos(a), np.sin(a)
        out = self.center + np.stack([cos * u[:, 0] - sin * u[:, 1],
                                      sin * u[:, 0] + cos * u[:, 1]], axis=-1)
        # points that do not turn are returned untouched, not re-centred
        return np.where((a == 0)[:, None], x, out)

    def _jacobian(self, x):
        u, rho = self._polar(x)
        a = self._angle(rho)
        cos, sin = np.cos(a), np.sin(a)
        rot = np.empty((len(x), 2, 2))
        rot[:, 0, 0], rot[:, 0, 1], rot[:, 1, 0], rot[:, 1, 1] = cos, -sin, sin, cos
        safe = np.where(rho > 0, rho, 1.0)
        unit = np.where(rho[:, None] > 0, u / safe[:, None], 0.0)
        k = self.scale * self.dtheta(rho) * rho
        shear = np.eye(2) + k[:, None, None] * (K2 @ (unit[:, :, None] * unit[:, None, :]))
        return rot @ shear

    def at(self, s):
        return DifferentialRotation(self.domain, self.center, self.theta, self.dtheta,
                                    self.support[1], self.feature_scale,
                                    self.scale * s, self.label)

    def inverse(self):
        return self.at(-1.0)


@dataclass(frozen=True)
class TwistSpec:
    """An epsilon-twist about the circle of radius ``radius`` around ``center``.

    The support is the annulus ``radius < rho < radius (1 + eps/2)``; the map
    is defined on the ring ``radius/2 < rho < 3 radius/2`` and extended by
    the identity.  ``domain`` is the ambient disk (with its holes).
    """

    center: tuple = (0.0, 0.0)
    radius: float = 0.6
    epsilon: float = 0.1
    orientation: str = "right"
    domain: Disk = field(default_factory=Disk)

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if not 0 < self.epsilon < 0.5:
            raise InvalidInput("epsilon must lie in (0, 1/2)")
        if self.radius <= 0:
            raise InvalidInput("twist radius must be positive")
        if self.orientation not in ("right", "left"):
            raise InvalidInput("orientation must be 'right' or 'left'")
        reach = math.hypot(self.center[0] - self.domain.center[0],
                           self.center[1] - self.domain.center[1]) + self.outer
        if reach >= self.domain.radius:
            raise InvalidInput("twist support must lie inside the disk")

    @property
    def outer(self):
        return self.radius * (1 + self.epsilon / 2)

    @property
    def enclosed_area(self):
        return math.pi * self.radius ** 2

    def with_epsilon(self, eps):
        return TwistSpec(self.center, self.radius, eps, self.orientation, self.domain)

    def with_radius(self, radius):
        return TwistSpec(self.center, radius, self.epsilon, self.orientation, self.domain)


def epsilon_twist(spec):
    """The twist as a :class:`DifferentialRotation`.

    As a map it rotates by ``nu((rho/R - 1)/eps)``.  The profile used is
    ``nu - 2 pi`` (right) or ``2 pi - nu`` (left): the same map, but its
    s-scaled isotopy fixes the exterior and turns the interior disk.
    """
    big_r, eps = spec.radius, spec.epsilon
    sign = 1.0 if spec.orientation == "right" else -1.0

    def theta(rho):
        return sign * (nu((rho / big_r - 1) / eps) - TWO_PI)

    def dtheta(rho):
        return sign * nu_deriv((rho / big_r - 1) / eps) / (eps * big_r)

    return DifferentialRotation(spec.domain, spec.center, theta, dtheta, spec.outer,
                                eps * big_r / 2, label=f"{spec.orientation}-twist")


def radial_shear(domain, center, radius, amplitude):
    """Compactly supported differential rotation ``theta = amplitude * bump(rho/radius)``."""

    def theta(rho):
        return amplitude * bump(rho / radius)

    def dtheta(rho):
        return amplitude * bump_deriv(rho / radius) / radius

    return DifferentialRotation(domain, center, theta, dtheta, radius, radius / 4,
                                label="radial-shear")


def twist_grid(spec, n_radial=64, n_angular=64):
    """Polar grid on the ambient disk, with the twist annulus as its own radial segment."""
    dom = spec.domain
    if spec.center == dom.center:
        return disk_grid(dom.radius, n_radial, n_angular, dom.center, dom.holes,
                         breaks=(spec.radius, spec.outer))
    return disk_grid(dom.radius, 8 * n_radial, n_angular, dom.center, dom.holes)


def move_area(q, grid, tol=1e-12):
    """Grid estimate of the area of ``Move(q) = {m : q(m) != m}``."""
    return integrate(lambda x: q.moved(x, tol).astype(float), grid)


# ---------------------------------------------------------------- turning angle

def _as_complex(v):
    return v[..., 0] + 1j * v[..., 1]


def _exit_distance(x, v, support):
    """Distance back along -v from x to the boundary of the support disk (0 outside)."""
    center, radius = support
    radius = radius * (1 + 1e-9) + 1e-12
    d = x - np.asarray(center)
    dv = np.einsum("ij,ij->i", d, v)
    disc = dv ** 2 - np.einsum("ij,ij->i", d, d) + radius ** 2
    inside = np.einsum("ij,ij->i", d, d) < radius ** 2
    return np.where(inside, dv + np.sqrt(np.maximum(disc, 0.0)), 0.0)


def _track_values(q, x, v, length, t):
    """Tracked vector (relative to v) and det Phi at curve parameters t in [-1, 0]."""
    pts = x + (length * t)[:, None] * v
    jac = q.jacobian(pts)
    w = _as_complex(np.einsum("nij,nj->ni", jac, v)) / _as_complex(v)
    return w, det_phi_of(jac)


def _increments(wl, wr, pl, pr):
    return np.angle(wr / wl), np.angle(pr / pl)


def tracking_lifts(q, x, v, step=None, max_depth=40, chunk=512):
    """Turning angle and lifted ``arg det Phi`` along straight tracking curves.

    For each (x, v) the curve is the segment ending at x with constant
    velocity v, started where it enters the support disk of q (there q is the
    identity, so both lifts start at 0).  The tangent of the curve does not
    turn, so the turning angle is the lifted angle of ``q'(l(t)) v``.

    Samples start at spacing ``step`` (default: a sixteenth of the map's
    feature scale); any interval where either argument turns by pi/2 or more
    is bisected until it does not.  Returns ``(ang, phi_lift)``.

    A composition is tracked factor by factor:
    ``Ang(q1 q2, x, v) = Ang(q2, x, v) + Ang(q1, q2(x), q2'(x) v)`` and the
    phase lift picks up ``c(q1'(q2 x), q2'(x))``.  Tracking the composite
    directly is unreliable: where two thin strips cross, the Jacobian grows
    to ~1e4 and the tracked vector can turn a full circle between samples.
    """
    if isinstance(q, Composition):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        v = np.broadcast_to(np.atleast_2d(np.asarray(v, dtype=float)), x.shape)
        a2, p2 = tracking_lifts(q.inner, x, v, step, max_depth, chunk)
        y, jin = q.inner(x), q.inner.jacobian(x)
        a1, p1 = tracking_lifts(q.outer, y, np.einsum("nij,nj->ni", jin, v),
                                step, max_depth, chunk)
        return a2 + a1, p2 + p1 + cocycle_c(q.outer.jacobian(y), jin, check=False)
    if q.support is None:
        raise InvalidInput("turning angles need a map with a known support disk")
    x = np.atleast_2d(np.asarray(x, dtype=float))
    v = np.atleast_2d(np.asarray(v, dtype=float))
    v = v / np.linalg.norm(v, axis=-1, keepdims=True)
    x, v = (np.ascontiguousarray(a) for a in np.broadcast_arrays(x, v))
    step = step or q.feature_scale / 16
    ang = np.zeros(len(x))
    phi = np.zeros(len(x))
    for lo in range(0, len(x), chunk):
        sl = slice(lo, lo + chunk)
        xs, vs = x[sl], v[sl]
        length = _exit_distance(xs, vs, q.support)
        m = max(int(math.ceil(float(length.max(initial=0.0)) / step)) + 1, 2) \
            if np.isfinite(step) else 2
        n = len(xs)
        t = np.linspace(-1.0, 0.0, m)
        idx = np.repeat(np.arange(n), m)
        w, p = _track_values(q, xs[idx], vs[idx], length[idx], np.tile(t, n))
        w, p = w.reshape(n, m), p.reshape(n, m)
        dw, dp = _increments(w[:, :-1], w[:, 1:], p[:, :-1], p[:, 1:])
        good = np.maximum(np.abs(dw), np.abs(dp)) < LIFT_JUMP
        a_acc = np.where(good, dw, 0.0).sum(axis=1)
        p_acc = np.where(good, dp, 0.0).sum(axis=1)
        bad_i, bad_k = np.nonzero(~good)
        iv = (bad_i, t[bad_k], t[bad_k + 1], w[bad_i, bad_k], w[bad_i, bad_k + 1],
              p[bad_i, bad_k], p[bad_i, bad_k + 1])
        depth = 0
        while iv[0].size:
            if depth == max_depth:
                raise RefinementRequired("tracking curve does not resolve after "
                                         f"{max_depth} bisections")
            i, tl, tr, wl, wr, pl, pr = iv
            tm = 0.5 * (tl + tr)
            wm, pm = _track_values(q, xs[i], vs[i], length[i], tm)
            halves = [(tl, tm, wl, wm, pl, pm), (tm, tr, wm, wr, pm, pr)]
            nxt = []
            for a0, a1, w0, w1, p0, p1 in halves:
                dw, dp = _increments(w0, w1, p0, p1)
                ok = np.maximum(np.abs(dw), np.abs(dp)) < LIFT_JUMP
                np.add.at(a_acc, i[ok], dw[ok])
                np.add.at(p_acc, i[ok], dp[ok])
                nxt.append(tuple(arr[~ok] for arr in (i, a0, a1, w0, w1, p0, p1)))
            iv = tuple(np.concatenate(pair) for pair in zip(*nxt))
            depth += 1
        ang[sl], phi[sl] = a_acc, p_acc
    return ang, phi


def turning_angle(q, x, v, step=None):
    """Global turning angle ``Ang(q, x, v)`` for one point and direction."""
    ang, _ = tracking_lifts(q, np.asarray(x, dtype=float)[None], np.asarray(v, dtype=float)[None],
                            step)
    return float(ang[0])


def turning_angles(q, x, v, step=None):
    return tracking_lifts(q, x, v, step)[0]


def phi_lift(q, x, step=None):
    """Continuous ``Im ln det Phi(q'(x))``, zero where q is the identity."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    return tracking_lifts(q, x, np.array([[1.0, 0.0]]), step)[1]


def isotopy_turning_angle(q, x, v, steps=64, max_steps=1 << 14):
    """Turning angle lifted along the isotopy ``s -> q_s'(x) v`` instead of a curve."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    v = np.atleast_2d(np.asarray(v, dtype=float))
    v = v / np.linalg.norm(v, axis=-1, keepdims=True)
    x, v = np.broadcast_arrays(x, v)
    while steps <= max_steps:
        w = np.empty((len(x), steps + 1), dtype=complex)
        for k, s in enumerate(np.linspace(0.0, 1.0, steps + 1)):
            w[:, k] = _as_complex(np.einsum("nij,nj->ni", q.at(s).jacobian(x), v))
        vals, jump = lift_batch(w / _as_complex(v)[:, None], start=np.zeros(len(x)))
        if jump < LIFT_JUMP:
            return vals
        steps *= 2
    raise RefinementRequired(f"isotopy needs more than {max_steps} steps")


def pointwise_angle(q, x, v):
    """``ang(q, x, v)`` in (-pi, pi]: the turning of v under the Jacobian, mod 2 pi."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    v = np.atleast_2d(np.asarray(v, dtype=float))
    w = np.einsum("nij,nj->ni", q.jacobian(x), np.broadcast_to(v, x.shape))
    return np.angle(_as_complex(w) / _as_complex(np.broadcast_to(v, x.shape)))


# ---------------------------------------------------------------- curves and flux

def _lambda(p, w):
    """``lambda = (x dy - y dx) / 2`` evaluated at point p on vector w."""
    return 0.5 * (p[..., 0] * w[..., 1] - p[..., 1] * w[..., 0])


@dataclass(frozen=True)
class CurveSample:
    """A piecewise-smooth curve from the outer boundary Z_0 to the hole Z_hole.

    ``pieces`` is a sequence of ``(point, velocity)`` callables, each
    parametrised by t in [0, 1]; consecutive pieces share endpoints.
    """

    pieces: tuple
    hole: int

    def sample(self, n):
        t = np.linspace(0.0, 1.0, n)
        return np.concatenate([pt(t) for pt, _ in self.pieces])


def _segment_piece(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return (lambda t: a + np.asarray(t)[..., None] * (b - a),
            lambda t: np.broadcast_to(b - a, np.shape(t) + (2,)))


def segment_curve(a, b, hole):
    return CurveSample((_segment_piece(a, b),), hole)


def polyline_curve(vertices, hole):
    pts = np.asarray(vertices, dtype=float)
    return CurveSample(tuple(_segment_piece(p, q) for p, q in zip(pts[:-1], pts[1:])), hole)


def arc_curve(center, radius, start_angle, end_angle):
    """A circular arc piece, for building curved cuts."""
    c = np.asarray(center, dtype=float)
    span = end_angle - start_angle

    def point(t):
        a = start_angle + span * np.asarray(t)
        return c + radius * np.stack([np.cos(a), np.sin(a)], axis=-1)

    def velocity(t):
        a = start_angle + span * np.asarray(t)
        return radius * span * np.stack([-np.sin(a), np.cos(a)], axis=-1)

    return (point, velocity)


def radial_curve(domain, hole, angle=math.pi):
    """Straight cut from the outer boundary to hole ``hole``.

    The cut runs along the ray from the disk center through the hole center.
    For a hole at the disk center, rays at ``angle + k pi/8`` are tried
    until one avoids the other holes.
    """
    hc, hr = domain.holes[hole - 1]
    hc, oc = np.asarray(hc), np.asarray(domain.center)
    offset = hc - oc
    if np.hypot(*offset) > 1e-12:
        candidates = [math.atan2(offset[1], offset[0])]
    else:
        candidates = [angle + k * math.pi / 8 for k in range(16)]
    for a in candidates:
        direction = np.array([math.cos(a), math.sin(a)])
        dv = float(offset @ direction)
        t = -dv + math.sqrt(dv * dv - float(offset @ offset) + domain.radius ** 2)
        u = segment_curve(hc + t * direction, hc + hr * direction, hole)
        try:
            _validate_curve(u, domain, 257)
        except InvalidInput:
            continue
        return u
    raise InvalidInput(f"no straight cut reaches hole Z_{hole}")


def _validate_curve(u, domain, samples):
    if not domain.holes or not 1 <= u.hole <= len(domain.holes):
        raise InvalidInput(f"no hole Z_{u.hole} in the domain")
    p = u.sample(samples)
    oc = np.asarray(domain.center)
    r0 = np.hypot(*(p[0] - oc))
    if abs(r0 - domain.radius) > BOUNDARY_TOL:
        raise InvalidInput("curve must start on the outer boundary")
    hc, hr = domain.holes[u.hole - 1]
    if abs(np.hypot(*(p[-1] - np.asarray(hc))) - hr) > BOUNDARY_TOL:
        raise InvalidInput(f"curve must end on the boundary of hole Z_{u.hole}")
    if np.any(np.hypot(p[:, 0] - oc[0], p[:, 1] - oc[1]) > domain.radius + BOUNDARY_TOL):
        raise InvalidInput("curve leaves the disk")
    for c, r in domain.holes:
        if np.any(np.hypot(p[:, 0] - c[0], p[:, 1] - c[1]) < r - BOUNDARY_TOL):
            raise InvalidInput("curve enters a hole")


def flux_tau(q, u, samples=2048, rtol=1e-6, max_samples=1 << 22):
    """``tau_j(q) = int_u lambda - int_{q u} lambda`` by composite trapezoid.

    Sample counts double until successive values differ by less than
    ``rtol * max(|tau|, radius^2)``.
    """
    domain = q.domain
    _validate_curve(u, domain, samples + 1)
    scale = domain.radius ** 2
    n, prev = samples, None
    while n <= max_samples:
        t = np.linspace(0.0, 1.0, n + 1)
        val = 0.0
        for point, velocity in u.pieces:
            p, dp = point(t), velocity(t)
            dimg = np.einsum("nij,nj->ni", q.jacobian(p), dp)
            val += float(np.trapezoid(_lambda(p, dp) - _lambda(q(p), dimg), t))
        if prev is not None and abs(val - prev) <= rtol * max(abs(val), scale):
            return val
        prev, n = val, 2 * n
    raise RefinementRequired(f"flux did not converge within {max_samples} samples")


# ---------------------------------------------------------------- Calabi

def calabi_potential(q, grid, substeps=4):
    """``F`` at the grid nodes, from ``dF = q* lambda - lambda`` and ``F = 0`` on Z_0.

    F is integrated along the radial ray through each node, inward from the
    outer boundary, by cumulative trapezoid with ``substeps`` extra samples
    between consecutive nodes.  Nodes are returned in grid order.
    """
    dom = grid.domain
    if not isinstance(dom, Disk) or not isinstance(q.domain, Disk) or \
            dom.center != q.domain.center or dom.radius != q.domain.radius:
        raise InvalidInput("Calabi potential needs a polar grid on the map's disk")
    radii, _ = grid.radial_rule()
    na = grid.shape[1]
    angles = (np.arange(na) + 0.5) * TWO_PI / na
    # fine radial samples, descending from the boundary
    knots = np.concatenate([[dom.radius], radii[::-1]])
    frac = np.arange(substeps + 1) / (substeps + 1)
    fine = np.concatenate([(knots[:-1, None] + np.diff(knots)[:, None] * frac).ravel(),
                           knots[-1:]])
    node_pos = np.arange(1, len(knots)) * (substeps + 1)
    direction = np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    pts = np.asarray(dom.center) + fine[None, :, None] * direction[:, None, :]
    flat = pts.reshape(-1, 2)
    vel = np.repeat(direction, len(fine), axis=0)
    img = q(flat)
    dimg = np.einsum("nij,nj->ni", q.jacobian(flat), vel)
    g = (_lambda(img, dimg) - _lambda(flat, vel)).reshape(na, len(fine))
    # velocity is d/dr along the ray; the path runs toward smaller r
    f = cumulative_trapezoid(g, fine, axis=1, initial=0.0)
    f_nodes = f[:, node_pos][:, ::-1]          # (angle, radius ascending)
    return f_nodes.T.ravel()                   # grid order: radius major, angle minor


def calabi(q, grid, substeps=4, rtol=1e-6, max_substeps=1 << 12):
    """Calabi invariant ``int F dx dy``, refining the ray integrals until stable."""
    w = grid.weights
    scale = 1e-3 * grid.domain.volume ** 2
    prev = None
    while substeps <= max_substeps:
        val = float(np.dot(w, calabi_potential(q, grid, substeps)))
        if prev is not None and abs(val - prev) <= rtol * max(abs(val), scale):
            return val
        prev, substeps = val, 2 * substeps + 1
    raise RefinementRequired("Calabi ray integrals did not converge")


# ---------------------------------------------------------------- twist sweep

@dataclass
class TwistReport:
    """Per-epsilon values and first-order fits ``value ~ limit + slope * eps``."""

    spec: TwistSpec
    rows: list
    holes: list
    fits: dict

    def columns(self):
        return ["epsilon", "gamma_circ"] + [f"tau_{j}" for j in self.holes] + ["calabi"]

    def table(self):
        return [[r["epsilon"], r["gamma_circ"], *(r["tau"][j] for j in self.holes),
                 r["calabi"]] for r in self.rows]

    def rates(self):
        """Fitted limits per unit enclosed area (per area squared for Calabi)."""
        s = self.spec.enclosed_area
        out = {"gamma_circ": self.fits["gamma_circ"][0] / s,
               "calabi": self.fits["calabi"][0] / s ** 2}
        for j in self.holes:
            out[f"tau_{j}"] = self.fits[f"tau_{j}"][0] / s
        return out


def _fit(eps, values):
    slope, limit = np.polyfit(eps, values, 1)
    return float(limit), float(slope)


def twist_report(spec, eps_list, n_radial=64, n_angular=64, curves=None):
    """Evaluate Gamma-circ, the fluxes and Calabi on twists for each epsilon.

    ``curves`` maps hole index to a :class:`CurveSample`; by default a radial
    cut is used for every hole of the domain.
    """
    eps_list = [float(e) for e in eps_list]
    if any(not 0 < e <= 0.25 for e in eps_list):
        raise InvalidInput("epsilon values must lie in (0, 1/4]")
    holes = list(range(1, len(spec.domain.holes) + 1))
    if curves is None:
        curves = {j: radial_curve(spec.domain, j) for j in holes}
    rows = []
    for eps in eps_list:
        s = spec.with_epsilon(eps)
        q = epsilon_twist(s)
        grid = twist_grid(s, n_radial, n_angular)
        rows.append({
            "epsilon": eps,
            "gamma_circ": gamma_circ(q, grid),
            "tau": {j: flux_tau(q, curves[j]) for j in holes},
            "calabi": calabi(q, grid),
        })
    fits = {}
    if len(rows) >= 2:
        eps = np.array(eps_list)
        fits["gamma_circ"] = _fit(eps, [r["gamma_circ"] for r in rows])
        fits["calabi"] = _fit(eps, [r["calabi"] for r in rows])
        for j in holes:
            fits[f"tau_{j}"] = _fit(eps, [r["tau"][j] for r in rows])
    return TwistReport(spec, rows, holes, fits)


def lantern_combination(sigma_v, sigma_w, gamma_rate, tau_rate, calabi_rate,
                        a=(0.0, 0.0, 0.0), b=0.0, h=0.0):
    """Limit of ``-H + Gamma(p) + sum a_j tau_j(p) + b kappa(p)`` for the lantern word.

    ``p = T_V0 T_V1 T_V2 T_V3 T_W1^-1 T_W2^-1 T_W3^-1`` with enclosed areas
    ``sigma_v = (V0..V3)`` and ``sigma_w = (W1..W3)``.  The per-twist limits are
    ``gamma_rate * area``, ``tau_rate * area`` on each enclosed hole and
    ``calabi_rate * area^2``, as measured by :func:`twist_report`.  Hole j
    lies inside V0, Vj and W_j, W_{j+1} (indices mod 3), which gives the flux
    of p on it.
    """
    v = np.asarray(sigma_v, dtype=float)
    w = np.asarray(sigma_w, dtype=float)
    if v.shape != (4,) or w.shape != (3,):
        raise InvalidInput("need four V areas and three W areas")
    gamma = gamma_rate * (v.sum() - w.sum())
    taus = [tau_rate * (v[0] + v[j] - w[j - 1] - w[j % 3]) for j in (1, 2, 3)]
    kappa = calabi_rate * ((v ** 2).sum() - (w ** 2).sum())
    return -h + gamma + float(np.dot(a, taus)) + b * kappa
