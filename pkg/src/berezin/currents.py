"""Integral cocycle on groups of symplectomorphisms and its flat trivializer.

A symplectomorphism q acts on a domain (a torus with unit volume, or a planar
disk).  The cocycle is

    C(q1, q2) = integral over the domain of c(q1'(q2(m)), q2'(m)) dm,

discretised by a midpoint rule.  Maps are closed-form objects that evaluate
points and exact Jacobians; nothing is interpolated.
"""

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .cocycle import cocycle_c
from .errors import InvalidInput, NumericalFailure, RefinementRequired, Unsupported
from .matfun import LIFT_JUMP, lift_batch
from .symplectic import TOL_SYMP, is_integer_symplectic, standard_form, symplectic_residuals

CHUNK = 1 << 15


# ---------------------------------------------------------------- domains

@dataclass(frozen=True)
class Torus:
    """The torus R^d / Z^d, represented by the unit cube."""

    dim: int

    def __post_init__(self):
        if self.dim < 2 or self.dim % 2:
            raise InvalidInput("torus dimension must be even and positive")

    @property
    def volume(self):
        return 1.0

    def wrap(self, x):
        return np.mod(x, 1.0)


@dataclass(frozen=True)
class Disk:
    """Planar disk, optionally with circular holes ``((cx, cy), r)``."""

    center: tuple = (0.0, 0.0)
    radius: float = 1.0
    holes: tuple = ()

    dim = 2

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        object.__setattr__(self, "holes", tuple(
            (tuple(float(c) for c in h[0]), float(h[1])) for h in self.holes))
        if self.radius <= 0:
            raise InvalidInput("disk radius must be positive")

    @property
    def volume(self):
        return math.pi * self.radius ** 2

    def wrap(self, x):
        return x

    def inside(self, x, include_holes=True):
        x = np.asarray(x, dtype=float)
        ok = np.hypot(x[..., 0] - self.center[0], x[..., 1] - self.center[1]) <= self.radius
        if not include_holes:
            for c, r in self.holes:
                ok &= np.hypot(x[..., 0] - c[0], x[..., 1] - c[1]) >= r
        return ok


# ---------------------------------------------------------------- quadrature

@dataclass(frozen=True)
class QuadratureGrid:
    """Midpoint rule on a torus (Cartesian) or a disk (polar).

    ``shape`` is the per-axis resolution: ``(N,) * d`` on a torus,
    ``(n_radial, n_angular)`` on a disk.  On a disk, optional radial
    ``breaks`` split [0, radius] into segments that each get ``n_radial``
    midpoint nodes, so thin annuli can be resolved without refining
    everywhere.  Nodes are produced in fixed-size chunks in a fixed order,
    so reductions are deterministic.
    """

    domain: object
    shape: tuple
    breaks: tuple = ()

    def __post_init__(self):
        shape = tuple(int(s) for s in self.shape)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "breaks", tuple(sorted(float(b) for b in self.breaks)))
        if any(s < 1 for s in shape):
            raise InvalidInput("grid resolution must be positive")
        expected = self.domain.dim if isinstance(self.domain, Torus) else 2
        if len(shape) != expected:
            raise InvalidInput(f"grid needs {expected} axes, got {len(shape)}")
        if self.breaks and (isinstance(self.domain, Torus) or self.breaks[0] <= 0
                            or self.breaks[-1] >= self.domain.radius):
            raise InvalidInput("radial breaks must lie strictly inside a disk")

    @property
    def axes_shape(self):
        if isinstance(self.domain, Torus):
            return self.shape
        return (self.shape[0] * (len(self.breaks) + 1), self.shape[1])

    @property
    def size(self):
        return math.prod(self.axes_shape)

    def radial_rule(self):
        """Radial midpoint nodes and widths of a disk grid."""
        edges = np.array([0.0, *self.breaks, self.domain.radius])
        t = (np.arange(self.shape[0]) + 0.5) / self.shape[0]
        width = np.diff(edges)
        r = (edges[:-1, None] + width[:, None] * t).ravel()
        dr = np.repeat(width / self.shape[0], self.shape[0])
        return r, dr

    def chunk(self, start, stop):
        idx = np.unravel_index(np.arange(start, stop), self.axes_shape)
        if isinstance(self.domain, Torus):
            pts = np.stack([(i + 0.5) / n for i, n in zip(idx, self.shape)], axis=-1)
            w = np.full(stop - start, 1.0 / self.size)
            return pts, w
        radii, widths = self.radial_rule()
        da = 2 * math.pi / self.shape[1]
        r = radii[idx[0]]
        a = (idx[1] + 0.5) * da
        cx, cy = self.domain.center
        pts = np.stack([cx + r * np.cos(a), cy + r * np.sin(a)], axis=-1)
        return pts, r * widths[idx[0]] * da

    def chunks(self, size=CHUNK):
        for start in range(0, self.size, size):
            yield self.chunk(start, min(start + size, self.size))

    @property
    def nodes(self):
        return self.chunk(0, self.size)[0]

    @property
    def weights(self):
        return self.chunk(0, self.size)[1]

    def scaled(self, factor):
        return QuadratureGrid(self.domain, tuple(max(1, int(round(s * factor)))
                                                 for s in self.shape), self.breaks)

    def describe(self):
        kind = "torus" if isinstance(self.domain, Torus) else "disk"
        out = {"domain": kind, "shape": list(self.shape), "nodes": self.size}
        if self.breaks:
            out["breaks"] = list(self.breaks)
        return out


def torus_grid(dim, resolution):
    return QuadratureGrid(Torus(dim), (resolution,) * dim)


def disk_grid(radius=1.0, n_radial=256, n_angular=256, center=(0.0, 0.0), holes=(),
              breaks=()):
    return QuadratureGrid(Disk(center, radius, holes), (n_radial, n_angular), breaks)


def integrate(fn, grid):
    """Midpoint sum of a vectorised integrand, chunk by chunk in fixed order."""
    total = 0.0
    for pts, w in grid.chunks():
        total += float(np.dot(w, fn(pts)))
    return total


def integrate_with_error(fn, grid):
    """Value on ``grid`` and an error estimate ``|Q(grid) - Q(grid / 2)|``.

    A rounding floor ``eps * sqrt(nodes) * sum(w |f|)`` is added so that the
    estimate never vanishes for integrands the rule resolves exactly.
    """
    total, mass = 0.0, 0.0
    for pts, w in grid.chunks():
        vals = fn(pts)
        total += float(np.dot(w, vals))
        mass += float(np.dot(w, np.abs(vals)))
    coarse = integrate(fn, grid.scaled(0.5))
    floor = np.finfo(float).eps * math.sqrt(grid.size) * max(mass, 1.0)
    return total, abs(total - coarse) + floor


# ---------------------------------------------------------------- maps

class Symplectomorphism:
    """A closed-form symplectic map with exact Jacobians.

    Subclasses implement ``_map`` and ``_jacobian`` on arrays of points of
    shape (N, d).  ``at(s)`` returns the member ``q_s`` of the canonical
    isotopy (``q_0 = id``, ``q_1 = self``) when one is available.
    """

    has_isotopy = False
    feature_scale = math.inf
    # disk (center, radius) outside which the map is the identity, if known
    support = None

    def __init__(self, domain):
        self.domain = domain

    @property
    def dim(self):
        return self.domain.dim

    def _points(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise InvalidInput(f"points must have {self.dim} coordinates")
        return np.atleast_2d(x)

    def __call__(self, x):
        return self.domain.wrap(self._map(self._points(x)))

    def jacobian(self, x):
        return self._jacobian(self._points(x))

    def at(self, s):
        raise Unsupported(f"{type(self).__name__} carries no isotopy")

    def inverse(self):
        raise Unsupported(f"{type(self).__name__} has no closed-form inverse")

    def __matmul__(self, other):
        return Composition(self, other)

    def moved(self, x, tol=1e-12):
        """Mask of points with ``q(x) != x`` (compared on the torus if periodic)."""
        x = self._points(x)
        d = self(x) - x
        if isinstance(self.domain, Torus):
            d = d - np.round(d)
        return np.max(np.abs(d), axis=-1) > tol

    def check_jacobians(self, x):
        jac = self.jacobian(x)
        res = symplectic_residuals(jac)
        scale = 1.0 + np.linalg.norm(jac, 2, axis=(-2, -1)) ** 2
        bad = np.flatnonzero(res > TOL_SYMP * scale)
        if bad.size:
            i = bad[0]
            raise NumericalFailure(
                f"Jacobian not symplectic at node {np.asarray(x)[i].tolist()}: "
                f"residual {res[i]:.3g}")
        return jac


class Identity(Symplectomorphism):
    has_isotopy = True

    def __init__(self, domain):
        super().__init__(domain)
        if isinstance(domain, Disk):
            self.support = (domain.center, 0.0)

    def _map(self, x):
        return x.copy()

    def _jacobian(self, x):
        return np.broadcast_to(np.eye(self.dim), x.shape[:-1] + (self.dim, self.dim)).copy()

    def at(self, s):
        return self

    def inverse(self):
        return self


class Composition(Symplectomorphism):
    """``outer o inner``.

    Its isotopy runs the inner isotopy on s in [0, 1/2] and then the outer
    one, composed with the finished inner map, on [1/2, 1].
    """

    def __init__(self, outer, inner):
        if outer.domain != inner.domain:
            raise InvalidInput("cannot compose maps on different domains")
        super().__init__(inner.domain)
        self.outer, self.inner = outer, inner
        self.has_isotopy = outer.has_isotopy and inner.has_isotopy
        self.feature_scale = min(outer.feature_scale, inner.feature_scale)
        self.support = enclosing_disk(outer.support, inner.support)

    def _map(self, x):
        return self.outer(self.inner(x))

    def _jacobian(self, x):
        return self.outer.jacobian(self.inner(x)) @ self.inner.jacobian(x)

    def at(self, s):
        if not self.has_isotopy:
            raise Unsupported("a factor of the composition carries no isotopy")
        if s <= 0.5:
            return self.inner.at(2 * s)
        return Composition(self.outer.at(2 * s - 1), self.inner)

    def inverse(self):
        return Composition(self.inner.inverse(), self.outer.inverse())


def enclosing_disk(a, b):
    """Smallest disk containing two support disks; ``None`` if either is unknown."""
    if a is None or b is None:
        return None
    (ca, ra), (cb, rb) = a, b
    if ra == 0:
        return b
    if rb == 0:
        return a
    ca, cb = np.asarray(ca, dtype=float), np.asarray(cb, dtype=float)
    d = float(np.hypot(*(cb - ca)))
    if d + rb <= ra:
        return a
    if d + ra <= rb:
        return b
    r = (d + ra + rb) / 2
    c = ca + (cb - ca) * ((r - ra) / d)
    return (tuple(c), r)


class LinearTorusMap(Symplectomorphism):
    """``m -> A m mod 1`` for A in Sp(2n, Z); the Jacobian is A everywhere."""

    def __init__(self, a):
        a = np.asarray(a)
        if not is_integer_symplectic(a):
            raise InvalidInput("linear torus maps need an integer symplectic matrix")
        super().__init__(Torus(a.shape[0]))
        self.matrix = a.astype(np.int64)

    def _map(self, x):
        return x @ self.matrix.T

    def _jacobian(self, x):
        return np.broadcast_to(self.matrix.astype(float),
                               x.shape[:-1] + self.matrix.shape).copy()

    def inverse(self):
        k = standard_form(self.dim).astype(np.int64)
        return LinearTorusMap(-k @ self.matrix.T @ k)


def linear_torus_map(a):
    return LinearTorusMap(a)


@dataclass(frozen=True)
class Profile:
    """A 1-periodic function with its derivative, both vectorised."""

    f: Callable
    df: Callable
    label: str = field(default="profile", compare=False)

    def scaled(self, s):
        return Profile(lambda t: s * self.f(t), lambda t: s * self.df(t), f"{s}*{self.label}")


def sine_profile(amplitude, frequency=1):
    """``amplitude * sin(2 pi k t)``, integer frequency k."""
    k = int(frequency)
    w = 2 * math.pi * k
    return Profile(lambda t: amplitude * np.sin(w * t),
                   lambda t: amplitude * w * np.cos(w * t),
                   f"{amplitude}*sin(2pi*{k}t)")


def trig_profile(terms):
    """Sum of ``a cos(2 pi k t) + b sin(2 pi k t)`` over ``(k, a, b)`` triples."""
    terms = [(int(k), float(a), float(b)) for k, a, b in terms]

    def f(t):
        return sum(a * np.cos(2 * math.pi * k * t) + b * np.sin(2 * math.pi * k * t)
                   for k, a, b in terms)

    def df(t):
        return sum(2 * math.pi * k * (b * np.cos(2 * math.pi * k * t)
                                      - a * np.sin(2 * math.pi * k * t)) for k, a, b in terms)

    return Profile(f, df, f"trig{terms}")


class ShearMap(Symplectomorphism):
    """``x_i -> x_i + f(x_j) mod 1`` for a conjugate coordinate pair (i, j)."""

    has_isotopy = True

    def __init__(self, dim, axes, profile):
        super().__init__(Torus(dim))
        i, j = (int(a) for a in axes)
        n = dim // 2
        if not (0 <= i < dim and 0 <= j < dim) or abs(i - j) != n:
            raise InvalidInput(f"axes {axes} are not a conjugate pair in dimension {dim}")
        self.axes = (i, j)
        self.profile = profile

    def _map(self, x):
        i, j = self.axes
        y = x.copy()
        y[:, i] = x[:, i] + self.profile.f(x[:, j])
        return y

    def _jacobian(self, x):
        i, j = self.axes
        jac = np.broadcast_to(np.eye(self.dim), x.shape[:-1] + (self.dim, self.dim)).copy()
        jac[:, i, j] = self.profile.df(x[:, j])
        return jac

    def at(self, s):
        return ShearMap(self.dim, self.axes, self.profile.scaled(s))

    def inverse(self):
        return ShearMap(self.dim, self.axes, self.profile.scaled(-1.0))


def shear_map(dim, axes, profile):
    return ShearMap(dim, axes, profile)


# ---------------------------------------------------------------- cocycle C

def cocycle_density(q1, q2, points, check=True):
    """``c(q1'(q2(m)), q2'(m))`` at each point."""
    if check:
        j2 = q2.check_jacobians(points)
        j1 = q1.check_jacobians(q2(points))
    else:
        j2 = q2.jacobian(points)
        j1 = q1.jacobian(q2(points))
    return cocycle_c(j1, j2, check=False)


def big_cocycle_C(q1, q2, grid, check=True):
    """Midpoint approximation of ``C(q1, q2)``."""
    _same_domain(grid, q1, q2)
    return integrate(lambda x: cocycle_density(q1, q2, x, check), grid)


def big_cocycle_C_with_error(q1, q2, grid, check=True):
    _same_domain(grid, q1, q2)
    return integrate_with_error(lambda x: cocycle_density(q1, q2, x, check), grid)


def _same_domain(grid, *maps):
    for q in maps:
        if q.domain != grid.domain and not _disk_match(q.domain, grid.domain):
            raise InvalidInput("map and grid live on different domains")


def _disk_match(a, b):
    # holes only matter to flux; a disk map integrates over the filled disk
    return (isinstance(a, Disk) and isinstance(b, Disk)
            and a.center == b.center and a.radius == b.radius)


# ---------------------------------------------------------------- trivializer

def det_phi_of(jac):
    """``det Phi`` for a batch of Jacobians, fast path in dimension 2."""
    if jac.shape[-1] == 2:
        return 0.5 * ((jac[..., 0, 0] + jac[..., 1, 1]) + 1j * (jac[..., 0, 1] - jac[..., 1, 0]))
    n = jac.shape[-1] // 2
    a, b = jac[..., :n, :n], jac[..., :n, n:]
    c, d = jac[..., n:, :n], jac[..., n:, n:]
    return np.linalg.det(0.5 * ((a + d) + 1j * (b - c)))


def nu_tilde(q, points, steps=32, max_steps=1 << 14):
    """Lift of ``arg det Phi(q_s'(m))`` along the isotopy, starting from 0.

    The isotopy is sampled at ``steps + 1`` equally spaced values of s; the
    count doubles until every step turns det Phi by less than pi/2.
    """
    if not q.has_isotopy:
        raise Unsupported(f"{type(q).__name__} carries no isotopy")
    points = q._points(points)
    while steps <= max_steps:
        samples = np.empty((points.shape[0], steps + 1), dtype=complex)
        for k, s in enumerate(np.linspace(0.0, 1.0, steps + 1)):
            samples[:, k] = det_phi_of(q.at(s).jacobian(points))
        values, jump = lift_batch(samples, start=np.zeros(points.shape[0]))
        if jump < LIFT_JUMP:
            return values
        steps *= 2
    raise RefinementRequired(f"isotopy needs more than {max_steps} steps")


def gamma_circ(q, grid, steps=32):
    """Flat trivializer: integral of :func:`nu_tilde` over the grid."""
    _same_domain(grid, q)
    return integrate(lambda x: nu_tilde(q, x, steps), grid)


def gamma_circ_with_error(q, grid, steps=32):
    _same_domain(grid, q)
    return integrate_with_error(lambda x: nu_tilde(q, x, steps), grid)


# ---------------------------------------------------------------- currents

@dataclass(frozen=True)
class CurrentElement:
    """A pair ``{p, h}``: a measure-preserving point map and an Sp-valued function.

    Both are callables on arrays of points, so ``h`` can be evaluated at the
    images ``p(x)`` of grid nodes without interpolation.
    """

    p: Callable
    h: Callable
    grid: QuadratureGrid

    def sample(self):
        """``h`` at the grid nodes, checked to be symplectic."""
        x = self.grid.nodes
        hx = self.h(x)
        res = symplectic_residuals(hx)
        scale = 1.0 + np.linalg.norm(hx, 2, axis=(-2, -1)) ** 2
        if np.any(res > TOL_SYMP * scale):
            raise NumericalFailure("h is not symplectic at every node")
        return hx


def embed(q, grid):
    """The element ``{q, q'}`` attached to a symplectomorphism."""
    return CurrentElement(q, q.jacobian, grid)


def constant_current(p, g, grid):
    g = np.asarray(g, dtype=float)
    return CurrentElement(p, lambda x: np.broadcast_to(g, (len(x),) + g.shape).copy(), grid)


def pair_mul(e1, e2):
    """``{p1, h1} * {p2, h2} = {p1 o p2, (h1 o p2) h2}``."""
    if e1.grid != e2.grid:
        raise InvalidInput("current elements live on different grids")
    p1, h1, p2, h2 = e1.p, e1.h, e2.p, e2.h
    return CurrentElement(lambda x: p1(p2(x)), lambda x: h1(p2(x)) @ h2(x), e1.grid)


def current_cocycle(e1, e2):
    """``integral of c(h1(p2(x)), h2(x)) dmu(x)`` over the shared grid."""
    if e1.grid != e2.grid:
        raise InvalidInput("current elements live on different grids")
    return integrate(lambda x: cocycle_c(e1.h(e2.p(x)), e2.h(x), check=False), e1.grid)
