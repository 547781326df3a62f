"""Randomised property checks behind ``berezin verify``.

Each suite draws its data from one ``numpy.random.Generator`` and returns a
:class:`SuiteResult` with pass/fail counts and the worst residual seen,
measured against the suite's threshold.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .cocycle import (
    CoverElement,
    berezin_sigma,
    class_residual,
    cocycle_c,
    cover_mul,
    loop_lift,
    tr_log_pair,
    trivializer_gamma,
)
from .currents import (
    Disk,
    big_cocycle_C,
    big_cocycle_C_with_error,
    gamma_circ_with_error,
    linear_torus_map,
    shear_map,
    torus_grid,
    trig_profile,
)
from .errors import InvalidInput
from .lattice import holonomy, obstruction_witness
from .symplectic import random_integer_symplectic, random_symplectic
from .surface import (
    TwistSpec,
    epsilon_twist,
    flux_tau,
    phi_lift,
    polyline_curve,
    radial_curve,
    turning_angles,
    twist_grid,
)

DEFAULT_TOLERANCES = {
    "cocycle-identity": 1e-9,
    "bound": 1.0,
    "integer-class": 1e-8,
    "sigma": 1e-9,
    "cover": 1e-9,
    "current": 3.0,
    "surface": math.pi / 2,
    "obstruction": 1e-9,
}


@dataclass
class SuiteResult:
    name: str
    passed: int = 0
    failed: int = 0
    worst: float = 0.0
    threshold: float = 0.0

    def record(self, residual, ok=None):
        residual = float(residual)
        ok = residual < self.threshold if ok is None else ok
        self.worst = max(self.worst, residual)
        if ok:
            self.passed += 1
        else:
            self.failed += 1

    @property
    def ok(self):
        return self.failed == 0 and self.passed > 0

    def to_dict(self):
        return {"passed": self.passed, "failed": self.failed, "worst_residual": self.worst,
                "threshold": self.threshold, "ok": self.ok}


def _triple(rng, n, spread):
    return [random_symplectic(n, rng, spread) for _ in range(3)]


def suite_cocycle_identity(rng, trials, tol, **_):
    out = SuiteResult("cocycle-identity", threshold=tol)
    for n in (1, 2, 3):
        for _ in range(trials):
            g1, g2, g3 = _triple(rng, n, 1.5)
            out.record(abs(cocycle_c(g1, g2) + cocycle_c(g1 @ g2, g3)
                           - cocycle_c(g1, g2 @ g3) - cocycle_c(g2, g3)))
    return out


def suite_bound(rng, trials, tol, **_):
    # residual is |c| / (n pi / 2); strict inequality
    out = SuiteResult("bound", threshold=tol)
    for n in (1, 2, 3):
        for spread in (1.5, 2.0):
            for _ in range(trials):
                g1, g2, _ = _triple(rng, n, spread)
                out.record(abs(cocycle_c(g1, g2)) / (n * math.pi / 2))
    return out


def suite_integer_class(rng, trials, tol, **_):
    out = SuiteResult("integer-class", threshold=tol)
    for n in (1, 2, 3):
        for _ in range(trials):
            g1, g2, _ = _triple(rng, n, 1.5)
            x = class_residual(g1, g2)
            out.record(abs(x - round(x)))
    return out


def suite_sigma(rng, trials, tol, **_):
    out = SuiteResult("sigma", threshold=tol)
    for n in (1, 2, 3):
        for _ in range(trials):
            g1, g2, _ = _triple(rng, n, 1.5)
            s = berezin_sigma(g1, g2)
            c = cocycle_c(g1, g2)
            phase = abs(math.remainder(cmath.phase(s) + c / 2, 2 * math.pi))
            modulus = abs(abs(s) * math.exp(0.5 * tr_log_pair(g1, g2).real) - 1)
            out.record(max(phase, modulus))
    return out


def suite_cover(rng, trials, tol, **_):
    out = SuiteResult("cover", threshold=tol)
    for n in (1, 2, 3):
        for _ in range(trials):
            e1, e2, e3 = (CoverElement(g, trivializer_gamma(g)) for g in _triple(rng, n, 1.5))
            left = cover_mul(cover_mul(e1, e2), e3)
            right = cover_mul(e1, cover_mul(e2, e3))
            out.record(abs(left.x - right.x) + np.max(np.abs(left.g - right.g)))
    deck = loop_lift(2 * math.pi)
    out.record(max(np.max(np.abs(deck.g - np.eye(2))), abs(deck.x - 2 * math.pi)))
    return out


def _random_profile(rng):
    terms = [(k, rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05)) for k in (1, 2, 3)]
    return trig_profile(terms)


def suite_current(rng, trials, tol, **_):
    """Cocycle identity for C on torus shears, relative to the quadrature error.

    The residual is ``|identity| / sum(error estimates)``, so ``tol`` is the
    allowed multiple of the estimate.  Linear maps must reproduce c exactly.
    """
    out = SuiteResult("current", threshold=tol)
    grid = torus_grid(2, 64)
    for _ in range(max(1, trials // 10)):
        sx = shear_map(2, (0, 1), _random_profile(rng))
        sy = shear_map(2, (1, 0), _random_profile(rng))
        sz = shear_map(2, (0, 1), _random_profile(rng))
        terms = [big_cocycle_C_with_error(a, b, grid)
                 for a, b in ((sx, sy), (sx @ sy, sz), (sx, sy @ sz), (sy, sz))]
        res = abs(terms[0][0] + terms[1][0] - terms[2][0] - terms[3][0])
        err = sum(e for _, e in terms)
        out.record(res / err if err > 0 else (0.0 if res == 0 else math.inf))
    small = torus_grid(4, 2)
    for _ in range(max(1, trials // 10)):
        seeds = rng.integers(2 ** 31, size=2)
        a1 = random_integer_symplectic(2, int(seeds[0]))
        a2 = random_integer_symplectic(2, int(seeds[1]))
        res = abs(big_cocycle_C(linear_torus_map(a1), linear_torus_map(a2), small)
                  - cocycle_c(a1, a2))
        out.record(res, ok=res < 1e-12)
    return out


SURFACE_DOMAIN = Disk((0.0, 0.0), 1.0, holes=(((0.0, 0.0), 0.1), ((0.8, 0.0), 0.08)))


def suite_surface(rng, trials, tol, **_):
    """Turning-angle bound against the lifted phase of det Phi, plus flux checks.

    With the pinned block convention the tracked angle follows
    ``-arg det Phi``, so the residual is ``|Ang + lifted Im ln Phi|``.
    Flux independence of the cut and Gamma-circ of a twist are recorded
    against their own tolerances.
    """
    out = SuiteResult("surface", threshold=tol)
    spec = TwistSpec(domain=SURFACE_DOMAIN)
    right = epsilon_twist(spec)
    other = epsilon_twist(TwistSpec((0.2, -0.1), 0.5, 0.1, "left", SURFACE_DOMAIN))
    m = max(10, trials)
    for q in (right, right @ other):
        r = np.sqrt(rng.uniform(0.15 ** 2, 0.9 ** 2, m))
        t = rng.uniform(0, 2 * math.pi, m)
        x = np.column_stack([r * np.cos(t), r * np.sin(t)])
        keep = SURFACE_DOMAIN.inside(x, include_holes=False)
        x = x[keep]
        a = rng.uniform(0, 2 * math.pi, len(x))
        v = np.column_stack([np.cos(a), np.sin(a)])
        ang = turning_angles(q, x, v)
        phase = phi_lift(q, x)
        for d in np.abs(ang + phase):
            out.record(d)
    straight = flux_tau(right, radial_curve(SURFACE_DOMAIN, 1))
    bent = flux_tau(right, polyline_curve([(0, -1), (0.5, -0.3), (0.4, 0.4), (0, 0.5),
                                           (0, 0.1)], 1))
    out.record(0.0, ok=abs(straight - bent) < 1e-5)
    value, err = gamma_circ_with_error(right, twist_grid(spec))
    expected = 2 * math.pi * spec.enclosed_area
    out.record(0.0, ok=abs(value - expected) < 0.05 * expected)
    return out


def suite_obstruction(rng, trials, tol, alpha=0.5, **_):
    """Holonomy witness at ``alpha``; also checks integer alpha is trivial."""
    out = SuiteResult("obstruction", threshold=tol)
    rep = obstruction_witness(alpha)
    target = cmath.exp(-2j * math.pi * alpha)
    out.record(max(abs(rep.holonomy_I4 - target), abs(rep.holonomy_J3 - target)))
    noninteger = float(alpha) != round(float(alpha))
    out.record(0.0, ok=rep.nontrivial == noninteger)
    for k in (1, 2):
        out.record(abs(holonomy("I,I,I,I", k) - 1))
        out.record(abs(holonomy("I,K,I,K,I,K", k) - 1))
    return out


SUITES = {
    "cocycle-identity": suite_cocycle_identity,
    "bound": suite_bound,
    "integer-class": suite_integer_class,
    "sigma": suite_sigma,
    "cover": suite_cover,
    "current": suite_current,
    "surface": suite_surface,
    "obstruction": suite_obstruction,
}


def run_suite(name, seed=0, trials=100, alpha=0.5, tolerances=None):
    """Run one suite (or ``'all'``) and return ``{name: SuiteResult}``."""
    if trials < 1:
        raise InvalidInput("trials must be positive")
    names = list(SUITES) if name == "all" else [name]
    if any(n not in SUITES for n in names):
        raise InvalidInput(f"unknown suite {name!r}; choose from {sorted(SUITES)} or 'all'")
    tols = dict(DEFAULT_TOLERANCES)
    tols.update(tolerances or {})
    results = {}
    for n in names:
        # one child stream per suite keeps 'all' consistent with single runs
        rng = np.random.default_rng([int(seed), list(SUITES).index(n)])
        results[n] = SUITES[n](rng, int(trials), tols[n], alpha=alpha)
    return results
