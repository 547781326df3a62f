"""JSON run configuration for the command-line front end.

Schema (all keys optional unless a command needs them)::

    {
      "seed": 0,
      "domain": {"kind": "torus", "dim": 2}
              | {"kind": "disk", "radius": 1.0, "center": [0, 0],
                 "holes": [{"center": [0, 0], "radius": 0.1}, ...]},
      "resolution": 64 | [n_radial, n_angular],
      "matrices": [g1, g2],
      "maps": [map, map],
      "twist": {"center": [0, 0], "radius": 0.6, "orientation": "right"},
      "epsilons": [0.2, 0.1, 0.05, 0.025],
      "tolerances": {"cocycle-identity": 1e-9, ...}
    }

A map is one of::

    {"kind": "linear", "matrix": [[...], ...]}
    {"kind": "shear", "axes": [i, j], "amplitude": a, "frequency": k}
    {"kind": "shear", "axes": [i, j], "terms": [[k, a, b], ...]}
    {"kind": "twist", "center": [x, y], "radius": R, "epsilon": e,
     "orientation": "right" | "left"}
    {"kind": "radial_shear", "center": [x, y], "radius": r, "amplitude": a}

Matrices are row-major lists of reals.  Resolutions must be powers of two.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .currents import Disk, QuadratureGrid, Torus, linear_torus_map, shear_map, sine_profile, \
    trig_profile
from .errors import InvalidInput
from .surface import TwistSpec, epsilon_twist, radial_shear

DEFAULT_EPSILONS = (0.2, 0.1, 0.05, 0.025)
DEFAULT_DISK = Disk((0.0, 0.0), 1.0, holes=(((0.0, 0.0), 0.1), ((0.8, 0.0), 0.08)))


@dataclass(frozen=True)
class RunConfig:
    command: str = ""
    seed: int = 0
    domain: object = None
    resolution: tuple = ()
    matrices: tuple = ()
    maps: tuple = ()
    twist: dict = field(default_factory=dict)
    epsilons: tuple = DEFAULT_EPSILONS
    tolerances: dict = field(default_factory=dict)
    out: str = None
    breaks: tuple = ()

    @property
    def dimensions(self):
        return None if self.domain is None else self.domain.dim


def _number(v, what):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise InvalidInput(f"{what} must be a finite number, got {v!r}")
    return float(v)


def _point(v, what):
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        raise InvalidInput(f"{what} must be a pair of numbers")
    return tuple(_number(c, what) for c in v)


def _power_of_two(v, what):
    if isinstance(v, bool) or not isinstance(v, int) or v < 1 or v & (v - 1):
        raise InvalidInput(f"{what} must be a power of two, got {v!r}")
    return v


def _matrix(v, what):
    try:
        a = np.array(v, dtype=float)
    except (TypeError, ValueError):
        raise InvalidInput(f"{what} must be a list of rows of numbers") from None
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] % 2 or a.size == 0:
        raise InvalidInput(f"{what} must be a square matrix of even size")
    if not np.all(np.isfinite(a)):
        raise InvalidInput(f"{what} has non-finite entries")
    return a


def parse_domain(d):
    if d is None:
        return None
    if not isinstance(d, dict):
        raise InvalidInput("domain must be an object")
    kind = d.get("kind")
    if kind == "torus":
        dim = d.get("dim", 2)
        if isinstance(dim, bool) or not isinstance(dim, int):
            raise InvalidInput("torus dim must be an integer")
        return Torus(dim)
    if kind == "disk":
        holes = d.get("holes", [])
        if not isinstance(holes, list):
            raise InvalidInput("holes must be a list")
        parsed = []
        for h in holes:
            if not isinstance(h, dict):
                raise InvalidInput("each hole must be an object")
            r = _number(h.get("radius"), "hole radius")
            if r <= 0:
                raise InvalidInput("hole radius must be positive")
            parsed.append((_point(h.get("center", [0, 0]), "hole center"), r))
        return Disk(_point(d.get("center", [0, 0]), "disk center"),
                    _number(d.get("radius", 1.0), "disk radius"), tuple(parsed))
    raise InvalidInput(f"unknown domain kind {kind!r}")


def parse_map(m, domain):
    """Build one map; returns ``(map, radial_breaks)``.

    The breaks are the radii of a twist annulus concentric with the disk,
    so the quadrature resolves it as its own radial segment.
    """
    if not isinstance(m, dict):
        raise InvalidInput("each map must be an object")
    kind = m.get("kind")
    if kind == "linear":
        if not isinstance(domain, Torus):
            raise InvalidInput("linear maps need a torus domain")
        a = _matrix(m.get("matrix"), "linear map matrix")
        if a.shape[0] != domain.dim:
            raise InvalidInput("linear map size does not match the torus dimension")
        return linear_torus_map(a), ()
    if kind == "shear":
        if not isinstance(domain, Torus):
            raise InvalidInput("shear maps need a torus domain")
        axes = m.get("axes")
        if not isinstance(axes, list) or len(axes) != 2 or \
                not all(isinstance(a, int) and not isinstance(a, bool) for a in axes):
            raise InvalidInput("shear axes must be two integers")
        if "terms" in m:
            terms = m["terms"]
            if not isinstance(terms, list) or not all(
                    isinstance(t, list) and len(t) == 3 for t in terms):
                raise InvalidInput("shear terms must be [k, a, b] triples")
            profile = trig_profile([(int(_number(k, "k")), _number(a, "a"), _number(b, "b"))
                                    for k, a, b in terms])
        else:
            freq = m.get("frequency", 1)
            if isinstance(freq, bool) or not isinstance(freq, int):
                raise InvalidInput("shear frequency must be an integer")
            profile = sine_profile(_number(m.get("amplitude", 0.0), "amplitude"), freq)
        return shear_map(domain.dim, axes, profile), ()
    if kind == "twist":
        if not isinstance(domain, Disk):
            raise InvalidInput("twists need a disk domain")
        spec = TwistSpec(_point(m.get("center", [0, 0]), "twist center"),
                         _number(m.get("radius", 0.6), "twist radius"),
                         _number(m.get("epsilon", 0.1), "epsilon"),
                         m.get("orientation", "right"), domain)
        concentric = spec.center == domain.center
        return epsilon_twist(spec), ((spec.radius, spec.outer) if concentric else ())
    if kind == "radial_shear":
        if not isinstance(domain, Disk):
            raise InvalidInput("radial shears need a disk domain")
        return radial_shear(domain, _point(m.get("center", [0, 0]), "center"),
                            _number(m.get("radius"), "radius"),
                            _number(m.get("amplitude"), "amplitude")), ()
    raise InvalidInput(f"unknown map kind {kind!r}")


def build_grid(cfg):
    """Quadrature grid for ``cfg``; disks get radial breaks at concentric twist annuli."""
    dom = cfg.domain
    if dom is None:
        raise InvalidInput("config needs a domain")
    res = cfg.resolution or ((64,) if isinstance(dom, Torus) else (64, 64))
    if isinstance(dom, Torus):
        if len(res) != 1:
            raise InvalidInput("torus resolution is a single power of two")
        return QuadratureGrid(dom, res * dom.dim)
    if len(res) == 1:
        res = res * 2
    if len(res) != 2:
        raise InvalidInput("disk resolution is [n_radial, n_angular]")
    return QuadratureGrid(dom, res, cfg.breaks)


def parse_config(data, command="", seed=None, out=None):
    """Validate a decoded JSON object and build a :class:`RunConfig`."""
    if not isinstance(data, dict):
        raise InvalidInput("config must be a JSON object")
    known = {"seed", "domain", "resolution", "matrices", "maps", "twist", "epsilons",
             "tolerances"}
    extra = set(data) - known
    if extra:
        raise InvalidInput(f"unknown config keys {sorted(extra)}")
    if seed is None:
        seed = data.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise InvalidInput("seed must be a non-negative integer")
    domain = parse_domain(data.get("domain"))
    res = data.get("resolution", [])
    res = tuple(_power_of_two(r, "resolution") for r in (res if isinstance(res, list) else [res]))
    matrices = data.get("matrices", [])
    if not isinstance(matrices, list):
        raise InvalidInput("matrices must be a list")
    matrices = tuple(_matrix(g, "matrix") for g in matrices)
    maps = data.get("maps", [])
    if not isinstance(maps, list):
        raise InvalidInput("maps must be a list")
    if maps and domain is None:
        raise InvalidInput("maps need a domain")
    parsed = [parse_map(m, domain) for m in maps]
    maps = tuple(q for q, _ in parsed)
    breaks = tuple(sorted({b for _, bs in parsed for b in bs}))
    twist = data.get("twist", {})
    if not isinstance(twist, dict):
        raise InvalidInput("twist must be an object")
    eps = data.get("epsilons", list(DEFAULT_EPSILONS))
    if not isinstance(eps, list) or not eps:
        raise InvalidInput("epsilons must be a non-empty list")
    eps = tuple(_number(e, "epsilon") for e in eps)
    tols = data.get("tolerances", {})
    if not isinstance(tols, dict):
        raise InvalidInput("tolerances must be an object")
    tols = {str(k): _number(v, f"tolerance {k}") for k, v in tols.items()}
    if any(v <= 0 for v in tols.values()):
        raise InvalidInput("tolerances must be positive")
    return RunConfig(command, seed, domain, res, matrices, maps, twist, eps, tols, out, breaks)


def load_config(path, command="", seed=None, out=None):
    """Read and validate a JSON config file; every failure is InvalidInput."""
    if path is None:
        return parse_config({}, command, seed, out)
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise InvalidInput(f"cannot read config {path}: {exc.strerror}") from None
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise InvalidInput(f"malformed JSON in {path}: {exc}") from None
    return parse_config(data, command, seed, out)


def twist_spec(cfg):
    """Base twist for a sweep: from ``cfg.twist`` on ``cfg.domain`` (default test disk)."""
    dom = cfg.domain if cfg.domain is not None else DEFAULT_DISK
    if not isinstance(dom, Disk):
        raise InvalidInput("twist-report needs a disk domain")
    t = cfg.twist
    unknown = set(t) - {"center", "radius", "orientation"}
    if unknown:
        raise InvalidInput(f"unknown twist keys {sorted(unknown)}")
    return TwistSpec(_point(t.get("center", [0, 0]), "twist center"),
                     _number(t.get("radius", 0.6), "twist radius"),
                     max(cfg.epsilons), t.get("orientation", "right"), dom)
