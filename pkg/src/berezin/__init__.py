"""The Berezin cocycle on Sp(2n, R) and the invariants built from it.

Submodules:

- ``symplectic``: block decomposition, random and integer symplectic matrices
- ``matfun``: trace-logarithms and argument lifts
- ``cocycle``: the cocycle c, its trivializer, integer class and the cover
- ``currents``: the integral cocycle C on symplectomorphism groups
- ``surface``: planar twists, turning angle, flux and Calabi
- ``lattice``: multiplier actions and the SL(2, Z) holonomy witness
"""

from .cocycle import (
    CoverElement,
    berezin_sigma,
    cocycle_c,
    cover_mul,
    integer_class,
    loop_lift,
    sigma_alpha,
    trivializer_gamma,
)
from .currents import (
    Disk,
    Torus,
    big_cocycle_C,
    big_cocycle_C_with_error,
    disk_grid,
    gamma_circ,
    linear_torus_map,
    shear_map,
    torus_grid,
)
from .errors import (
    BerezinError,
    BranchAmbiguity,
    DomainError,
    InvalidInput,
    NumericalFailure,
    RefinementRequired,
    Unsupported,
)
from .lattice import holonomy, mobius_disk, mobius_halfplane, obstruction_witness
from .matfun import continuous_arg_lift, tr_log_one_plus, tr_log_series
from .surface import (
    TwistSpec,
    calabi,
    epsilon_twist,
    flux_tau,
    turning_angle,
    twist_report,
)
from .symplectic import from_blocks, random_symplectic, to_blocks

__version__ = "0.1.0"
