# ====================================
# The cocycle c on Sp(2n, R)
# ====================================
#
# Every real symplectic matrix g has complex blocks (Phi, Psi).  For a pair
# g1, g2 the matrix Z = Phi1^-1 Psi1 conj(Psi2) Phi2^-1 is a strict
# contraction, and c(g1, g2) = Im tr ln(1 + Z) is a bounded 2-cocycle.

import math

import numpy as np

from berezin.cocycle import (
    CoverElement,
    class_residual,
    cocycle_c,
    cover_mul,
    integer_class,
    trivializer_gamma,
)
from berezin.symplectic import random_symplectic, rotation

rng = np.random.default_rng(0)
g1, g2, g3 = (random_symplectic(2, rng, 1.5) for _ in range(3))

# The cocycle identity holds to rounding.

residual = (cocycle_c(g1, g2) + cocycle_c(g1 @ g2, g3)
            - cocycle_c(g1, g2 @ g3) - cocycle_c(g2, g3))
print(f"cocycle identity residual   {residual:.2e}")

# |c| stays below n pi / 2, however large the matrices get.

print(f"|c(g1, g2)| / (n pi/2)      {abs(cocycle_c(g1, g2)) / math.pi:.4f}")

# Adding the arguments of det Phi turns c into an integer-valued cocycle.
# Two rotations by 3 pi / 4 wrap once around the circle.

r = rotation(3 * math.pi / 4)
print(f"class residual (random)     {class_residual(g1, g2):+.12f}")
print(f"integer class of (r, r)     {integer_class(r, r)}")

# The pair (g, x) with exp(ix) the phase of det Phi(g) is a point of the
# universal cover; c is exactly the correction that makes its product work.

e1, e2 = (CoverElement(g, trivializer_gamma(g)) for g in (g1, g2))
prod = cover_mul(e1, e2)
print(f"cover product phase error   {prod.phase_error():.2e}")
