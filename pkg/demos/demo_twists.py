# ====================================
# Twists in a disk with two holes
# ====================================
#
# An epsilon-twist rotates a thin annulus of radius R by a full turn.  As the
# annulus shrinks the flat trivializer, the flux through an enclosed hole and
# the Calabi invariant approach multiples of the enclosed area pi R^2.

import math

import numpy as np

from berezin.currents import Disk
from berezin.surface import TwistSpec, epsilon_twist, tracking_lifts, twist_report

domain = Disk((0.0, 0.0), 1.0, holes=(((0.0, 0.0), 0.1), ((0.8, 0.0), 0.08)))
spec = TwistSpec((0.0, 0.0), 0.6, 0.1, "right", domain)
area = spec.enclosed_area

# Sweep epsilon and fit value = limit + slope * epsilon.  Hole 1 sits inside
# the twist, hole 2 outside it.

rep = twist_report(spec, [0.2, 0.1, 0.05, 0.025])
print("  eps     gamma_circ    tau_1     tau_2     calabi")
for row in rep.table():
    print("  " + "  ".join(f"{v:8.5f}" for v in row))
print(f"limit of gamma_circ / (2 pi area)  {rep.fits['gamma_circ'][0] / (2 * math.pi * area):.4f}")
print(f"limit of tau_1 / area              {rep.fits['tau_1'][0] / area:.4f}")
print(f"limit of calabi / area^2           {rep.fits['calabi'][0] / area ** 2:.4f}")

# The turning angle of a tangent vector, tracked along a curve from the
# boundary, against the lifted argument of det Phi.  With these block
# conventions Phi(R(t)) = exp(-i t), so the two lifts have opposite signs.

q = epsilon_twist(spec)
x = np.array([[0.3, 0.1], [0.61, 0.0], [0.9, 0.0]])
v = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]])
ang, phase = tracking_lifts(q, x, v)
for p, a, f in zip(x, ang, phase):
    print(f"x = {p}:  Ang {a:+.4f}   lifted arg det Phi {f:+.4f}")
