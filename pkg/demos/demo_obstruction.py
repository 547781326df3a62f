# ====================================
# A holonomy that cannot be linearized
# ====================================
#
# SL(2, Z) acts on the upper half-plane by z -> (a + z c)^-1 (b + z d) and
# the multiplier (a + z c)^-alpha follows each generator.  Around the
# relations I^4 = 1 and J^3 = 1 the multipliers multiply to
# exp(-2 pi i alpha) instead of 1 whenever alpha is not an integer.

from berezin.lattice import holonomy, obstruction_witness, relator_winding

for alpha in (0.3, 0.5, 1.0, 1.7, 2.0):
    r = obstruction_witness(alpha)
    print(f"alpha {alpha:3.1f}: I^4 -> {r.holonomy_I4:.6f}, J^3 -> {r.holonomy_J3:.6f}, "
          f"nontrivial {r.nontrivial}")

# The phase of a relation word counts how often its arguments wind, and does
# not depend on where the word starts.

for word in ("I,I,I,I", "J,J,J", "I,K,I,K,I,K", "K,K^-1"):
    print(f"{word:14s} winding {relator_winding(word):+d}   "
          f"holonomy(0.25) = {holonomy(word, 0.25):.6f}")
