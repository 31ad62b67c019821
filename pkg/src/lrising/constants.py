"""Physical constants (SI, 6 significant figures)."""

import math

TWO_PI = 2.0 * math.pi

HBAR = 1.05457e-34  # J s
ELEMENTARY_CHARGE = 1.60218e-19  # C
EPSILON_0 = 8.85419e-12  # F / m
ATOMIC_MASS_KG = 1.66054e-27  # kg

# 171Yb+ (atomic mass of the neutral isotope; the electron deficit is far
# below the 6-figure precision kept here).
YB171_ION_MASS_KG = 170.936 * ATOMIC_MASS_KG
