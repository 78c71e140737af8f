"""Unit conversions for the mixed Debye / GHz / metre system.

Energies are ordinary frequencies in GHz (E/h).  Forces are reported in
amu*m/s^2, i.e. newtons divided by one atomic mass unit.
"""

import math

PLANCK = 6.62607015e-34  # J s
DEBYE = 3.33564e-30  # C m
AMU = 1.66053906660e-27  # kg

# mu[D] * E[V/m] -> GHz
DEBYE_VM_TO_GHZ = DEBYE / PLANCK / 1e9

# angular frequency [rad/s] -> GHz
RAD_S_TO_GHZ = 1.0 / (2.0 * math.pi * 1e9)

# gradient of an energy in GHz/m -> force in amu*m/s^2
GHZ_PER_M_TO_AMU_ACCEL = 1e9 * PLANCK / AMU
