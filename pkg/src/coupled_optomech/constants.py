"""Physical constants (CODATA 2018, SI).

All three are exact by definition of the 2019 SI, so CODATA 2018 and later
adjustments agree to the last digit.
"""

import math

PLANCK_H = 6.62607015e-34  # J s
HBAR = PLANCK_H / (2.0 * math.pi)  # J s
K_B = 1.380649e-23  # J / K
C_LIGHT = 299792458.0  # m / s

TWO_PI = 2.0 * math.pi
