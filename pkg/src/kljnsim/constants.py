"""Physical constants (exact SI / CODATA 2018 values)."""

from scipy import constants as _c

BOLTZMANN = _c.k  # J/K
PLANCK = _c.h  # J s
SPEED_OF_LIGHT = _c.c  # m/s
