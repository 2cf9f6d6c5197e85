"""Physical constants (CODATA 2018) and shared defaults, SI units."""

HBAR = 1.054571817e-34      # reduced Planck constant, J s
EPS0 = 8.8541878128e-12     # vacuum permittivity, F/m
C0 = 2.99792458e8           # speed of light in vacuum, m/s

# Rb D2 optical frequency used whenever an absolute laser frequency is
# required (group index, resonance condition).  Overridable everywhere.
OMEGA_L0_DEFAULT = 2.0 * 3.141592653589793 * 384.230e12  # rad/s

TWO_PI = 6.283185307179586
