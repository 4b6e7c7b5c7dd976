"""Physical constants shared by every module.

The vacuum speed of light is held here once so that derived quantities
(carrier frequency, group velocity, advection phases) are all consistent.
"""

from scipy.constants import c as SPEED_OF_LIGHT

__all__ = ["SPEED_OF_LIGHT"]
