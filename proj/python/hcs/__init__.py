"""Hypercomplex compressed sensing toolkit.

Arrays of hypercomplex numbers are float arrays whose last axis holds the
2^d real coefficients, ordered by generator bitmask (1, i1, i2, i12, ...).
"""

from ._hcs import *  # noqa: F401,F403
from ._hcs import __version__  # noqa: F401
