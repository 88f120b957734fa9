"""Central-value moments of Dirichlet L-functions to a prime modulus.

Thin python surface over the C++ core: character arithmetic, the smoothed
kernel, central values across the family, block schedules, mollifier
machinery and the family-level moment sums.
"""

from ._lmoment import *  # noqa: F401,F403
from ._lmoment import __doc__ as _core_doc  # noqa: F401
