"""
Simulation Module for the Saddle-Map Model

Multi-precision jets, compositions of power-like correspondence maps and the
numerical probes built on them (saddle limits, the derivative identity and
the double-cycle family).
"""

from . import config
from . import jet
from . import saddle_maps
from . import probes
from . import double_cycle

__all__ = ["config", "jet", "saddle_maps", "probes", "double_cycle"]
