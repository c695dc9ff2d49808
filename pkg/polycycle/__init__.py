"""
Polycycle Toolkit

Exact generation of the P/Q polynomial families, elimination for small n and
the command line that runs every verification.
"""

__version__ = "1.0.0"

from . import config
from . import errors
from . import poly_core
from . import q_recurrence
from . import elimination

__all__ = ["config", "errors", "poly_core", "q_recurrence", "elimination", "__version__"]
