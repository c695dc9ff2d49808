"""
Simulation Module Configuration

Numeric constants for the saddle-map model: working precision, jet order,
solver tolerances and the default probe grids.
"""

from fractions import Fraction

# Working precision (bits) and escalation steps on cancellation
DEFAULT_PRECISION_BITS = 256
ESCALATED_PRECISION_BITS = 512
MAX_PRECISION_BITS = 1024
GUARD_BITS = 32  # extra bits for the cancellation re-run

DEFAULT_JET_ORDER = 6

# Damped Newton for the double-cycle family
NEWTON_TOLERANCE = "1e-30"
NEWTON_MAX_ITERATIONS = 60
NEWTON_MAX_HALVINGS = 40

# Geometric sequences x_k = start * ratio^k for the limit probes
PROBE_START = Fraction(1, 100)
PROBE_RATIO = Fraction(1, 2)
PROBE_STEPS = 14  # reaches ~1.2e-6
RICHARDSON_DEPTH = 6

DIVERGENCE_START = Fraction(1, 10)
DIVERGENCE_RATIO = Fraction(1, 10)
DIVERGENCE_STEPS = 12
DIVERGENCE_MIN_STEP = "1e-3"  # smallest tail increment that counts as divergence

DOUBLE_CYCLE_GRID = tuple(Fraction(1, 10 ** k) for k in range(1, 7))

# The correction factor 1 + a_1 x + ... must stay above this
CORRECTION_RADIUS = Fraction(1, 2)

# Identity checks
DEFAULT_X0 = Fraction(1, 10)
IDENTITY_RANDOM_MODELS = 50
IDENTITY_MAX_ORDER = 4
IDENTITY_LOSS_BITS = 20  # relative tolerance is 2^-(precision_bits - IDENTITY_LOSS_BITS)

# Jet derivatives against mpmath central differences
FINITE_DIFFERENCE_TOLERANCE = "1e-6"
