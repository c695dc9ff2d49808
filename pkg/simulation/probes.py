"""
Saddle Limit Probes

Numerical checks on the saddle-map model:
- mu_limit_probe: y^q d^q/dy^q ln f'(y) along a geometric sequence y -> 0,
  Richardson-extrapolated and compared with (-1)^(q-1) (q-1)! (lambda - 1)
- identity_check: D^(l) from jets against P_{n,l}(mu, Z) evaluated numerically
  and against central finite differences of ln |Delta'|
- divergence_probe_n1: ln |Delta'(x)| -> -sign(lambda - 1) * infinity for one saddle
"""

import logging
from fractions import Fraction
from typing import Callable, Dict, List

from mpmath import mp, mpf

from polycycle.errors import ArgumentError, PrecisionExhausted
from polycycle.models import DivergenceReport, IdentityReport, MuLimitReport, PolycycleModel
from polycycle.poly_core import evaluate
from polycycle.q_recurrence import mu_limit, p_family

from .config import (
    DIVERGENCE_MIN_STEP,
    DIVERGENCE_RATIO,
    DIVERGENCE_START,
    DIVERGENCE_STEPS,
    ESCALATED_PRECISION_BITS,
    FINITE_DIFFERENCE_TOLERANCE,
    GUARD_BITS,
    IDENTITY_LOSS_BITS,
    MAX_PRECISION_BITS,
    PROBE_RATIO,
    PROBE_START,
    PROBE_STEPS,
    RICHARDSON_DEPTH,
)
from .jet import to_mpf
from .saddle_maps import chain, log_slope, mu_values

logger = logging.getLogger(__name__)


def geometric_sequence(start, ratio, steps: int) -> List[mpf]:
    if steps < 2:
        raise ArgumentError(f"A probe sequence needs at least 2 points, got {steps}")
    ratio = to_mpf(ratio)
    if not 0 < ratio < 1:
        raise ArgumentError(f"Sequence ratio must lie in (0, 1), got {ratio}")
    x = to_mpf(start)
    points = []
    for _ in range(steps):
        points.append(x)
        x = x * ratio
    return points


def richardson_geometric(values: List[mpf], ratio, depth: int = RICHARDSON_DEPTH) -> mpf:
    """
    Extrapolate values v_k = L + c_1 x_k + c_2 x_k^2 + ... taken at x_k = x_0 ratio^k.

    Each column of the table removes one more power of x.
    """
    ratio = to_mpf(ratio)
    row = list(values)
    for j in range(1, min(depth, len(values) - 1) + 1):
        scale = ratio ** j
        row = [(row[k] - scale * row[k - 1]) / (1 - scale) for k in range(1, len(row))]
    return row[-1]


def _relative_change(a: List[mpf], b: List[mpf]) -> mpf:
    worst = mpf(0)
    for x, y in zip(a, b):
        worst = max(worst, abs(x - y) / max(abs(y), mpf(1)))
    return worst


def with_escalation(compute: Callable[[int], List[mpf]], bits: int) -> tuple:
    """
    Run compute(bits) and compare against a run with GUARD_BITS more.

    When more than half the bits are lost the computation is repeated at a
    larger precision, up to MAX_PRECISION_BITS.

    Returns:
        (values, bits actually used)

    Raises:
        PrecisionExhausted: cancellation persists at MAX_PRECISION_BITS
    """
    attempt = bits
    while True:
        with mp.workprec(attempt):
            values = compute(attempt)
        with mp.workprec(attempt + GUARD_BITS):
            reference = compute(attempt + GUARD_BITS)
            change = _relative_change(values, reference)
            lost = change > mpf(2) ** (-(attempt // 2))
        if not lost:
            if attempt != bits:
                logger.info(f"Probe settled at {attempt} bits (requested {bits})")
            return values, attempt
        if attempt >= MAX_PRECISION_BITS:
            raise PrecisionExhausted(
                f"Cancellation persists at {attempt} bits; set precision_bits above {MAX_PRECISION_BITS} "
                f"or start the probe sequence further from 0"
            )
        logger.debug(f"Cancellation detected at {attempt} bits (relative change {mp.nstr(change, 5)}), escalating")
        attempt = min(MAX_PRECISION_BITS, max(ESCALATED_PRECISION_BITS, 2 * attempt))


def mu_limit_probe(
    model: PolycycleModel,
    i: int,
    q: int,
    start=PROBE_START,
    ratio=PROBE_RATIO,
    steps: int = PROBE_STEPS,
) -> MuLimitReport:
    """
    Scaled q-th log-derivative of f_i' along y_k = start * ratio^k.

    Raises:
        ArgumentError: i outside 1..n or q outside 1..r-1
        DomainError: a sequence point leaves the correction radius
        PrecisionExhausted: cancellation beyond MAX_PRECISION_BITS
    """
    if not 1 <= i <= model.n:
        raise ArgumentError(f"Saddle index must be in 1..{model.n}, got {i}")
    if not 1 <= q <= model.jet_order - 1:
        raise ArgumentError(f"q must be in 1..{model.jet_order - 1} (jet order {model.jet_order}), got {q}")
    saddle = model.saddles[i - 1]

    def compute(bits: int) -> List[mpf]:
        return [mu_values(saddle, y, q)[q - 1] for y in geometric_sequence(start, ratio, steps)]

    estimates, bits = with_escalation(compute, model.precision_bits)
    with mp.workprec(bits):
        points = geometric_sequence(start, ratio, steps)
        extrapolated = richardson_geometric(estimates, ratio)
        target = mu_limit(q) * (to_mpf(saddle.lambda_) - 1)
    logger.debug(f"mu_{i}{q}: extrapolated {mp.nstr(extrapolated, 12)}, target {mp.nstr(target, 12)}")
    return MuLimitReport(
        saddle_index=i,
        q=q,
        points=points,
        estimates=estimates,
        extrapolated=extrapolated,
        target=target,
        precision_bits=bits,
    )


def relative_error(a: mpf, b: mpf) -> mpf:
    """|a - b| / max(|a|, |b|), or 0 when both vanish."""
    scale = max(abs(a), abs(b))
    if not scale:
        return mpf(0)
    return abs(a - b) / scale


def finite_difference_check(model: PolycycleModel, x0, l_max: int) -> List[mpf]:
    """l-th derivatives of ln |Delta'| at x0 by mpmath central differences, l = 1..l_max."""
    with mp.workprec(model.precision_bits):
        x = to_mpf(x0)
        return [mp.diff(lambda t: log_slope(model, t), x, l) for l in range(1, l_max + 1)]


def identity_check(model: PolycycleModel, x0, l_max: int) -> IdentityReport:
    """Compare D^(l)(x0) with P_{n,l}(mu_iq(x0), Z_i(x0)) for l = 1..l_max."""
    if not 1 <= l_max <= model.jet_order - 1:
        raise ArgumentError(f"l_max must be in 1..{model.jet_order - 1} (jet order {model.jet_order}), got {l_max}")
    family = p_family(model.n, l_max)
    bits = model.precision_bits
    result = chain(model, x0)
    with mp.workprec(bits):
        point = result.variables()
        jet_values, polynomial_values, errors = [], [], []
        for l in range(1, l_max + 1):
            value = evaluate(family.member(l), point, convert=to_mpf)
            jet_values.append(result.D[l])
            polynomial_values.append(value)
            errors.append(relative_error(result.D[l], value))
        tolerance = mpf(2) ** (-(bits - IDENTITY_LOSS_BITS))
        differences = finite_difference_check(model, x0, l_max)
        difference_errors = [
            abs(d - fd) / max(abs(d), abs(fd), mpf(1)) for d, fd in zip(jet_values, differences)
        ]
    report = IdentityReport(
        n=model.n,
        x0=result.x0,
        jet_values=jet_values,
        polynomial_values=polynomial_values,
        errors=errors,
        tolerance=tolerance,
        finite_difference_values=differences,
        finite_difference_errors=difference_errors,
        finite_difference_tolerance=mpf(FINITE_DIFFERENCE_TOLERANCE),
        precision_bits=bits,
    )
    logger.debug(f"Identity n={model.n}, l<={l_max}: max relative error {mp.nstr(report.max_error, 5)}")
    return report


def divergence_probe_n1(
    model: PolycycleModel,
    start=DIVERGENCE_START,
    ratio=DIVERGENCE_RATIO,
    steps: int = DIVERGENCE_STEPS,
) -> DivergenceReport:
    """
    ln |Delta'(x_k)| for a single saddle along x_k -> 0.

    lambda = 1 is accepted as the bounded control case.
    """
    if model.n != 1:
        raise ArgumentError(f"The divergence probe takes a single saddle, got n = {model.n}")
    saddle = model.saddles[0]
    bits = model.precision_bits
    with mp.workprec(bits):
        points = geometric_sequence(start, ratio, steps)
        values = [log_slope(model, x) for x in points]
        min_step = mpf(DIVERGENCE_MIN_STEP)
    report = DivergenceReport(
        lambda_=saddle.lambda_, points=points, values=values, min_step=min_step, precision_bits=bits
    )
    logger.debug(f"Divergence probe lambda={saddle.lambda_}: {report.direction or 'bounded'}")
    return report


def single_saddle(model: PolycycleModel, i: int, lambda_=None) -> PolycycleModel:
    """Saddle i of a model as a one-saddle model, optionally with lambda replaced."""
    saddle = model.saddles[i - 1]
    if lambda_ is not None:
        saddle = saddle.model_copy(update={"lambda_": Fraction(lambda_)})
    return model.model_copy(update={"saddles": (saddle,)})


def saddle_limits(model: PolycycleModel) -> Dict[str, list]:
    """Every mu limit probe of a model, plus divergence and the lambda = 1 control per saddle."""
    probes = [
        mu_limit_probe(model, i, q)
        for i in range(1, model.n + 1)
        for q in range(1, model.jet_order)
    ]
    divergence = [
        divergence_probe_n1(single_saddle(model, i))
        for i in range(1, model.n + 1)
        if model.saddles[i - 1].lambda_ != 1
    ]
    controls = [divergence_probe_n1(single_saddle(model, i, lambda_=1)) for i in range(1, model.n + 1)]
    return {"mu_limits": probes, "divergence": divergence, "controls": controls}
