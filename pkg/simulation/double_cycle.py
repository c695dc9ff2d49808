"""
Double Cycle Family Probe

For two saddles, tunes the offsets (tau_1, tau_2) so that x0 is a fixed point
of multiplicity at least two (Delta(x0) = x0, Delta'(x0) = 1), continues the
solution as x0 -> 0 and tracks how close the direction (Z_1 : Z_2) gets to
the coordinate axes.
"""

import logging
from typing import Callable, List, Sequence, Tuple

from mpmath import mp, mpf

from polycycle.errors import ArgumentError, ConvergenceError, DomainError
from polycycle.models import DoubleCyclePoint, DoubleCycleReport, PolycycleModel

from .config import DOUBLE_CYCLE_GRID, NEWTON_MAX_HALVINGS, NEWTON_MAX_ITERATIONS, NEWTON_TOLERANCE
from .jet import Jet, to_mpf
from .saddle_maps import map_jet

logger = logging.getLogger(__name__)


def damped_newton(
    residual: Callable[[List[mpf]], List[mpf]],
    jacobian: Callable[[List[mpf]], List[List[mpf]]],
    guess: Sequence[mpf],
    tolerance: mpf,
    max_iterations: int = NEWTON_MAX_ITERATIONS,
    max_halvings: int = NEWTON_MAX_HALVINGS,
) -> Tuple[List[mpf], List[mpf], int]:
    """
    Newton's method with step halving on the residual norm.

    Trial points that leave the model's domain count as failed steps.

    Returns:
        (solution, residuals at the solution, iterations used)

    Raises:
        ConvergenceError: no step reduces the residual, or max_iterations is hit
    """
    x = [to_mpf(v) for v in guess]
    g = residual(x)
    for iteration in range(max_iterations):
        norm = mp.norm(mp.matrix(g))
        if norm <= tolerance:
            return x, g, iteration
        step = mp.lu_solve(mp.matrix(jacobian(x)), -mp.matrix(g))
        scale = mpf(1)
        for _ in range(max_halvings):
            trial = [xi + scale * step[k] for k, xi in enumerate(x)]
            try:
                trial_g = residual(trial)
            except DomainError:
                trial_g = None
            if trial_g is not None and mp.norm(mp.matrix(trial_g)) < norm:
                x, g = trial, trial_g
                break
            scale /= 2
        else:
            raise ConvergenceError(
                f"Damped Newton stalled after {iteration} iterations (residual {mp.nstr(norm, 5)})",
                residuals=[mp.nstr(v, 10) for v in g],
            )
        logger.debug(f"Newton iteration {iteration + 1}: residual {mp.nstr(mp.norm(mp.matrix(g)), 5)}")
    norm = mp.norm(mp.matrix(g))
    if norm <= tolerance:
        return x, g, max_iterations
    raise ConvergenceError(
        f"Damped Newton did not reach {mp.nstr(tolerance, 3)} in {max_iterations} iterations",
        residuals=[mp.nstr(v, 10) for v in g],
    )


def double_cycle_family_probe(model: PolycycleModel, grid: Sequence = DOUBLE_CYCLE_GRID) -> DoubleCycleReport:
    """
    Solve Delta(x0) = x0, Delta'(x0) = 1 for (tau_1, tau_2) at each x0 of the grid.

    The saddles' own offsets are ignored. The starting point at each x0 comes
    from solving f_2'(y) f_1'(x0) = 1 for y = F_1(x0), continued from the
    previous grid point; damped Newton then polishes (tau_1, tau_2).

    Raises:
        ArgumentError: n != 2 or lambda_1 lambda_2 = 1
        ConvergenceError: Newton or the starting-point solve fails (residuals attached)
    """
    if model.n != 2:
        raise ArgumentError(f"The double-cycle probe needs exactly two saddles, got {model.n}")
    first, second = model.saddles
    if first.lambda_ * second.lambda_ == 1:
        raise ArgumentError("The double-cycle probe requires lambda_1 * lambda_2 != 1")
    bits = model.precision_bits

    with mp.workprec(bits):
        tolerance = mpf(NEWTON_TOLERANCE)
        zero = mpf(0)
        log_y = zero
        points: List[DoubleCyclePoint] = []
        for x0 in grid:
            x0 = to_mpf(x0)
            inner = map_jet(first, Jet.variable(x0, 1), tau=zero)
            slope = inner.coeffs[1]  # f_1'(x0), independent of tau_1

            def outer(y: mpf, tau=zero) -> Jet:
                return map_jet(second, Jet.variable(y, 2), tau=tau)

            def slope_condition(u):
                return outer(mp.exp(u)).coeffs[1] * slope - 1

            try:
                log_y = mp.findroot(slope_condition, log_y)
            except (ValueError, ZeroDivisionError) as e:
                raise ConvergenceError(f"No starting point for x0 = {mp.nstr(x0, 5)}: {e}") from e
            y = mp.exp(log_y)
            guess = [y - inner.value, x0 - outer(y).value]

            def residual(tau: List[mpf]) -> List[mpf]:
                y = inner.value + tau[0]
                composed = outer(y, tau[1])
                return [composed.value - x0, composed.coeffs[1] * slope - 1]

            def jacobian(tau: List[mpf]) -> List[List[mpf]]:
                g = outer(inner.value + tau[0], tau[1])
                return [[g.coeffs[1], mpf(1)], [2 * g.coeffs[2] * slope, zero]]

            tau, residuals, iterations = damped_newton(residual, jacobian, guess, tolerance)
            y = inner.value + tau[0]
            z = (1 / x0, slope / y)
            points.append(DoubleCyclePoint(
                x0=x0, tau=(tau[0], tau[1]), z=z, residuals=(residuals[0], residuals[1]), iterations=iterations
            ))
            logger.info(f"x0 = {mp.nstr(x0, 5)}: min ratio {mp.nstr(points[-1].min_ratio, 8)}")
    return DoubleCycleReport(points=points, tolerance=tolerance, precision_bits=bits)
