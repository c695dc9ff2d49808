"""
Saddle Maps

Correspondence maps f(y) = tau + sign * c * y^lambda * (1 + a_1 y + a_2 y^2 + ...)
and their compositions. chain() returns the partial compositions F_i, the
logarithmic derivatives Z_i, the scaled logarithmic derivatives mu_iq of f_i'
and the derivatives of D = ln |Delta'| at a point.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional

import numpy as np
from mpmath import mp, mpf

from polycycle.errors import ArgumentError, DomainError
from polycycle.models import PolycycleModel, SaddleModel
from polycycle.poly_core import mu, z

from .config import CORRECTION_RADIUS, DEFAULT_JET_ORDER, DEFAULT_PRECISION_BITS
from .jet import Jet, to_mpf

logger = logging.getLogger(__name__)


def map_jet(saddle: SaddleModel, x: Jet, tau: Optional[mpf] = None) -> Jet:
    """Jet of the saddle map at x, with an optional replacement offset."""
    if x.value <= 0:
        raise DomainError(f"Saddle map needs a positive argument, got {mp.nstr(x.value, 10)}")
    result = x.power(saddle.lambda_)
    if saddle.corrections:
        factor = Jet.constant(x.point, 1, x.order)
        power = Jet.constant(x.point, 1, x.order)
        for a in saddle.corrections:
            power = power * x
            factor = factor + power * a
        if factor.value <= to_mpf(CORRECTION_RADIUS):
            raise DomainError(
                f"Correction factor {mp.nstr(factor.value, 10)} at x = {mp.nstr(x.value, 10)} "
                f"is outside the radius (> {CORRECTION_RADIUS})"
            )
        result = result * factor
    offset = to_mpf(saddle.tau) if tau is None else tau
    return result * (saddle.sign * to_mpf(saddle.c)) + offset


def jet_of_map(saddle: SaddleModel, x: Jet) -> Jet:
    """Jet of tau + sign * c * x^lambda * (1 + sum a_j x^j) composed with x."""
    return map_jet(saddle, x)


def mu_values(saddle: SaddleModel, y, q_max: int) -> List[mpf]:
    """mu_q = y^q d^q/dy^q ln |f'(y)| for q = 1..q_max."""
    y = to_mpf(y)
    log_derivative = map_jet(saddle, Jet.variable(y, q_max + 1)).derivative().log_abs()
    derivs = log_derivative.derivs
    return [y ** q * derivs[q] for q in range(1, q_max + 1)]


@dataclass
class ChainResult:
    """Every quantity of the composition at one point."""
    x0: mpf
    F: List[Jet]  # F_0 = x, F_i = f_i(F_{i-1})
    Z: List[mpf]  # Z_i = F'_{i-1} / F_{i-1}
    mu: List[List[mpf]]  # mu[i-1][q-1] = mu_iq
    D: List[mpf]  # D^(l), l = 0..r-1
    bits: int

    @property
    def n(self) -> int:
        return len(self.Z)

    def mu_at(self, i: int, q: int) -> mpf:
        return self.mu[i - 1][q - 1]

    def variables(self) -> Dict[str, mpf]:
        """Numeric values keyed by the variable names of the P family."""
        point = {}
        for i in range(1, self.n + 1):
            point[z(i)] = self.Z[i - 1]
            for q, value in enumerate(self.mu[i - 1], start=1):
                point[mu(i, q)] = value
        return point


def chain(model: PolycycleModel, x0) -> ChainResult:
    """
    Evaluate the composition f_n o ... o f_1 and its derived quantities at x0.

    Raises:
        DomainError: an intermediate value leaves a map's domain (stage named)
    """
    order = model.jet_order
    with mp.workprec(model.precision_bits):
        x = Jet.variable(x0, order)
        F = [x]
        Z: List[mpf] = []
        mus: List[List[mpf]] = []
        for i, saddle in enumerate(model.saddles, start=1):
            previous = F[-1]
            try:
                F.append(map_jet(saddle, previous))
                mus.append(mu_values(saddle, previous.value, order - 1))
            except DomainError as e:
                raise DomainError(f"Stage {i}: {e}", stage=i) from e
            Z.append(previous.coeffs[1] / previous.value)
        try:
            D = F[-1].derivative().log_abs().derivs
        except DomainError as e:
            raise DomainError(f"Stage {model.n}: {e}", stage=model.n) from e
    return ChainResult(x0=to_mpf(x0), F=F, Z=Z, mu=mus, D=D, bits=model.precision_bits)


def log_slope(model: PolycycleModel, x) -> mpf:
    """ln |Delta'(x)| from first-order jets, at the current working precision."""
    jet = Jet.variable(x, 1)
    for i, saddle in enumerate(model.saddles, start=1):
        try:
            jet = map_jet(saddle, jet)
        except DomainError as e:
            raise DomainError(f"Stage {i}: {e}", stage=i) from e
    if not jet.coeffs[1]:
        raise DomainError(f"Delta' vanishes at x = {mp.nstr(jet.point, 10)}", stage=model.n)
    return mp.log(abs(jet.coeffs[1]))


# Built-in models

def _saddle(lambda_, c=1, tau=0, sign=1, corrections=()) -> SaddleModel:
    return SaddleModel(
        **{"lambda": str(lambda_), "c": str(c), "tau": str(tau), "sign": sign,
           "corrections": [str(a) for a in corrections]}
    )


BUILTIN_MODELS = {
    "saddle-limits": PolycycleModel(saddles=(
        _saddle("3/2", corrections=("1/2",)),
        _saddle(2),
        _saddle("1/2", c=2, corrections=("1/3", "1/5")),
    )),
    "identity-check": PolycycleModel(saddles=(_saddle(2), _saddle(3))),
    "double-cycle-probe": PolycycleModel(saddles=(_saddle(2), _saddle(3))),
}


def builtin_model(command: str) -> PolycycleModel:
    try:
        return BUILTIN_MODELS[command]
    except KeyError:
        raise ArgumentError(f"No built-in model for '{command}'") from None


def _random_rational(rng: np.random.Generator, low: Fraction, high: Fraction, max_denominator: int = 8) -> Fraction:
    denominator = int(rng.integers(1, max_denominator + 1))
    lo = math.ceil(low * denominator)
    hi = math.floor(high * denominator)
    return Fraction(int(rng.integers(lo, hi + 1)), denominator)


def random_models(
    count: int,
    seed: int,
    n_values=(1, 2, 3, 4),
    precision_bits: int = DEFAULT_PRECISION_BITS,
    jet_order: int = DEFAULT_JET_ORDER,
) -> List[PolycycleModel]:
    """
    Seeded models valid on (0, 1/10]: offsets and corrections are nonnegative,
    so every intermediate value stays positive; only the last map may flip sign.
    """
    rng = np.random.default_rng(seed)
    models = []
    for _ in range(count):
        n = int(rng.choice(n_values))
        saddles = []
        for i in range(n):
            corrections = tuple(
                _random_rational(rng, Fraction(0), Fraction(1, 2))
                for _ in range(int(rng.integers(0, 4)))
            )
            saddles.append(SaddleModel(
                **{"lambda": _random_rational(rng, Fraction(1, 4), Fraction(4)),
                   "c": _random_rational(rng, Fraction(1, 2), Fraction(2)),
                   "tau": _random_rational(rng, Fraction(0), Fraction(1, 2)),
                   "sign": -1 if i == n - 1 and rng.random() < 0.5 else 1,
                   "corrections": corrections}
            ))
        models.append(PolycycleModel(
            saddles=tuple(saddles),
            precision_bits=precision_bits,
            jet_order=max(jet_order, n + 1),
        ))
    logger.debug(f"Generated {count} random models (seed {seed})")
    return models
