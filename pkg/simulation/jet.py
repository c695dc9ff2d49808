"""
Truncated Taylor Arithmetic

A Jet holds the normalized Taylor coefficients c_k = g^(k)(x) / k!, k = 0..r,
of a scalar function g at a point x, as mpmath numbers. Products, quotients,
logarithms, real powers and composition follow the standard coefficient
recurrences, so every derivative is exact to working precision.
"""

import logging
from fractions import Fraction
from typing import List, Sequence

from mpmath import mp, mpf

from polycycle.errors import ArgumentError, DomainError

logger = logging.getLogger(__name__)


def to_mpf(value) -> mpf:
    """Exact conversion for ints and Fractions, pass-through for mpf."""
    if isinstance(value, mpf):
        return value
    if isinstance(value, Fraction):
        return mpf(value.numerator) / value.denominator
    if isinstance(value, (int, str)):
        return mpf(value)
    if isinstance(value, float):
        return mpf(value)
    raise ArgumentError(f"Cannot convert {type(value).__name__} to a multi-precision number")


def _cauchy(a: Sequence[mpf], b: Sequence[mpf], order: int) -> List[mpf]:
    out = []
    for k in range(order + 1):
        total = mpf(0)
        for j in range(k + 1):
            if a[j] and b[k - j]:
                total += a[j] * b[k - j]
        out.append(total)
    return out


class Jet:
    """Value and derivatives 1..r of a function at a point."""

    __slots__ = ("point", "coeffs")

    def __init__(self, point, coeffs: Sequence):
        if not coeffs:
            raise ArgumentError("A jet needs at least the value coefficient")
        self.point = to_mpf(point)
        self.coeffs = tuple(to_mpf(c) for c in coeffs)

    @classmethod
    def variable(cls, x, order: int) -> "Jet":
        """Jet of the identity map: [x, 1, 0, ..., 0]."""
        x = to_mpf(x)
        coeffs = [x] + [mpf(1)] + [mpf(0)] * (order - 1) if order >= 1 else [x]
        return cls(x, coeffs)

    @classmethod
    def constant(cls, x, value, order: int) -> "Jet":
        return cls(x, [to_mpf(value)] + [mpf(0)] * order)

    @classmethod
    def from_derivatives(cls, x, derivs: Sequence) -> "Jet":
        return cls(x, [to_mpf(d) / mp.factorial(k) for k, d in enumerate(derivs)])

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def value(self) -> mpf:
        return self.coeffs[0]

    @property
    def derivs(self) -> List[mpf]:
        """[g(x), g'(x), ..., g^(r)(x)]."""
        return [c * mp.factorial(k) for k, c in enumerate(self.coeffs)]

    def derivative(self) -> "Jet":
        """Jet of g' at the same point; the order drops by one."""
        if self.order < 1:
            raise ArgumentError("Cannot differentiate a jet of order 0")
        return Jet(self.point, [(k + 1) * self.coeffs[k + 1] for k in range(self.order)])

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.order != self.order:
                raise ArgumentError(f"Jet orders differ: {self.order} vs {other.order}")
            if other.point != self.point:
                raise ArgumentError("Jets are taken at different points")
            return other
        return Jet.constant(self.point, other, self.order)

    def __add__(self, other) -> "Jet":
        other = self._coerce(other)
        return Jet(self.point, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self) -> "Jet":
        return Jet(self.point, [-c for c in self.coeffs])

    def __sub__(self, other) -> "Jet":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Jet":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            factor = to_mpf(other)
            return Jet(self.point, [c * factor for c in self.coeffs])
        other = self._coerce(other)
        return Jet(self.point, _cauchy(self.coeffs, other.coeffs, self.order))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet":
        other = self._coerce(other)
        b = other.coeffs
        if not b[0]:
            raise DomainError("Division by a jet with zero value")
        out: List[mpf] = []
        for k in range(self.order + 1):
            total = self.coeffs[k]
            for j in range(1, k + 1):
                total -= b[j] * out[k - j]
            out.append(total / b[0])
        return Jet(self.point, out)

    def __rtruediv__(self, other) -> "Jet":
        return self._coerce(other) / self

    def __pow__(self, exponent: int) -> "Jet":
        if not isinstance(exponent, int) or exponent < 0:
            raise ArgumentError(f"Use power() for non-integer exponents, got {exponent!r}")
        result = Jet.constant(self.point, 1, self.order)
        for _ in range(exponent):
            result = result * self
        return result

    def ln(self) -> "Jet":
        a = self.coeffs
        if a[0] <= 0:
            raise DomainError(f"ln of a nonpositive value {mp.nstr(a[0], 10)}")
        out = [mp.log(a[0])]
        for k in range(1, self.order + 1):
            total = a[k]
            for j in range(1, k):
                total -= j * out[j] * a[k - j] / k
            out.append(total / a[0])
        return Jet(self.point, out)

    def log_abs(self) -> "Jet":
        """ln |g|, defined wherever g(x) != 0."""
        if not self.value:
            raise DomainError("ln |g| at a zero of g")
        return (-self).ln() if self.value < 0 else self.ln()

    def power(self, alpha) -> "Jet":
        """g^alpha for real alpha; g(x) must be positive."""
        alpha = to_mpf(alpha)
        a = self.coeffs
        if a[0] <= 0:
            raise DomainError(f"Fractional power of a nonpositive value {mp.nstr(a[0], 10)}")
        out = [a[0] ** alpha]
        for k in range(1, self.order + 1):
            total = mpf(0)
            for j in range(1, k + 1):
                total += ((alpha + 1) * j - k) * a[j] * out[k - j]
            out.append(total / (k * a[0]))
        return Jet(self.point, out)

    def compose(self, inner: "Jet") -> "Jet":
        """
        Jet of g(h(x)) where self is the jet of g at h(x) and inner the jet of h at x.

        Raises:
            ArgumentError: self is not taken at inner's value, or its order is too low
        """
        if self.order < inner.order:
            raise ArgumentError(f"Outer jet order {self.order} is below inner order {inner.order}")
        if self.point != inner.value:
            raise ArgumentError("Outer jet must be taken at the value of the inner jet")
        order = inner.order
        shifted = [mpf(0)] + list(inner.coeffs[1:])
        power = [mpf(1)] + [mpf(0)] * order
        result = [self.coeffs[0]] + [mpf(0)] * order
        for m in range(1, order + 1):
            power = _cauchy(power, shifted, order)
            result = [r + self.coeffs[m] * p for r, p in zip(result, power)]
        return Jet(inner.point, result)

    def __repr__(self) -> str:
        values = ", ".join(mp.nstr(d, 8) for d in self.derivs)
        return f"Jet(x={mp.nstr(self.point, 8)}, [{values}])"
