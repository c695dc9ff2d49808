"""
Polycycle Pydantic Models

Model files for the saddle-map numerics, report records and the run
configuration of the command line.
"""

from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Annotated, List, Optional, Tuple

from mpmath import mp, mpf
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PlainSerializer,
    PlainValidator,
    computed_field,
    field_validator,
    model_validator,
)

from .poly_core import MPoly, as_fraction, pretty


def _parse_rational(value) -> Fraction:
    if isinstance(value, bool):
        raise ValueError("booleans are not rational numbers")
    if isinstance(value, float):
        raise ValueError("floats are not accepted; write rationals as strings such as '3/2'")
    return as_fraction(value)


RationalValue = Annotated[
    Fraction,
    PlainValidator(_parse_rational),
    PlainSerializer(lambda value: str(value), return_type=str),
]


def _parse_mpf(value) -> mpf:
    if isinstance(value, mpf):
        return value
    if isinstance(value, bool):
        raise ValueError("booleans are not real numbers")
    if isinstance(value, Fraction):
        return mpf(value.numerator) / value.denominator
    if isinstance(value, (int, str)):
        return mpf(value)
    raise ValueError(f"expected an mpf, integer, Fraction or decimal string, got {type(value).__name__}")


def decimal_string(value: mpf) -> str:
    """Decimal form carrying every significant bit of the mantissa."""
    return mp.nstr(value, max(15, int(value.bc * 0.30103) + 1))


def short_decimal(value: mpf) -> str:
    return mp.nstr(value, 10)


def _parse_poly(value) -> MPoly:
    if not isinstance(value, MPoly):
        raise ValueError(f"expected an MPoly, got {type(value).__name__}")
    return value


# Full-precision values (results, points)
MpfValue = Annotated[mpf, PlainValidator(_parse_mpf), PlainSerializer(decimal_string, return_type=str)]

# Errors, tolerances and ratios
ErrorValue = Annotated[mpf, PlainValidator(_parse_mpf), PlainSerializer(short_decimal, return_type=str)]

# Polynomials are reported in pretty form
PolyValue = Annotated[MPoly, PlainValidator(_parse_poly), PlainSerializer(pretty, return_type=str)]


class SaddleModel(BaseModel):
    """One correspondence map f(x) = tau + sign * c * x^lambda * (1 + a_1 x + a_2 x^2 + ...)."""
    model_config = ConfigDict(arbitrary_types_allowed=True, populate_by_name=True, frozen=True)

    lambda_: RationalValue = Field(alias="lambda")  # characteristic number
    c: RationalValue = Fraction(1)
    tau: RationalValue = Fraction(0)
    sign: int = 1
    corrections: tuple[RationalValue, ...] = ()

    @field_validator("lambda_", "c")
    @classmethod
    def _positive(cls, value: Fraction, info) -> Fraction:
        if value <= 0:
            raise ValueError(f"{info.field_name.rstrip('_')} must be positive, got {value}")
        return value

    @field_validator("sign")
    @classmethod
    def _unit_sign(cls, value: int) -> int:
        if value not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {value}")
        return value


class PolycycleModel(BaseModel):
    """Ordered chain of saddle maps with its numeric settings."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    saddles: tuple[SaddleModel, ...]
    precision_bits: int = 256
    jet_order: int = 6

    @property
    def n(self) -> int:
        return len(self.saddles)

    @model_validator(mode="after")
    def _check_sizes(self) -> "PolycycleModel":
        if not self.saddles:
            raise ValueError("saddles must contain at least one saddle")
        if self.precision_bits < 53:
            raise ValueError(f"precision_bits must be >= 53, got {self.precision_bits}")
        if self.jet_order < self.n + 1:
            raise ValueError(f"jet_order must be >= n + 1 = {self.n + 1}, got {self.jet_order}")
        return self


class Disagreement(BaseModel):
    """A sample point where the two vanishing verdicts differ."""
    point: dict[str, str]  # variable -> rational as 'p/q'
    a_vanishes: bool
    b_vanishes: bool


class ZeroSetReport(BaseModel):
    """Result of comparing two vanishing loci on sampled rational points."""
    sample_count: int
    agree_count: int
    disagreements: list[Disagreement] = []
    seed: int
    structured_count: int = 0  # points constructed on factors
    random_count: int = 0
    a_vanish_count: int = 0
    b_vanish_count: int = 0
    redrawn_count: int = 0

    @model_validator(mode="after")
    def _consistent(self) -> "ZeroSetReport":
        if self.agree_count > self.sample_count:
            raise ValueError("agree_count cannot exceed sample_count")
        if bool(self.disagreements) != (self.agree_count < self.sample_count):
            raise ValueError("disagreements must be listed exactly when agreement is incomplete")
        return self

    @property
    def passed(self) -> bool:
        return self.agree_count == self.sample_count

    @computed_field
    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"


class EliminationTrace(BaseModel):
    """Every stage of the n = 4 elimination."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    tilde_q: Tuple[PolyValue, PolyValue, PolyValue]
    multipliers: Tuple[PolyValue, PolyValue]
    combination: PolyValue = Field(exclude=True)
    linear_factor: Tuple[PolyValue, PolyValue]  # coefficients of z2, z3 in L
    reduced_system: Tuple[Tuple[PolyValue, PolyValue], Tuple[PolyValue, PolyValue]]
    determinant: PolyValue
    boundary: Tuple[PolyValue, PolyValue, PolyValue]
    r_star: PolyValue = Field(exclude=True)

    @property
    def r_star_factors(self) -> List[MPoly]:
        return [self.determinant, *self.boundary]


class NewtonDerivation(BaseModel):
    """Trace of the argument that p_1 = ... = p_m = 0 forces z = 0."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    m: int
    identities_hold: bool  # l s_l = sum (-1)^(i-1) s_(l-i) p_i in the z variables
    sigma_in_power_sums: Tuple[PolyValue, ...]  # s_1..s_m as polynomials in formal p1..pm
    expressions_match: bool  # substituting p_i = z_1^i + ... + z_m^i recovers s_l
    sigma_vanish: bool  # every s_l (l >= 1) has zero constant term
    vieta_holds: bool  # prod (x - z_l) = sum (-1)^l s_l x^(m-l)
    reduced_product: PolyValue  # the Vieta form with p = 0
    steps: Tuple[str, ...] = ()

    @computed_field
    @property
    def verdict(self) -> bool:
        x_power = MPoly.var(self.reduced_product.space, "x") ** self.m
        return (
            self.identities_hold
            and self.expressions_match
            and self.sigma_vanish
            and self.vieta_holds
            and self.reduced_product == x_power
        )


class MuLimitReport(BaseModel):
    """Scaled log-derivative estimates for one (saddle, q) and their extrapolation."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    saddle_index: int
    q: int
    points: List[MpfValue]
    estimates: List[MpfValue]
    extrapolated: MpfValue
    target: MpfValue
    precision_bits: int

    @computed_field(return_type=ErrorValue)
    @property
    def error(self) -> mpf:
        return abs(self.extrapolated - self.target)


class IdentityReport(BaseModel):
    """D^(l) from jets against P_{n,l}(mu, Z), l = 1..l_max."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    n: int
    x0: MpfValue
    jet_values: List[MpfValue]
    polynomial_values: List[MpfValue]
    errors: List[ErrorValue]  # relative
    tolerance: ErrorValue
    finite_difference_values: List[MpfValue]  # central differences of ln |Delta'|
    finite_difference_errors: List[ErrorValue]
    finite_difference_tolerance: ErrorValue
    precision_bits: int

    @computed_field(return_type=ErrorValue)
    @property
    def max_error(self) -> mpf:
        return max(self.errors, default=mpf(0))

    @computed_field
    @property
    def passed(self) -> bool:
        return self.max_error <= self.tolerance and all(
            e <= self.finite_difference_tolerance for e in self.finite_difference_errors
        )


class DivergenceReport(BaseModel):
    """ln |Delta'(x_k)| along x_k -> 0 for a single saddle."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True, populate_by_name=True)

    lambda_: RationalValue = Field(alias="lambda")
    points: List[ErrorValue]
    values: List[MpfValue]
    min_step: ErrorValue
    precision_bits: int

    @property
    def increments(self) -> List[mpf]:
        return [b - a for a, b in zip(self.values, self.values[1:])]

    @property
    def tail(self) -> List[mpf]:
        increments = self.increments
        return increments[len(increments) // 2:]

    @computed_field
    @property
    def monotone(self) -> bool:
        tail = self.tail
        return all(step > 0 for step in tail) or all(step < 0 for step in tail)

    @computed_field
    @property
    def diverges(self) -> bool:
        return self.monotone and all(abs(step) >= self.min_step for step in self.tail)

    @computed_field
    @property
    def direction(self) -> Optional[str]:
        """'+inf', '-inf', or None when bounded."""
        if not self.diverges:
            return None
        return "+inf" if self.tail[-1] > 0 else "-inf"

    @computed_field
    @property
    def expected_direction(self) -> Optional[str]:
        if self.lambda_ == 1:
            return None
        return "-inf" if self.lambda_ > 1 else "+inf"

    @computed_field
    @property
    def passed(self) -> bool:
        return self.direction == self.expected_direction


class DoubleCyclePoint(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    x0: ErrorValue
    tau: Tuple[MpfValue, MpfValue]
    z: Tuple[MpfValue, MpfValue] = Field(exclude=True)  # (Z_1, Z_2) at x0
    residuals: Tuple[ErrorValue, ErrorValue]  # Delta(x0) - x0, Delta'(x0) - 1
    iterations: int

    @computed_field(return_type=Tuple[MpfValue, MpfValue])
    @property
    def direction(self) -> Tuple[mpf, mpf]:
        norm = mp.norm(mp.matrix(list(self.z)))
        return self.z[0] / norm, self.z[1] / norm

    @computed_field(return_type=ErrorValue)
    @property
    def min_ratio(self) -> mpf:
        """min(|Z_1|, |Z_2|) / |Z|: distance of the direction to {z_1 z_2 = 0}."""
        return min(abs(self.z[0]), abs(self.z[1])) / mp.norm(mp.matrix(list(self.z)))


class DoubleCycleReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    points: List[DoubleCyclePoint]
    tolerance: ErrorValue
    precision_bits: int

    @property
    def ratios(self) -> List[mpf]:
        return [p.min_ratio for p in self.points]

    @computed_field
    @property
    def monotone_decreasing(self) -> bool:
        ratios = self.ratios
        return all(b < a for a, b in zip(ratios, ratios[1:]))

    @computed_field
    @property
    def residuals_ok(self) -> bool:
        return all(abs(r) <= self.tolerance for p in self.points for r in p.residuals)

    @computed_field(return_type=Optional[ErrorValue])
    @property
    def final_min_ratio(self) -> Optional[mpf]:
        return self.ratios[-1] if self.points else None


class Command(str, Enum):
    GEN_Q = "gen-q"
    GEN_P = "gen-p"
    VERIFY_LINK = "verify-link"
    VERIFY_SMALL = "verify-small"
    VERIFY_NEWTON = "verify-newton"
    VERIFY_POWERSUM = "verify-powersum"
    SADDLE_LIMITS = "saddle-limits"
    IDENTITY_CHECK = "identity-check"
    DOUBLE_CYCLE_PROBE = "double-cycle-probe"


class OutputFormat(str, Enum):
    JSON = "json"
    TEXT = "text"


class RunConfig(BaseModel):
    """Validated command-line request."""
    command: Command
    n: Optional[int] = None
    l_max: Optional[int] = None
    seed: int
    samples: int
    model_path: Optional[Path] = None
    output: Optional[Path] = None  # None = stdout
    format: OutputFormat = OutputFormat.JSON
    precision_bits: Optional[int] = None
    strict: bool = False  # refuse verify-small runs below the sample floor

    @field_validator("n", "l_max", "samples")
    @classmethod
    def _positive_counts(cls, value: Optional[int], info) -> Optional[int]:
        if value is not None and value < 1:
            raise ValueError(f"{info.field_name} must be >= 1, got {value}")
        return value

    @field_validator("precision_bits")
    @classmethod
    def _enough_bits(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and value < 53:
            raise ValueError(f"precision_bits must be >= 53, got {value}")
        return value

    def echo(self) -> dict:
        """Config as recorded in reports (paths as given, enums by value)."""
        return {
            "command": self.command.value,
            "n": self.n,
            "l_max": self.l_max,
            "seed": self.seed,
            "samples": self.samples,
            "model_path": str(self.model_path) if self.model_path else None,
            "format": self.format.value,
            "precision_bits": self.precision_bits,
            "strict": self.strict,
        }
