"""
Exact Sparse Polynomials

Multivariate polynomials with exact rational coefficients over a named
variable space. Blocks are L (lam1..lamn), Z (z1..zn) and MU
(mu{i}_{q}, i = 1..n, q = 1..q_max); auxiliary names may be appended after
the blocks. Every symbolic computation in the package runs on MPoly.
"""

import itertools
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from types import MappingProxyType
from typing import Callable, Dict, Iterable, Mapping, Optional, Sequence, Tuple, Union

import sympy as sp

from .errors import ArgumentError, StructuralError

logger = logging.getLogger(__name__)

BLOCK_ORDER = ("L", "Z", "MU")

_BLOCK_PATTERNS = {
    "L": re.compile(r"^lam(\d+)$"),
    "Z": re.compile(r"^z(\d+)$"),
    "MU": re.compile(r"^mu(\d+)_(\d+)$"),
}
_AUX_PATTERN = re.compile(r"^[A-Za-z][A-Za-z0-9]*$")

Coefficient = Union[int, Fraction]
Monomial = Tuple[Tuple[str, int], ...]
Rational = Union[int, Fraction]


def lam(i: int) -> str:
    return f"lam{i}"


def z(i: int) -> str:
    return f"z{i}"


def mu(i: int, q: int) -> str:
    return f"mu{i}_{q}"


def block_of(name: str) -> Optional[str]:
    """Return the block a variable name belongs to, or None for auxiliary names."""
    for block, pattern in _BLOCK_PATTERNS.items():
        if pattern.match(name):
            return block
    return None


def variable_index(name: str) -> int:
    """Index i of lam{i}, z{i} or mu{i}_{q}."""
    for pattern in _BLOCK_PATTERNS.values():
        match = pattern.match(name)
        if match:
            return int(match.group(1))
    raise StructuralError(f"'{name}' is not an indexed block variable")


def mu_order(name: str) -> int:
    match = _BLOCK_PATTERNS["MU"].match(name)
    if not match:
        raise StructuralError(f"'{name}' is not a mu variable")
    return int(match.group(2))


def _normalize_coefficient(value) -> Coefficient:
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, int):
        return int(value)
    raise ArgumentError(f"Coefficient must be int or Fraction, got {type(value).__name__}")


def as_fraction(value) -> Fraction:
    """Parse an int, Fraction or rational string such as '3/2' exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError as e:
            raise ArgumentError(f"'{value}' is not a rational number") from e
    raise ArgumentError(f"Expected a rational value, got {type(value).__name__}")


@dataclass(frozen=True)
class VariableSpace:
    """Named variable blocks with a fixed total order L < Z < MU < aux."""

    n: int
    blocks: Tuple[str, ...] = ("L", "Z")
    q_max: int = 0
    aux: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.n < 1:
            raise ArgumentError(f"Variable space needs n >= 1, got {self.n}")
        blocks = tuple(self.blocks)
        if len(set(blocks)) != len(blocks) or any(b not in BLOCK_ORDER for b in blocks):
            raise StructuralError(f"Invalid blocks {blocks}")
        if list(blocks) != sorted(blocks, key=BLOCK_ORDER.index):
            raise StructuralError(f"Blocks must follow the order {BLOCK_ORDER}, got {blocks}")
        if "MU" in blocks and self.q_max < 1:
            raise StructuralError("Block MU requires q_max >= 1")
        if "MU" not in blocks and self.q_max != 0:
            raise StructuralError("q_max is only meaningful when block MU is present")
        aux = tuple(self.aux)
        for name in aux:
            if not _AUX_PATTERN.match(name) or block_of(name) is not None:
                raise StructuralError(f"Invalid auxiliary variable name '{name}'")
        if len(set(aux)) != len(aux):
            raise StructuralError(f"Duplicate auxiliary variables in {aux}")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "aux", aux)

    @cached_property
    def variables(self) -> Tuple[str, ...]:
        names = []
        for block in self.blocks:
            names.extend(self.block_variables(block))
        names.extend(self.aux)
        return tuple(names)

    @cached_property
    def rank(self) -> Dict[str, int]:
        return {name: position for position, name in enumerate(self.variables)}

    def block_variables(self, block: str) -> Tuple[str, ...]:
        if block not in self.blocks:
            raise StructuralError(f"Block {block} is not part of {self}")
        if block == "L":
            return tuple(lam(i) for i in range(1, self.n + 1))
        if block == "Z":
            return tuple(z(i) for i in range(1, self.n + 1))
        return tuple(mu(i, q) for i in range(1, self.n + 1) for q in range(1, self.q_max + 1))

    def __contains__(self, name: str) -> bool:
        return name in self.rank

    def with_q_max(self, q_max: int) -> "VariableSpace":
        blocks = self.blocks if "MU" in self.blocks else tuple(sorted(self.blocks + ("MU",), key=BLOCK_ORDER.index))
        return VariableSpace(self.n, blocks, q_max, self.aux)

    def with_aux(self, *names: str) -> "VariableSpace":
        extra = tuple(name for name in names if name not in self.aux)
        return VariableSpace(self.n, self.blocks, self.q_max, self.aux + extra)

    def with_n(self, n: int) -> "VariableSpace":
        return VariableSpace(n, self.blocks, self.q_max, self.aux)

    def to_json(self) -> dict:
        return {"n": self.n, "blocks": list(self.blocks), "q_max": self.q_max, "aux": list(self.aux)}

    @classmethod
    def from_json(cls, data: Mapping) -> "VariableSpace":
        try:
            return cls(
                n=int(data["n"]),
                blocks=tuple(data["blocks"]),
                q_max=int(data.get("q_max", 0)),
                aux=tuple(data.get("aux", ())),
            )
        except KeyError as e:
            raise StructuralError(f"Variable space JSON is missing {e}") from e

    def __str__(self) -> str:
        parts = [f"n={self.n}", "+".join(self.blocks)]
        if self.q_max:
            parts.append(f"q_max={self.q_max}")
        if self.aux:
            parts.append("aux=" + ",".join(self.aux))
        return f"VariableSpace({', '.join(parts)})"


def _sorted_monomial(pairs: Iterable[Tuple[str, int]], rank: Mapping[str, int]) -> Monomial:
    return tuple(sorted(pairs, key=lambda item: rank[item[0]]))


def _mono_mul(a: Monomial, b: Monomial, rank: Mapping[str, int]) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    merged = dict(a)
    for name, exponent in b:
        merged[name] = merged.get(name, 0) + exponent
    return _sorted_monomial(merged.items(), rank)


def _accumulate(target: Dict[Monomial, Coefficient], monomial: Monomial, coefficient) -> None:
    value = target.get(monomial, 0) + coefficient
    if value:
        target[monomial] = value
    else:
        target.pop(monomial, None)


def _mul_terms(a: Mapping, b: Mapping, rank: Mapping[str, int]) -> Dict[Monomial, Coefficient]:
    out: Dict[Monomial, Coefficient] = {}
    for mono_a, coef_a in a.items():
        for mono_b, coef_b in b.items():
            _accumulate(out, _mono_mul(mono_a, mono_b, rank), coef_a * coef_b)
    return out


class MPoly:
    """
    Immutable sparse polynomial over a VariableSpace.

    Terms map canonical monomials (sorted (name, exponent) pairs, no zero
    exponents) to nonzero int or Fraction coefficients, so equal polynomials
    have identical term maps.
    """

    __slots__ = ("_space", "_terms")

    def __init__(self, space: VariableSpace, terms: Optional[Mapping] = None):
        clean: Dict[Monomial, Coefficient] = {}
        rank = space.rank
        for key, value in (terms or {}).items():
            pairs = key.items() if isinstance(key, Mapping) else key
            exps: Dict[str, int] = {}
            for name, exponent in pairs:
                if name not in rank:
                    raise StructuralError(f"Variable '{name}' is not in {space}")
                if not isinstance(exponent, int) or exponent < 0:
                    raise StructuralError(f"Exponent of '{name}' must be a non-negative int, got {exponent!r}")
                if exponent:
                    exps[name] = exps.get(name, 0) + exponent
            _accumulate(clean, _sorted_monomial(exps.items(), rank), _normalize_coefficient(value))
        self._space = space
        self._terms = {m: _normalize_coefficient(c) for m, c in clean.items()}

    @classmethod
    def _raw(cls, space: VariableSpace, terms: Dict[Monomial, Coefficient]) -> "MPoly":
        poly = cls.__new__(cls)
        poly._space = space
        poly._terms = {m: _normalize_coefficient(c) for m, c in terms.items() if c}
        return poly

    @classmethod
    def zero(cls, space: VariableSpace) -> "MPoly":
        return cls._raw(space, {})

    @classmethod
    def constant(cls, space: VariableSpace, value) -> "MPoly":
        return cls._raw(space, {(): _normalize_coefficient(as_fraction(value))})

    @classmethod
    def one(cls, space: VariableSpace) -> "MPoly":
        return cls.constant(space, 1)

    @classmethod
    def var(cls, space: VariableSpace, name: str) -> "MPoly":
        if name not in space:
            raise StructuralError(f"Variable '{name}' is not in {space}")
        return cls._raw(space, {((name, 1),): 1})

    @property
    def space(self) -> VariableSpace:
        return self._space

    @property
    def terms(self) -> Mapping[Monomial, Coefficient]:
        return MappingProxyType(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def used_variables(self) -> Tuple[str, ...]:
        used = {name for mono in self._terms for name, _ in mono}
        return tuple(sorted(used, key=self._space.rank.__getitem__))

    def total_degree(self) -> int:
        return max((sum(e for _, e in mono) for mono in self._terms), default=0)

    def degree_in(self, name: str) -> int:
        if name not in self._space:
            raise StructuralError(f"Variable '{name}' is not in {self._space}")
        return max((dict(mono).get(name, 0) for mono in self._terms), default=0)

    def constant_term(self) -> Coefficient:
        return self._terms.get((), 0)

    def _coerce(self, other) -> "MPoly":
        if isinstance(other, MPoly):
            if other._space != self._space:
                raise StructuralError(f"Variable spaces differ: {self._space} vs {other._space}")
            return other
        if isinstance(other, (int, Fraction)):
            return MPoly.constant(self._space, other)
        raise ArgumentError(f"Cannot combine MPoly with {type(other).__name__}")

    def __add__(self, other) -> "MPoly":
        other = self._coerce(other)
        out = dict(self._terms)
        for mono, coef in other._terms.items():
            _accumulate(out, mono, coef)
        return MPoly._raw(self._space, out)

    __radd__ = __add__

    def __neg__(self) -> "MPoly":
        return MPoly._raw(self._space, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "MPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "MPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "MPoly":
        if isinstance(other, (int, Fraction)):
            factor = _normalize_coefficient(other)
            if not factor:
                return MPoly.zero(self._space)
            return MPoly._raw(self._space, {m: c * factor for m, c in self._terms.items()})
        other = self._coerce(other)
        return MPoly._raw(self._space, _mul_terms(self._terms, other._terms, self._space.rank))

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "MPoly":
        if not isinstance(exponent, int) or exponent < 0:
            raise ArgumentError(f"Exponent must be a non-negative int, got {exponent!r}")
        result = MPoly.one(self._space)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = MPoly.constant(self._space, other)
        if not isinstance(other, MPoly):
            return NotImplemented
        return self._space == other._space and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self._space, frozenset(self._terms.items())))

    def __repr__(self) -> str:
        return f"MPoly({pretty(self)!r}, {self._space})"

    def __str__(self) -> str:
        return pretty(self)


def add(a: MPoly, b: MPoly) -> MPoly:
    return a + b


def mul(a: MPoly, b: MPoly) -> MPoly:
    return a * b


def product(factors: Sequence[MPoly], space: Optional[VariableSpace] = None) -> MPoly:
    """Multiply a nonempty list of polynomials (or return 1 in `space`)."""
    if not factors:
        if space is None:
            raise ArgumentError("An empty product needs an explicit space")
        return MPoly.one(space)
    return reduce(mul, factors)


def partial_derivative(p: MPoly, name: str) -> MPoly:
    if name not in p.space:
        raise StructuralError(f"Variable '{name}' is not in {p.space}")
    out: Dict[Monomial, Coefficient] = {}
    for mono, coef in p.terms.items():
        exps = dict(mono)
        exponent = exps.get(name, 0)
        if not exponent:
            continue
        if exponent == 1:
            del exps[name]
        else:
            exps[name] = exponent - 1
        _accumulate(out, _sorted_monomial(exps.items(), p.space.rank), coef * exponent)
    return MPoly._raw(p.space, out)


def lift(p: MPoly, space: VariableSpace) -> MPoly:
    """Re-home p into another space that contains every variable p uses."""
    if space == p.space:
        return p
    rank = space.rank
    for name in p.used_variables():
        if name not in rank:
            raise StructuralError(f"Variable '{name}' is not in target {space}")
    return MPoly._raw(space, {_sorted_monomial(mono, rank): c for mono, c in p.terms.items()})


def substitute(
    p: MPoly,
    assignments: Mapping[str, Union[MPoly, Rational]],
    space: Optional[VariableSpace] = None,
) -> MPoly:
    """
    Simultaneous substitution of variables by polynomials or rationals.

    Args:
        p: Polynomial to substitute into
        assignments: Variable name -> MPoly over the target space, or rational
        space: Target space (defaults to p.space); unassigned variables of p
               must exist in it

    Returns:
        The substituted polynomial over the target space

    Raises:
        StructuralError: unknown assignment target, value over another space,
                         or an unassigned variable missing from the target
    """
    target = space or p.space
    values: Dict[str, MPoly] = {}
    for name, value in assignments.items():
        if name not in p.space:
            raise StructuralError(f"Cannot substitute '{name}': not in {p.space}")
        if isinstance(value, MPoly):
            if value.space != target:
                raise StructuralError(f"Value for '{name}' lives in {value.space}, expected {target}")
            values[name] = value
        else:
            values[name] = MPoly.constant(target, as_fraction(value))

    rank = target.rank
    powers: Dict[Tuple[str, int], Dict[Monomial, Coefficient]] = {}

    def power(name: str, exponent: int) -> Dict[Monomial, Coefficient]:
        key = (name, exponent)
        if key not in powers:
            powers[key] = (values[name] ** exponent)._terms
        return powers[key]

    out: Dict[Monomial, Coefficient] = {}
    for mono, coef in p.terms.items():
        partial: Dict[Monomial, Coefficient] = {(): coef}
        rest = []
        for name, exponent in mono:
            if name in values:
                partial = _mul_terms(partial, power(name, exponent), rank)
                if not partial:
                    break
            elif name in rank:
                rest.append((name, exponent))
            else:
                raise StructuralError(f"Unassigned variable '{name}' is not in target {target}")
        if not partial:
            continue
        rest_mono = _sorted_monomial(rest, rank)
        for sub_mono, sub_coef in partial.items():
            _accumulate(out, _mono_mul(sub_mono, rest_mono, rank), sub_coef)
    return MPoly._raw(target, out)


def relabel(p: MPoly, mapping: Mapping[str, str], space: VariableSpace) -> MPoly:
    """Rename variables (a substitution by single variables)."""
    return substitute(p, {old: MPoly.var(space, new) for old, new in mapping.items()}, space)


def evaluate(p: MPoly, point: Mapping[str, object], convert: Optional[Callable] = None):
    """
    Evaluate p at a point in any numeric ring.

    Coefficients are passed through `convert` first (e.g. to mpmath numbers).
    """
    convert = convert or (lambda c: c)
    missing = [name for name in p.used_variables() if name not in point]
    if missing:
        raise StructuralError(f"Point does not assign {', '.join(missing)}")
    powers: Dict[Tuple[str, int], object] = {}
    total = convert(0)
    for mono, coef in p.terms.items():
        term = convert(coef)
        for name, exponent in mono:
            key = (name, exponent)
            if key not in powers:
                powers[key] = point[name] ** exponent
            term = term * powers[key]
        total = total + term
    return total


def eval_rational(p: MPoly, point: Mapping[str, Rational]) -> Fraction:
    exact = {name: as_fraction(value) for name, value in point.items()}
    return Fraction(evaluate(p, exact))


def _block_degree(mono: Monomial, names: frozenset) -> int:
    return sum(e for name, e in mono if name in names)


def is_homogeneous(p: MPoly, block: str, degree: int) -> bool:
    names = frozenset(p.space.block_variables(block))
    return all(_block_degree(mono, names) == degree for mono in p.terms)


def block_degrees(p: MPoly, block: str) -> Tuple[int, ...]:
    names = frozenset(p.space.block_variables(block))
    return tuple(sorted({_block_degree(mono, names) for mono in p.terms}))


def has_integer_coefficients(p: MPoly) -> bool:
    return all(isinstance(c, int) for c in p.terms.values())


def coefficients(p: MPoly, names: Sequence[str]) -> Dict[Monomial, MPoly]:
    """Split p by monomials in `names`; values are polynomials in the remaining variables."""
    selected = frozenset(names)
    for name in selected:
        if name not in p.space:
            raise StructuralError(f"Variable '{name}' is not in {p.space}")
    grouped: Dict[Monomial, Dict[Monomial, Coefficient]] = {}
    for mono, coef in p.terms.items():
        key = tuple(pair for pair in mono if pair[0] in selected)
        rest = tuple(pair for pair in mono if pair[0] not in selected)
        grouped.setdefault(key, {})[rest] = coef
    return {key: MPoly._raw(p.space, terms) for key, terms in grouped.items()}


def coefficient_of(p: MPoly, exps: Mapping[str, int]) -> MPoly:
    """Coefficient of the monomial `exps` (in exactly those variables) as a polynomial in the rest."""
    key = _sorted_monomial(((n, e) for n, e in exps.items() if e), p.space.rank)
    return coefficients(p, list(exps)).get(key, MPoly.zero(p.space))


def divides_monomially(p: MPoly, exps: Mapping[str, int]) -> bool:
    return all(dict(mono).get(name, 0) >= e for mono in p.terms for name, e in exps.items())


def divide_by_monomial(p: MPoly, exps: Mapping[str, int]) -> MPoly:
    if not divides_monomially(p, exps):
        raise ArgumentError(f"{pretty(p)} is not divisible by the monomial {dict(exps)}")
    out: Dict[Monomial, Coefficient] = {}
    for mono, coef in p.terms.items():
        reduced = dict(mono)
        for name, e in exps.items():
            if e:
                reduced[name] -= e
        out[_sorted_monomial(((n, e) for n, e in reduced.items() if e), p.space.rank)] = coef
    return MPoly._raw(p.space, out)


def power_sum(space: VariableSpace, l: int, block: str = "Z") -> MPoly:
    """p_l = sum of l-th powers of a block's variables."""
    return MPoly._raw(space, {((name, l),): 1 for name in space.block_variables(block)})


def elementary_symmetric(space: VariableSpace, l: int, block: str = "Z") -> MPoly:
    """sigma_l of a block's variables; sigma_0 = 1."""
    names = space.block_variables(block)
    terms = {tuple((name, 1) for name in combo): 1 for combo in itertools.combinations(names, l)}
    return MPoly._raw(space, terms)


# Serialization

def _canonical_key(mono: Monomial, rank: Mapping[str, int], width: int):
    dense = [0] * width
    for name, exponent in mono:
        dense[rank[name]] = exponent
    return (-sum(dense), tuple(-e for e in dense))


def sorted_terms(p: MPoly):
    """Terms in graded lexicographic order, largest first."""
    rank, width = p.space.rank, len(p.space.variables)
    return sorted(p.terms.items(), key=lambda item: _canonical_key(item[0], rank, width))


def to_json(p: MPoly) -> dict:
    terms = []
    for mono, coef in sorted_terms(p):
        value = Fraction(coef)
        terms.append({
            "exps": {name: exponent for name, exponent in mono},
            "num": str(value.numerator),
            "den": str(value.denominator),
        })
    return {"space": p.space.to_json(), "terms": terms}


def from_json(data: Mapping) -> MPoly:
    space = VariableSpace.from_json(data["space"])
    terms = {}
    for term in data["terms"]:
        mono = tuple(term["exps"].items())
        terms[mono] = Fraction(int(term["num"]), int(term["den"]))
    return MPoly(space, terms)


def _format_monomial(mono: Monomial) -> str:
    return "*".join(name if e == 1 else f"{name}^{e}" for name, e in mono)


def pretty(p: MPoly) -> str:
    """Human-readable form: sorted monomials, explicit signs, e.g. 'lam1*z1 - z1'."""
    if p.is_zero():
        return "0"
    pieces = []
    for position, (mono, coef) in enumerate(sorted_terms(p)):
        magnitude = abs(coef)
        if not mono:
            body = str(magnitude)
        elif magnitude == 1:
            body = _format_monomial(mono)
        else:
            body = f"{magnitude}*{_format_monomial(mono)}"
        if position == 0:
            pieces.append(f"-{body}" if coef < 0 else body)
        else:
            pieces.append(f"{'-' if coef < 0 else '+'} {body}")
    return " ".join(pieces)


# sympy bridge

def to_sympy_poly(p: MPoly, names: Optional[Sequence[str]] = None) -> sp.Poly:
    """Convert to a sympy Poly over QQ in the given generators (default: all of p's space)."""
    names = tuple(names or p.space.variables)
    position = {name: i for i, name in enumerate(names)}
    for name in p.used_variables():
        if name not in position:
            raise StructuralError(f"Variable '{name}' is not among the generators {names}")
    data = {}
    for mono, coef in p.terms.items():
        dense = [0] * len(names)
        for name, exponent in mono:
            dense[position[name]] = exponent
        value = Fraction(coef)
        data[tuple(dense)] = sp.Rational(value.numerator, value.denominator)
    gens = sp.symbols(names)
    if not data:
        return sp.Poly(0, *gens, domain=sp.QQ)
    return sp.Poly.from_dict(data, *gens, domain=sp.QQ)


def from_sympy_poly(poly: sp.Poly, space: VariableSpace) -> MPoly:
    names = [str(g) for g in poly.gens]
    for name in names:
        if name not in space:
            raise StructuralError(f"Generator '{name}' is not in {space}")
    terms = {}
    for monom, coeff in poly.terms():
        rational = sp.Rational(coeff)
        mono = tuple((names[i], e) for i, e in enumerate(monom) if e)
        terms[mono] = Fraction(int(rational.p), int(rational.q))
    return MPoly(space, terms)
