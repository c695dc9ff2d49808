"""
Elimination for the Q-systems

Decides solvability of the homogeneous systems Q_{n-1,l} = 0 (l = 1..n-1) in
complex projective space, reproduces the eliminants for n = 2, 3, 4, compares
vanishing loci on sampled rational points and derives, through the Newton
identities, that vanishing power sums admit only the trivial zero.
"""

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import sympy as sp
from joblib import Parallel, delayed
from sympy.polys.subresultants_qq_zz import sylvester

from .config import (
    FACTOR_SOLVE_ATTEMPTS,
    FALLBACK_CHECK_POINTS,
    MAX_REDRAWS,
    SAMPLE_MAX_DENOMINATOR,
    SAMPLE_UPPER,
    settings,
)
from .errors import ArgumentError, InvariantViolation, StructuralError, UnsupportedError
from .models import Disagreement, EliminationTrace, NewtonDerivation, ZeroSetReport
from .poly_core import (
    MPoly,
    VariableSpace,
    add,
    block_degrees,
    coefficient_of,
    divide_by_monomial,
    divides_monomially,
    elementary_symmetric,
    eval_rational,
    from_sympy_poly,
    is_homogeneous,
    lam,
    lift,
    power_sum,
    pretty,
    product,
    relabel,
    substitute,
    to_sympy_poly,
    z,
)
from .q_recurrence import big_lambda_factors, combined_second, lambda_space, m_poly, q_family, q_step

logger = logging.getLogger(__name__)

MAX_SOLVER_VARIABLES = 3

PolyOrFactors = Union[MPoly, Sequence[MPoly]]


@dataclass(frozen=True)
class HomSystem:
    """Polynomials homogeneous in block Z, optionally with every lambda fixed."""
    polys: Tuple[MPoly, ...]
    lambda_values: Optional[Mapping[str, Fraction]] = None

    def __post_init__(self):
        if not self.polys:
            raise ArgumentError("A system needs at least one polynomial")
        space = self.polys[0].space
        if "Z" not in space.blocks:
            raise ArgumentError(f"System polynomials must have a Z block, got {space}")
        for poly in self.polys:
            if poly.space != space:
                raise StructuralError("All members of a system must share one variable space")
            if len(block_degrees(poly, "Z")) > 1:
                raise ArgumentError(f"Member {pretty(poly)} is not homogeneous in Z")

    @property
    def space(self) -> VariableSpace:
        return self.polys[0].space

    @property
    def z_names(self) -> Tuple[str, ...]:
        return self.space.block_variables("Z")

    @property
    def degrees(self) -> Tuple[int, ...]:
        return tuple((block_degrees(p, "Z") or (0,))[0] for p in self.polys)

    def specialized(self) -> Tuple[MPoly, ...]:
        """Members with lambda fixed, as polynomials over the Z block only."""
        target = VariableSpace(self.space.n, ("Z",))
        values = dict(self.lambda_values or {})
        for poly in self.polys:
            missing = [name for name in poly.used_variables() if name not in target and name not in values]
            if missing:
                raise ArgumentError(f"Numeric system needs values for {', '.join(missing)}")
        assignments = {name: value for name, value in values.items() if name in self.space}
        return tuple(substitute(poly, assignments, target) for poly in self.polys)


def q_system(n: int, lambda_values: Optional[Mapping[str, Fraction]] = None) -> HomSystem:
    """The system Q_{n-1,l} = 0, l = 1..n-1, in n-1 projective coordinates."""
    if n < 2:
        raise ArgumentError(f"The Q-system for n saddles needs n >= 2, got {n}")
    return HomSystem(q_family(n - 1, n - 1).polys, lambda_values)


# Resultants

def _check_resultant_inputs(a: MPoly, b: MPoly, name: str) -> None:
    if a.is_zero() or b.is_zero():
        raise ArgumentError("Sylvester resultant of the zero polynomial is undefined")
    if a.space != b.space:
        raise StructuralError(f"Variable spaces differ: {a.space} vs {b.space}")
    if a.degree_in(name) < 1 or b.degree_in(name) < 1:
        raise ArgumentError(f"Both polynomials need positive degree in {name}")


def sylvester_matrix(a: MPoly, b: MPoly, name: str) -> sp.Matrix:
    _check_resultant_inputs(a, b, name)
    return sylvester(to_sympy_poly(a).as_expr(), to_sympy_poly(b).as_expr(), sp.Symbol(name))


def sylvester_resultant(a: MPoly, b: MPoly, name: str) -> MPoly:
    """Determinant of the Sylvester matrix of a and b in `name`, as a polynomial in the rest."""
    determinant = sp.expand(sylvester_matrix(a, b, name).det(method="bareiss"))
    others = [n for n in a.space.variables if sp.Symbol(n) in determinant.free_symbols]
    if not others:
        value = sp.Rational(determinant)
        return MPoly.constant(a.space, Fraction(int(value.p), int(value.q)))
    return from_sympy_poly(sp.Poly(determinant, *sp.symbols(others), domain=sp.QQ), a.space)


# Projective solvability

def _univariate(p: MPoly, name: str) -> sp.Poly:
    return to_sympy_poly(p, [name])


def _gcd_all(polys: Sequence[sp.Poly]) -> sp.Poly:
    return reduce(sp.gcd, polys)


def _binary_affine(polys: Sequence[MPoly], x: str) -> bool:
    # Univariate polynomials in x; is there a common complex root?
    polys = [p for p in polys if not p.is_zero()]
    if not polys:
        return True
    if any(p.degree_in(x) == 0 for p in polys):
        return False
    if len(polys) == 2:
        return sylvester_resultant(polys[0], polys[1], x).is_zero()
    return _gcd_all([_univariate(p, x) for p in polys]).degree() >= 1


def _projective_zero(polys: Sequence[MPoly], names: Sequence[str]) -> bool:
    """
    Common zero of homogeneous polynomials in projective space over `names`.

    The last name is the chart coordinate: the affine part sets it to 1 and the
    hyperplane where it vanishes is handled by recursion.
    """
    polys = [p for p in polys if not p.is_zero()]
    if not polys:
        return True
    if any(not p.used_variables() for p in polys):
        return False
    if len(names) == 1:
        return False

    chart = names[-1]
    boundary = [substitute(p, {chart: 0}) for p in polys]
    if len(names) == 2:
        if all(p.is_zero() for p in boundary):
            return True
        return _binary_affine([substitute(p, {chart: 1}) for p in polys], names[0])

    if _projective_zero(boundary, names[:-1]):
        return True
    return _ternary_affine([substitute(p, {chart: 1}) for p in polys], names[0], names[1])


def _ternary_affine(polys: Sequence[MPoly], x: str, y: str) -> bool:
    # Common zero in C^2 of polynomials in x, y: eliminate y, then verify
    # every candidate x-factor by back-substitution.
    polys = [p for p in polys if not p.is_zero()]
    if not polys:
        return True
    if any(not p.used_variables() for p in polys):
        return False
    if len(polys) == 1:
        return True
    bivariate = [to_sympy_poly(p, [x, y]) for p in polys]
    if not _gcd_all(bivariate).is_ground:
        return True

    eliminated = [p for p in polys if p.degree_in(y) == 0]
    for a, b in itertools.combinations([p for p in polys if p.degree_in(y) > 0], 2):
        resultant = sylvester_resultant(a, b, y)
        if not resultant.is_zero():
            eliminated.append(resultant)
    if not eliminated:
        logger.debug("All pairwise resultants vanish; deciding by Groebner basis")
        return _groebner_nontrivial(bivariate, x, y)

    candidates = _gcd_all([_univariate(p, x) for p in eliminated])
    if candidates.is_ground:
        return False
    _, factors = candidates.factor_list()
    for factor, _ in factors:
        if factor.degree() == 1:
            lead, tail = factor.all_coeffs()
            root = -sp.Rational(tail) / sp.Rational(lead)
            back = [substitute(p, {x: Fraction(int(root.p), int(root.q))}) for p in polys]
            if _binary_affine(back, y):
                return True
        elif _groebner_nontrivial([factor.as_expr()] + bivariate, x, y):
            return True
        else:
            logger.debug(f"Candidate factor {factor.as_expr()} screened out")
    return False


def _groebner_nontrivial(polys, x: str, y: str) -> bool:
    exprs = [p.as_expr() if isinstance(p, sp.Poly) else p for p in polys]
    basis = sp.groebner(exprs, sp.Symbol(y), sp.Symbol(x), order="lex", domain=sp.QQ)
    return list(basis.exprs) != [1]


def has_nontrivial_zero(system: HomSystem) -> bool:
    """True iff the numeric system has a common zero in CP^{m-1}, m = number of z variables."""
    names = system.z_names
    if len(names) > MAX_SOLVER_VARIABLES:
        raise UnsupportedError(f"Solvability is implemented for at most {MAX_SOLVER_VARIABLES} variables, got {len(names)}")
    return _projective_zero(system.specialized(), names)


def has_nontrivial_zero_on_chart(system: HomSystem, chart: str) -> bool:
    """Same verdict computed with `chart` as the dehomogenizing coordinate."""
    names = list(system.z_names)
    if chart not in names:
        raise StructuralError(f"{chart} is not a z variable of the system")
    if len(names) > MAX_SOLVER_VARIABLES:
        raise UnsupportedError(f"Solvability is implemented for at most {MAX_SOLVER_VARIABLES} variables")
    names.remove(chart)
    return _projective_zero(system.specialized(), names + [chart])


# Eliminants

def r_display_factors(n: int) -> List[MPoly]:
    """Factors of the printed R_{n-1}: Lambda_{n-1} factors, plus M for n = 4."""
    if n not in (2, 3, 4):
        raise UnsupportedError(f"Printed eliminants exist for n = 2, 3, 4, not n = {n}")
    factors = big_lambda_factors(n - 1)
    if n == 4:
        factors.append(m_poly(1, 2, 3))
    return factors


def r_display(n: int) -> MPoly:
    return product(r_display_factors(n))


def eliminant_n2() -> MPoly:
    """R_1: the single member (lam_1 - 1) z_1 has a nonzero root iff its coefficient vanishes."""
    member = q_family(1, 1).member(1)
    return lift(coefficient_of(member, {z(1): 1}), lambda_space(1))


@lru_cache(maxsize=None)
def eliminant_n3() -> MPoly:
    """
    R_2 from Q_21, Q_22.

    Q_22 + (z_1 + z_2) Q_21 = c z_1 z_2. With z_1 z_2 != 0 the system needs
    c = 0; on z_1 = 0 (z_2 = 0) it reduces to the z_2 (z_1) coefficient of Q_21.
    """
    combined = combined_second(2)
    c = coefficient_of(combined, {z(1): 1, z(2): 1})
    if combined != c * MPoly.var(combined.space, z(1)) * MPoly.var(combined.space, z(2)):
        raise InvariantViolation(f"Q_22 + (z1 + z2) Q_21 is not a multiple of z1*z2: {pretty(combined)}")
    q21 = q_family(2, 1).member(1)
    branch_z1 = coefficient_of(q21, {z(1): 0, z(2): 1})
    branch_z2 = coefficient_of(q21, {z(1): 1, z(2): 0})
    return lift(c * branch_z1 * branch_z2, lambda_space(2))


def _linear_coefficients(p: MPoly, names: Sequence[str]) -> List[MPoly]:
    coefficients = [coefficient_of(p, {other: int(other == name) for other in names}) for name in names]
    rebuilt = reduce(add, (c * MPoly.var(p.space, name) for c, name in zip(coefficients, names)), MPoly.zero(p.space))
    if rebuilt != p:
        raise InvariantViolation(f"Expected a linear form in {', '.join(names)}: {pretty(p)}")
    return coefficients


def _pair_boundary(i: int, j: int) -> MPoly:
    return relabel(eliminant_n3(), {lam(1): lam(i), lam(2): lam(j)}, lambda_space(3))


@lru_cache(maxsize=None)
def eliminant_n4_trace() -> EliminationTrace:
    """
    Elimination for Q_31, Q_32, Q_33.

    Q~32 = Q32 + (z1+z2+z3) Q31 = sum (lam_i lam_j - 1) z_i z_j and Q~33 = D_3 Q~32.
    Q~33 - (-z1 - lam2 z2 + (1 - 2 lam3) z3) Q~32 - (Q~32 + (lam2 lam3 - 1) z2 z3) Q31
    equals z1 z3 L(z2, z3) with L linear. Away from z1 z2 z3 = 0, L = 0 fixes
    (z2 : z3); substituting into Q31 and Q~32 / z2 leaves a 2x2 linear system
    in (z1, z2). Its determinant times the pairwise boundary eliminants is R*.
    """
    family = q_family(3, 3)
    space = family.member(1).space
    l1, l2, l3 = (MPoly.var(space, lam(i)) for i in (1, 2, 3))
    z1, z2, z3 = (MPoly.var(space, z(i)) for i in (1, 2, 3))

    tilde1 = family.member(1)
    tilde2 = combined_second(3)
    tilde3 = q_step(3, tilde2)

    first = -z1 - l2 * z2 + (1 - 2 * l3) * z3
    second = tilde2 + (l2 * l3 - 1) * z2 * z3
    combination = tilde3 - first * tilde2 - second * tilde1
    if not divides_monomially(combination, {z(1): 1, z(3): 1}):
        raise InvariantViolation(f"Combination is not divisible by z1*z3: {pretty(combination)}")
    linear = divide_by_monomial(combination, {z(1): 1, z(3): 1})
    if not is_homogeneous(linear, "Z", 1):
        raise InvariantViolation(f"Expected L to be linear in z: {pretty(linear)}")
    _, k2, k3 = _linear_coefficients(linear, [z(1), z(2), z(3)])
    if linear != k2 * z2 + k3 * z3:
        raise InvariantViolation(f"L must not involve z1: {pretty(linear)}")

    # On L = 0: (z2 : z3) = (k3 : -k2)
    on_line = {z(2): k3 * z2, z(3): -k2 * z2}
    first_row = substitute(tilde1, on_line)
    second_row = divide_by_monomial(substitute(tilde2, on_line), {z(2): 1})
    e11, e12, _ = _linear_coefficients(first_row, [z(1), z(2), z(3)])
    e21, e22, _ = _linear_coefficients(second_row, [z(1), z(2), z(3)])
    determinant = lift(e11 * e22 - e12 * e21, lambda_space(3))

    boundary = (_pair_boundary(1, 2), _pair_boundary(1, 3), _pair_boundary(2, 3))
    r_star = determinant * product(list(boundary))
    logger.info(f"R* assembled: determinant has {len(determinant.terms)} terms, R* has {len(r_star.terms)}")
    return EliminationTrace(
        tilde_q=(tilde1, tilde2, tilde3),
        multipliers=(first, second),
        combination=combination,
        linear_factor=(k2, k3),
        reduced_system=((e11, e12), (e21, e22)),
        determinant=determinant,
        boundary=boundary,
        r_star=r_star,
    )


def eliminant_n4() -> MPoly:
    """R* for n = 4; its zero set is compared against the printed R_3."""
    return eliminant_n4_trace().r_star


def eliminant(n: int) -> MPoly:
    if n == 2:
        return eliminant_n2()
    if n == 3:
        return eliminant_n3()
    if n == 4:
        return eliminant_n4()
    raise UnsupportedError(f"Eliminants are computed for n = 2, 3, 4, not n = {n}")


def eliminant_factors(n: int) -> List[MPoly]:
    if n == 4:
        return eliminant_n4_trace().r_star_factors
    return [eliminant(n)]


def diagonal_value(n: int) -> Fraction:
    """Printed R_{n-1} at lam = (2, ..., 2)."""
    return eval_rational(r_display(n), {lam(i): 2 for i in range(1, n)})


# Zero-set sampling

def random_rational(rng: np.random.Generator) -> Fraction:
    """Uniform-ish rational in (0, SAMPLE_UPPER) with denominator <= SAMPLE_MAX_DENOMINATOR."""
    denominator = int(rng.integers(1, SAMPLE_MAX_DENOMINATOR + 1))
    numerator = int(rng.integers(1, SAMPLE_UPPER * denominator))
    return Fraction(numerator, denominator)


def _rational_roots(p: MPoly, name: str) -> Optional[List[Fraction]]:
    # None means p vanishes identically in `name`
    if p.is_zero():
        return None
    poly = _univariate(p, name)
    if poly.degree() < 1:
        return []
    return sorted(Fraction(int(r.p), int(r.q)) for r in poly.ground_roots())


def point_on_factor(
    factor: MPoly,
    names: Sequence[str],
    rng: np.random.Generator,
) -> Optional[Dict[str, Fraction]]:
    """
    A rational point where `factor` vanishes: random values for all but one
    variable, then a rational root in the remaining one.
    """
    used = factor.used_variables()
    if not used:
        return None
    order = sorted(used, key=lambda name: (factor.degree_in(name), factor.space.rank[name]))
    for attempt in range(FACTOR_SOLVE_ATTEMPTS):
        solve_for = order[attempt % len(order)]
        point = {name: random_rational(rng) for name in names if name != solve_for}
        restricted = substitute(factor, {name: point[name] for name in used if name != solve_for})
        roots = _rational_roots(restricted, solve_for)
        if roots is None:
            point[solve_for] = random_rational(rng)
            return point
        if roots:
            point[solve_for] = roots[int(rng.integers(0, len(roots)))]
            return point
    return None


def _as_factors(p: PolyOrFactors) -> List[MPoly]:
    factors = [p] if isinstance(p, MPoly) else list(p)
    if not factors:
        raise ArgumentError("Expected a polynomial or a nonempty list of factors")
    return factors


def _vanishes(factors: Sequence[MPoly], point: Mapping[str, Fraction]) -> bool:
    return any(eval_rational(f, point) == 0 for f in factors)


def _vanishing_pair(a: Sequence[MPoly], b: Sequence[MPoly], point) -> Tuple[bool, bool]:
    return _vanishes(a, point), _vanishes(b, point)


def _format_point(point: Mapping[str, Fraction]) -> Dict[str, str]:
    return {name: str(value) for name, value in point.items()}


def sample_points(
    factors: Sequence[MPoly],
    names: Sequence[str],
    samples: int,
    rng: np.random.Generator,
    accept=None,
) -> Tuple[List[Dict[str, Fraction]], int, int]:
    """
    Structured points (round-robin over factors) followed by random points.

    Args:
        factors: Polynomials to construct points on
        names: Variables every point assigns
        samples: Total number of points
        rng: Seeded generator
        accept: Optional predicate; rejected points are redrawn

    Returns:
        (points, structured count, redrawn count)
    """
    accept = accept or (lambda point: True)
    points: List[Dict[str, Fraction]] = []
    redrawn = 0
    live = [f for f in factors if f.used_variables()]
    structured_target = samples // 2 if live else 0
    index = 0
    while len(points) < structured_target and live:
        factor = live[index % len(live)]
        index += 1
        for _ in range(MAX_REDRAWS):
            point = point_on_factor(factor, names, rng)
            if point is not None and accept(point):
                points.append(point)
                break
            redrawn += 1
            logger.debug(f"Redrawing a point on {pretty(factor)}")
        else:
            logger.info(f"No acceptable rational point found on {pretty(factor)}; dropping factor from the pool")
            live.remove(factor)
    structured = len(points)
    while len(points) < samples:
        point = {name: random_rational(rng) for name in names}
        if accept(point):
            points.append(point)
        else:
            redrawn += 1
            logger.debug(f"Redrawing random point {_format_point(point)}")
    return points, structured, redrawn


def _sample_names(a: Sequence[MPoly], b: Sequence[MPoly]) -> List[str]:
    space = a[0].space
    for p in list(a) + list(b):
        if p.space != space:
            raise StructuralError(f"Zero-set comparison needs one variable space, got {space} and {p.space}")
    used = {name for p in list(a) + list(b) for name in p.used_variables()}
    return [name for name in space.variables if name in used]


def _report(points, verdicts, seed: int, structured: int, redrawn: int) -> ZeroSetReport:
    disagreements = [
        Disagreement(point=_format_point(point), a_vanishes=va, b_vanishes=vb)
        for point, (va, vb) in zip(points, verdicts)
        if va != vb
    ]
    return ZeroSetReport(
        sample_count=len(points),
        agree_count=len(points) - len(disagreements),
        disagreements=disagreements,
        seed=seed,
        structured_count=structured,
        random_count=len(points) - structured,
        a_vanish_count=sum(va for va, _ in verdicts),
        b_vanish_count=sum(vb for _, vb in verdicts),
        redrawn_count=redrawn,
    )


def zero_set_compare(a: PolyOrFactors, b: PolyOrFactors, samples: int, seed: int) -> ZeroSetReport:
    """
    Compare where a and b vanish on sampled rational points.

    a and b may be given as factor lists; a product vanishes iff a factor does,
    and structured points are constructed on every listed factor.
    """
    if samples < 1:
        raise ArgumentError(f"samples must be >= 1, got {samples}")
    a_factors, b_factors = _as_factors(a), _as_factors(b)
    names = _sample_names(a_factors, b_factors)
    rng = np.random.default_rng(seed)
    points, structured, redrawn = sample_points(a_factors + b_factors, names, samples, rng)
    verdicts = Parallel(n_jobs=settings.PARALLEL_JOBS)(
        delayed(_vanishing_pair)(a_factors, b_factors, point) for point in points
    )
    report = _report(points, verdicts, seed, structured, redrawn)
    logger.info(f"Zero sets: {report.agree_count}/{report.sample_count} agree (seed {seed})")
    return report


def sylvester_leading_coefficients(n: int) -> List[MPoly]:
    """Coefficients of the pure powers of the eliminated coordinates in the Q-system for n."""
    system = q_system(n)
    names = system.z_names
    eliminated = names[:-1] if len(names) > 1 else ()
    target = lambda_space(n - 1)
    leading = []
    for poly, degree in zip(system.polys, system.degrees):
        for name in eliminated:
            exps = {other: (degree if other == name else 0) for other in names}
            leading.append(lift(coefficient_of(poly, exps), target))
    return leading


def _solver_vanishes(n: int, point: Mapping[str, Fraction]) -> bool:
    return has_nontrivial_zero(q_system(n, point))


def eliminant_agreement(n: int, samples: int, seed: int) -> ZeroSetReport:
    """
    Vanishing of the eliminant (a) against the direct solver (b) at sampled lambda.

    Points where a leading coefficient of a Sylvester step vanishes are redrawn.
    """
    if n not in (2, 3, 4):
        raise UnsupportedError(f"Agreement checks run for n = 2, 3, 4, not n = {n}")
    factors = eliminant_factors(n)
    names = list(lambda_space(n - 1).variables)
    leading = sylvester_leading_coefficients(n)

    def accept(point) -> bool:
        return all(eval_rational(c, point) != 0 for c in leading)

    rng = np.random.default_rng(seed)
    points, structured, redrawn = sample_points(factors, names, samples, rng, accept)
    verdicts = Parallel(n_jobs=settings.PARALLEL_JOBS)(
        delayed(_eliminant_and_solver)(n, factors, point) for point in points
    )
    report = _report(points, verdicts, seed, structured, redrawn)
    logger.info(
        f"Eliminant vs solver (n={n}): {report.agree_count}/{report.sample_count} agree, "
        f"{report.b_vanish_count} solvable points"
    )
    return report


def _eliminant_and_solver(n: int, factors: Sequence[MPoly], point) -> Tuple[bool, bool]:
    return _vanishes(factors, point), _solver_vanishes(n, point)


def fallback_cross_check(samples: int = FALLBACK_CHECK_POINTS, seed: int = 0) -> ZeroSetReport:
    """R* for n = 4 against the chart-wise solver at a few sampled lambda points."""
    return eliminant_agreement(4, samples, seed)


# Newton identities

def newton_derivation(m: int) -> NewtonDerivation:
    if m < 1:
        raise ArgumentError(f"m must be >= 1, got {m}")
    space = VariableSpace(m, ("Z",), aux=("x",))
    sigma = [elementary_symmetric(space, l) for l in range(m + 1)]
    sums = [None] + [power_sum(space, i) for i in range(1, m + 1)]
    steps = []

    identities_hold = True
    for l in range(1, m + 1):
        rhs = MPoly.zero(space)
        for i in range(1, l + 1):
            rhs = rhs + sigma[l - i] * sums[i] * (-1) ** (i - 1)
        if sigma[l] * l != rhs:
            identities_hold = False
            steps.append(f"Newton identity fails at l={l}")
    steps.append(f"Newton identities checked for l = 1..{m}")

    formal_space = VariableSpace(m, (), aux=tuple(f"p{i}" for i in range(1, m + 1)))
    formal = [MPoly.one(formal_space)]
    for l in range(1, m + 1):
        total = MPoly.zero(formal_space)
        for i in range(1, l + 1):
            total = total + formal[l - i] * MPoly.var(formal_space, f"p{i}") * (-1) ** (i - 1)
        formal.append(total * Fraction(1, l))
        steps.append(f"s{l} = {pretty(formal[l])}")

    as_power_sums = {f"p{i}": sums[i] for i in range(1, m + 1)}
    expressions_match = all(substitute(formal[l], as_power_sums, space) == sigma[l] for l in range(1, m + 1))
    sigma_vanish = all(formal[l].constant_term() == 0 for l in range(1, m + 1))
    if sigma_vanish:
        steps.append("p_1 = ... = p_m = 0 gives s_1 = ... = s_m = 0")

    x = MPoly.var(space, "x")
    lhs = product([x - MPoly.var(space, z(l)) for l in range(1, m + 1)])
    rhs = MPoly.zero(space)
    reduced = MPoly.zero(space)
    for l in range(m + 1):
        sign = (-1) ** l
        rhs = rhs + sigma[l] * x ** (m - l) * sign
        reduced = reduced + x ** (m - l) * (formal[l].constant_term() * sign)
    vieta_holds = lhs == rhs
    steps.append(f"prod (x - z_l) with all s_l = 0 reduces to {pretty(reduced)}")
    return NewtonDerivation(
        m=m,
        identities_hold=identities_hold,
        sigma_in_power_sums=tuple(formal[1:]),
        expressions_match=expressions_match,
        sigma_vanish=sigma_vanish,
        vieta_holds=vieta_holds,
        reduced_product=reduced,
        steps=tuple(steps),
    )


def newton_no_common_zero(m: int) -> bool:
    """True when vanishing power sums p_1..p_m in m variables force the trivial zero."""
    derivation = newton_derivation(m)
    if not derivation.verdict:
        logger.warning(f"Newton derivation did not close for m={m}")
    return derivation.verdict
