"""
P and Q Polynomial Families

Generates the families P_{n,l} (symbolic mu_iq) and Q_{n,l} (mu specialized to
the saddle limits), the operator D_n, and the named polynomials Lambda_n, M,
L_n. Also checks the structural properties of the families: Z-homogeneity,
integer coefficients, the link property, agreement of the two routes and the
power-sum limit at lambda = 1.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

from .errors import ArgumentError, InvariantViolation, StructuralError, UnsupportedError
from .poly_core import (
    MPoly,
    VariableSpace,
    block_of,
    divide_by_monomial,
    divides_monomially,
    has_integer_coefficients,
    is_homogeneous,
    lam,
    lift,
    mu,
    mu_order,
    partial_derivative,
    power_sum,
    product,
    relabel,
    substitute,
    variable_index,
    z,
)

logger = logging.getLogger(__name__)

# l_small has closed forms only up to this n
MAX_CLOSED_FORM_N = 4


def l_space(n: int) -> VariableSpace:
    """Space of the Q family: lambda and z blocks."""
    return VariableSpace(n, ("L", "Z"))


def p_space(n: int, q_max: int) -> VariableSpace:
    """Space of the P family: z and mu blocks."""
    return VariableSpace(n, ("Z", "MU"), q_max)


def lambda_space(n: int) -> VariableSpace:
    return VariableSpace(n, ("L",))


def _check_n(n: int) -> None:
    if not isinstance(n, int) or n < 1:
        raise ArgumentError(f"n must be a positive integer, got {n!r}")


@dataclass(frozen=True)
class PFamily:
    """P_{n,1..l_max} over blocks Z and MU (q_max = l_max)."""
    n: int
    polys: Tuple[MPoly, ...]

    def member(self, l: int) -> MPoly:
        if not 1 <= l <= len(self.polys):
            raise ArgumentError(f"P family has members 1..{len(self.polys)}, asked for {l}")
        return self.polys[l - 1]


@dataclass(frozen=True)
class QFamily:
    """Q_{n,1..l_max} over blocks L and Z."""
    n: int
    polys: Tuple[MPoly, ...]

    def member(self, l: int) -> MPoly:
        if not 1 <= l <= len(self.polys):
            raise ArgumentError(f"Q family has members 1..{len(self.polys)}, asked for {l}")
        return self.polys[l - 1]


def p_initial(n: int) -> MPoly:
    _check_n(n)
    space = p_space(n, 1)
    result = MPoly.zero(space)
    for i in range(1, n + 1):
        result = result + MPoly.var(space, mu(i, 1)) * MPoly.var(space, z(i))
    return result


def _require_blocks(p: MPoly, n: int, blocks: Sequence[str]) -> None:
    if p.space.n != n:
        raise ArgumentError(f"Polynomial lives in {p.space}, expected n={n}")
    for block in blocks:
        if block not in p.space.blocks:
            raise ArgumentError(f"Polynomial lives in {p.space}, block {block} is required")


def p_step(n: int, P: MPoly) -> MPoly:
    """
    Apply the P recurrence once.

    The mu block is widened when P already uses its top order, so that
    mu_{i,q+1} always has a slot.
    """
    _require_blocks(P, n, ("Z", "MU"))
    used_orders = [mu_order(name) for name in P.used_variables() if block_of(name) == "MU"]
    q_needed = max(used_orders, default=0) + 1
    space = P.space if P.space.q_max >= q_needed else P.space.with_q_max(q_needed)
    P = lift(P, space)

    def var(name: str) -> MPoly:
        return MPoly.var(space, name)

    result = MPoly.zero(space)
    for name in P.used_variables():
        if block_of(name) != "MU":
            continue
        i, q = variable_index(name), mu_order(name)
        derivative = partial_derivative(P, name)
        if derivative.is_zero():
            continue
        result = result + (var(name) * q + var(mu(i, q + 1))) * var(z(i)) * derivative

    for i in range(1, n + 1):
        derivative = partial_derivative(P, z(i))
        if derivative.is_zero():
            continue
        coefficient = -var(z(i))
        for j in range(1, i):
            coefficient = coefficient + var(mu(j, 1)) * var(z(j))
        result = result + coefficient * var(z(i)) * derivative
    return result


def mu_limit(q: int) -> int:
    """Saddle limit factor (-1)^(q-1) (q-1)! multiplying (lambda_i - 1)."""
    return (-1) ** (q - 1) * math.factorial(q - 1)


def mu_specialize(P: MPoly) -> MPoly:
    """Substitute mu_iq := (-1)^(q-1) (q-1)! (lambda_i - 1); result over L and Z."""
    if "MU" not in P.space.blocks or "Z" not in P.space.blocks:
        raise ArgumentError(f"mu_specialize expects a polynomial over Z and MU, got {P.space}")
    target = l_space(P.space.n)
    assignments = {}
    for name in P.space.block_variables("MU"):
        i, q = variable_index(name), mu_order(name)
        assignments[name] = (MPoly.var(target, lam(i)) - 1) * mu_limit(q)
    return substitute(P, assignments, target)


@lru_cache(maxsize=None)
def _q_operator(space: VariableSpace) -> Tuple[MPoly, ...]:
    # Coefficient of d/dz_i in D_n: (-z_i + sum_{j<i} (lam_j - 1) z_j) z_i
    coefficients = []
    for i in range(1, space.n + 1):
        coefficient = -MPoly.var(space, z(i))
        for j in range(1, i):
            coefficient = coefficient + (MPoly.var(space, lam(j)) - 1) * MPoly.var(space, z(j))
        coefficients.append(coefficient * MPoly.var(space, z(i)))
    return tuple(coefficients)


def q_step(n: int, Q: MPoly) -> MPoly:
    """Operator D_n: sum_i (-z_i + sum_{j<i} (lam_j - 1) z_j) z_i dQ/dz_i."""
    _require_blocks(Q, n, ("L", "Z"))
    result = MPoly.zero(Q.space)
    for i, coefficient in enumerate(_q_operator(Q.space), start=1):
        derivative = partial_derivative(Q, z(i))
        if not derivative.is_zero():
            result = result + coefficient * derivative
    return result


def q_initial(n: int) -> MPoly:
    _check_n(n)
    space = l_space(n)
    result = MPoly.zero(space)
    for i in range(1, n + 1):
        result = result + (MPoly.var(space, lam(i)) - 1) * MPoly.var(space, z(i))
    return result


@lru_cache(maxsize=None)
def q_family(n: int, l_max: int) -> QFamily:
    _check_n(n)
    if l_max < 1:
        raise ArgumentError(f"l_max must be >= 1, got {l_max}")
    if l_max > 1:
        shorter = q_family(n, l_max - 1)
        polys = shorter.polys + (q_step(n, shorter.polys[-1]),)
    else:
        polys = (q_initial(n),)
    logger.debug(f"Q_{{{n},{l_max}}} has {len(polys[-1].terms)} terms")
    return QFamily(n, polys)


@lru_cache(maxsize=None)
def _p_chain(n: int, l_max: int) -> Tuple[MPoly, ...]:
    if l_max == 1:
        return (p_initial(n),)
    shorter = _p_chain(n, l_max - 1)
    return shorter + (p_step(n, shorter[-1]),)


@lru_cache(maxsize=None)
def p_family(n: int, l_max: int) -> PFamily:
    _check_n(n)
    if l_max < 1:
        raise ArgumentError(f"l_max must be >= 1, got {l_max}")
    space = p_space(n, l_max)
    return PFamily(n, tuple(lift(p, space) for p in _p_chain(n, l_max)))


def combined_second(n: int) -> MPoly:
    """Q_{n,2} + (z_1 + ... + z_n) Q_{n,1}, which equals sum_{i<j} (lam_i lam_j - 1) z_i z_j."""
    family = q_family(n, 2)
    space = l_space(n)
    z_sum = MPoly.zero(space)
    for i in range(1, n + 1):
        z_sum = z_sum + MPoly.var(space, z(i))
    return family.member(2) + z_sum * family.member(1)


def combined_second_closed_form(n: int) -> MPoly:
    space = l_space(n)
    result = MPoly.zero(space)
    for i, j in itertools.combinations(range(1, n + 1), 2):
        pair = MPoly.var(space, lam(i)) * MPoly.var(space, lam(j)) - 1
        result = result + pair * MPoly.var(space, z(i)) * MPoly.var(space, z(j))
    return result


# Named polynomials

def lambda_power(space: VariableSpace, subset: Sequence[int]) -> MPoly:
    """lambda^I - 1 for a nonempty index subset I."""
    return product([MPoly.var(space, lam(i)) for i in subset]) - 1


def big_lambda_factors(n: int) -> List[MPoly]:
    _check_n(n)
    space = lambda_space(n)
    indices = range(1, n + 1)
    return [
        lambda_power(space, subset)
        for size in range(1, n + 1)
        for subset in itertools.combinations(indices, size)
    ]


def big_lambda(n: int) -> MPoly:
    """Lambda_n: product of (lambda^I - 1) over the 2^n - 1 nonempty subsets I."""
    return product(big_lambda_factors(n))


def m_poly(i: int, j: int, k: int, n: int = 0) -> MPoly:
    """M(lam_i, lam_j, lam_k) = 4(lam_i lam_j lam_k - 1) - (lam_i - 1)(lam_j - 1)(lam_k - 1)."""
    space = lambda_space(max(n, i, j, k))
    li, lj, lk = (MPoly.var(space, lam(index)) for index in (i, j, k))
    return (li * lj * lk - 1) * 4 - (li - 1) * (lj - 1) * (lk - 1)


def l_small_factors(n: int) -> List[MPoly]:
    """Factors of the closed form L_n (Lambda_n factors, then the M factors for n = 4)."""
    _check_n(n)
    if n > MAX_CLOSED_FORM_N:
        raise UnsupportedError(f"No closed form for L_n with n = {n} (available for n <= {MAX_CLOSED_FORM_N})")
    factors = big_lambda_factors(n)
    if n == 4:
        factors += [m_poly(i, j, k, n) for i, j, k in itertools.combinations(range(1, 5), 3)]
    return factors


def l_small(n: int) -> MPoly:
    return product(l_small_factors(n))


def _omit_index_mapping(n: int, j: int) -> Dict[str, str]:
    # lam_k of the (n-1)-space goes to the k-th surviving index of 1..n
    survivors = [k for k in range(1, n + 1) if k != j]
    return {lam(k): lam(target) for k, target in enumerate(survivors, start=1)}


def l_general_factors(n: int, resultant_factors: Sequence[MPoly]) -> List[MPoly]:
    """
    Factors of (lam_1...lam_n - 1) * prod_j R(lam with lam_j omitted).

    Args:
        n: Number of saddles (n >= 2)
        resultant_factors: Factors of R, polynomials in n-1 lambda variables

    Raises:
        ArgumentError: factors not over the (n-1)-variable lambda space
    """
    _check_n(n)
    if n < 2:
        raise ArgumentError("l_general needs n >= 2")
    source, target = lambda_space(n - 1), lambda_space(n)
    for factor in resultant_factors:
        if factor.space != source:
            raise ArgumentError(f"Resultant must be a polynomial in {n - 1} lambda variables, got {factor.space}")
    factors = [lambda_power(target, range(1, n + 1))]
    for j in range(1, n + 1):
        mapping = _omit_index_mapping(n, j)
        factors.extend(relabel(factor, mapping, target) for factor in resultant_factors)
    return factors


def l_general(n: int, resultant: MPoly) -> MPoly:
    return product(l_general_factors(n, [resultant]))


# Structural checks

def drop_index(p: MPoly, j: int, n: int) -> MPoly:
    """
    Relabel a polynomial that no longer involves index j into the (n-1)-space.

    Raises:
        ArgumentError: p still uses a variable with index j
    """
    if p.space.n != n:
        raise ArgumentError(f"Expected a polynomial over n={n}, got {p.space}")
    mapping = {}
    for name in p.used_variables():
        if block_of(name) is None:
            continue
        index = variable_index(name)
        if index == j:
            raise ArgumentError(f"{name} survives after eliminating index {j}")
        if index > j:
            if block_of(name) == "MU":
                mapping[name] = mu(index - 1, mu_order(name))
            elif block_of(name) == "L":
                mapping[name] = lam(index - 1)
            else:
                mapping[name] = z(index - 1)
    target = p.space.with_n(n - 1)
    return relabel(p, mapping, target)


def check_structure(n: int, l_max: int) -> Dict[str, bool]:
    """Z-homogeneity of degree l and integer coefficients for Q_{n,1..l_max}."""
    family = q_family(n, l_max)
    homogeneous = all(is_homogeneous(family.member(l), "Z", l) for l in range(1, l_max + 1))
    integral = all(has_integer_coefficients(p) for p in family.polys)
    return {"homogeneous": homogeneous, "integer_coefficients": integral}


def check_link_property(n: int, l: int) -> Dict[str, bool]:
    """
    Both link branches for Q_{n,l}: z_j := 0 and lam_j := 1 give Q_{n-1,l}
    after relabeling, for every j.
    """
    if n < 2:
        raise ArgumentError("The link property relates n to n-1 and needs n >= 2")
    member = q_family(n, l).member(l)
    expected = q_family(n - 1, l).member(l)
    results = {"z_branch": True, "lambda_branch": True}
    for j in range(1, n + 1):
        for branch, assignment in (("z_branch", {z(j): 0}), ("lambda_branch", {lam(j): 1})):
            try:
                reduced = drop_index(substitute(member, assignment), j, n)
            except (ArgumentError, StructuralError):
                logger.warning(f"Link property ({branch}) fails structurally for n={n}, l={l}, j={j}")
                results[branch] = False
                continue
            if reduced != expected:
                logger.warning(f"Link property ({branch}) fails for n={n}, l={l}, j={j}")
                results[branch] = False
    return results


def check_route_equality(n: int, l_max: int) -> bool:
    """mu_specialize(P_{n,l}) == Q_{n,l} for l = 1..l_max."""
    p_members = p_family(n, l_max).polys
    q_members = q_family(n, l_max).polys
    return all(mu_specialize(p) == q for p, q in zip(p_members, q_members))


def power_sum_target(n: int, l: int) -> MPoly:
    """(-1)^(l-1) (l-1)! p_l in the z variables of the (n-1)-space."""
    return power_sum(VariableSpace(n - 1, ("Z",)), l) * mu_limit(l)


def power_sum_limit(n: int, l: int) -> MPoly:
    """
    Limit of Q_{n-1,l} / t at lam_i = 1 + t, t -> 0.

    Raises:
        ArgumentError: l outside 1..n-1
        InvariantViolation: Q_{n-1,l}(1 + t) is not divisible by t
    """
    _check_n(n)
    if not 1 <= l <= n - 1:
        raise ArgumentError(f"power_sum_limit needs 1 <= l <= n-1, got n={n}, l={l}")
    member = q_family(n - 1, l).member(l)
    space = member.space.with_aux("t")
    t = MPoly.var(space, "t")
    shifted = substitute(
        lift(member, space),
        {lam(i): t + 1 for i in range(1, n)},
        space,
    )
    if not divides_monomially(shifted, {"t": 1}):
        raise InvariantViolation(f"Q_{{{n - 1},{l}}} at lambda = 1 + t is not divisible by t")
    reduced = divide_by_monomial(shifted, {"t": 1})
    return substitute(reduced, {"t": 0}, VariableSpace(n - 1, ("Z",)))
