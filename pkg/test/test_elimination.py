"""
Tests for resultants, the projective solver, the small-n eliminants,
zero-set sampling and the Newton-identity derivation
"""

import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from polycycle.config import DEFAULT_SAMPLES, MIN_AGREEMENT_SAMPLES
from polycycle.errors import ArgumentError, UnsupportedError
from polycycle.poly_core import MPoly, VariableSpace, lift, pretty, substitute
from polycycle.q_recurrence import (
    big_lambda,
    big_lambda_factors,
    l_general,
    l_general_factors,
    l_small_factors,
    lambda_space,
    m_poly,
    q_family,
)
from polycycle.elimination import (
    diagonal_value,
    eliminant,
    eliminant_agreement,
    eliminant_factors,
    eliminant_n2,
    eliminant_n3,
    eliminant_n4_trace,
    fallback_cross_check,
    has_nontrivial_zero,
    has_nontrivial_zero_on_chart,
    newton_derivation,
    newton_no_common_zero,
    q_system,
    r_display,
    r_display_factors,
    sylvester_resultant,
    zero_set_compare,
)

SEED = 7


def _lambdas(*values):
    return {f"lam{i}": Fraction(v) for i, v in enumerate(values, start=1)}


def _lam(space, i):
    return MPoly.var(space, f"lam{i}")


# Resultants

def test_resultant_of_linear_polynomials():
    space = VariableSpace(1, ("Z",))
    z1 = MPoly.var(space, "z1")
    assert sylvester_resultant(z1 - 1, z1 + 1, "z1") == 2


def test_resultant_of_common_root_vanishes():
    space = VariableSpace(1, ("Z",))
    z1 = MPoly.var(space, "z1")
    assert sylvester_resultant(z1 * z1, z1 * z1, "z1").is_zero()


def test_resultant_rejects_degenerate_inputs():
    space = VariableSpace(1, ("Z",))
    z1 = MPoly.var(space, "z1")
    with pytest.raises(ArgumentError):
        sylvester_resultant(MPoly.zero(space), z1, "z1")
    with pytest.raises(ArgumentError):
        sylvester_resultant(MPoly.constant(space, 3), z1, "z1")


def test_resultant_of_first_two_members_is_r2():
    family = q_family(2, 2)
    a = substitute(family.member(1), {"z2": 1})
    b = substitute(family.member(2), {"z2": 1})
    resultant = lift(sylvester_resultant(a, b, "z1"), lambda_space(2))
    r2 = eliminant_n3()
    assert resultant in (r2, -r2)


# Projective solver

@pytest.mark.parametrize(
    "n,values,expected",
    [
        (2, (1,), True),
        (2, (2,), False),
        (3, (2, 3), False),
        (3, (2, Fraction(1, 2)), True),
        (3, (1, 5), True),
        (3, (Fraction(3, 2), 1), True),
    ],
)
def test_small_systems(n, values, expected):
    assert has_nontrivial_zero(q_system(n, _lambdas(*values))) is expected


@pytest.mark.parametrize(
    "values,expected",
    [
        ((2, 2, 2), False),
        ((2, 1, 3), True),
        ((1, 2, 3), True),
        ((2, Fraction(1, 2), 3), True),
    ],
)
def test_three_variable_systems(values, expected):
    assert has_nontrivial_zero(q_system(4, _lambdas(*values))) is expected


@pytest.mark.parametrize("values", [(2, 3), (2, Fraction(1, 2)), (Fraction(5, 3), Fraction(7, 4))])
def test_chart_choice_does_not_change_verdict(values):
    system = q_system(3, _lambdas(*values))
    assert has_nontrivial_zero_on_chart(system, "z1") == has_nontrivial_zero_on_chart(system, "z2")


@pytest.mark.parametrize("values", [(2, 2, 2), (2, Fraction(1, 2), 3)])
def test_chart_choice_three_variables(values):
    system = q_system(4, _lambdas(*values))
    verdicts = {has_nontrivial_zero_on_chart(system, chart) for chart in ("z1", "z2", "z3")}
    assert len(verdicts) == 1


def test_solver_limited_to_three_variables():
    with pytest.raises(UnsupportedError):
        has_nontrivial_zero(q_system(5, _lambdas(2, 3, 5, 7)))


def test_numeric_system_needs_every_lambda():
    with pytest.raises(ArgumentError):
        has_nontrivial_zero(q_system(3, _lambdas(2)))


# Eliminants

def test_eliminant_n2():
    assert eliminant_n2() == _lam(lambda_space(1), 1) - 1


def test_eliminant_n3_is_display():
    assert eliminant_n3() == r_display(3)
    assert eliminant_n3() == big_lambda(2)


def test_n4_linear_factor():
    trace = eliminant_n4_trace()
    space = trace.linear_factor[0].space
    l1, l2, l3 = (_lam(space, i) for i in (1, 2, 3))
    k2, k3 = trace.linear_factor
    assert k2 == 2 * l1 * l2 * l3 + l2 * l3 - l2 - l3 - 1
    assert k3 == (l3 - 1) * (l1 * l3 - 1)


def test_n4_determinant():
    trace = eliminant_n4_trace()
    space = lambda_space(3)
    l1, l3 = _lam(space, 1), _lam(space, 3)
    expected = -(l3 - 1) * (l1 * l3 - 1) * (l1 * _lam(space, 2) * l3 - 1) * m_poly(1, 2, 3)
    assert trace.determinant == expected


def test_n4_r_star_assembly():
    trace = eliminant_n4_trace()
    product = trace.determinant
    for factor in trace.boundary:
        product = product * factor
    assert trace.r_star == product
    assert len(trace.r_star_factors) == 4


def test_eliminant_dispatch():
    assert eliminant(2) == eliminant_n2()
    assert eliminant(4) == eliminant_n4_trace().r_star
    with pytest.raises(UnsupportedError):
        eliminant(5)


def test_n4_trace_serializes():
    trace = eliminant_n4_trace()
    data = trace.model_dump(mode="json")
    assert set(data) == {"tilde_q", "multipliers", "linear_factor", "reduced_system", "determinant", "boundary"}
    assert len(data["tilde_q"]) == 3
    assert data["determinant"] == pretty(trace.determinant)
    assert data["reduced_system"][1][0] == pretty(trace.reduced_system[1][0])


def test_r_star_zero_set_matches_display():
    report = zero_set_compare(eliminant_factors(4), r_display_factors(4), DEFAULT_SAMPLES, SEED)
    assert report.passed
    assert report.a_vanish_count > 0
    assert report.a_vanish_count < report.sample_count


@pytest.mark.parametrize("n,value", [(2, 1), (3, 3), (4, 5103)])
def test_diagonal_values(n, value):
    assert diagonal_value(n) == value


def test_l_general_from_r2_has_l_small_zero_set():
    report = zero_set_compare(l_general(3, eliminant_n3()), big_lambda_factors(3), 100, SEED)
    assert report.passed


@pytest.mark.parametrize("resultant", ["computed", "display"])
def test_l_general_n4_has_l_small_zero_set(resultant):
    factors = eliminant_factors(4) if resultant == "computed" else r_display_factors(4)
    report = zero_set_compare(l_general_factors(4, factors), l_small_factors(4), DEFAULT_SAMPLES, SEED)
    assert report.passed
    assert 0 < report.b_vanish_count < report.sample_count


# Sampling

def test_zero_set_compare_equal_loci():
    space = lambda_space(2)
    l1, l2 = _lam(space, 1), _lam(space, 2)
    squared = (l1 - 1) * (l1 - 1) * (l2 - 1) * (l1 * l2 - 1)
    report = zero_set_compare(big_lambda(2), squared, 100, SEED)
    assert report.passed
    assert report.disagreements == []
    assert report.structured_count == 50
    assert report.random_count == 50


def test_zero_set_compare_finds_disagreement():
    space = lambda_space(2)
    report = zero_set_compare(_lam(space, 1) - 1, _lam(space, 2) - 1, 40, SEED)
    assert not report.passed
    assert report.disagreements
    assert report.agree_count + len(report.disagreements) == report.sample_count


def test_zero_set_compare_is_deterministic():
    first = zero_set_compare(eliminant_n3(), r_display(3), 60, SEED)
    second = zero_set_compare(eliminant_n3(), r_display(3), 60, SEED)
    assert first == second


def test_zero_set_compare_needs_samples():
    with pytest.raises(ArgumentError):
        zero_set_compare(eliminant_n3(), r_display(3), 0, SEED)


@pytest.mark.parametrize("n", [2, 3])
def test_eliminant_agrees_with_solver(n):
    report = eliminant_agreement(n, MIN_AGREEMENT_SAMPLES, SEED)
    assert report.sample_count == MIN_AGREEMENT_SAMPLES
    assert report.passed
    assert 0 < report.b_vanish_count < report.sample_count


def test_fallback_cross_check():
    report = fallback_cross_check(samples=4, seed=SEED)
    assert report.passed
    assert report.sample_count == 4


def test_agreement_range():
    with pytest.raises(UnsupportedError):
        eliminant_agreement(5, 10, SEED)


# Newton identities

def test_newton_derivation_small():
    derivation = newton_derivation(3)
    space = derivation.sigma_in_power_sums[0].space
    p1, p2, p3 = (MPoly.var(space, f"p{i}") for i in (1, 2, 3))
    assert derivation.sigma_in_power_sums[0] == p1
    assert derivation.sigma_in_power_sums[1] == (p1 * p1 - p2) * Fraction(1, 2)
    assert derivation.sigma_in_power_sums[2] == (p1 ** 3 - 3 * p1 * p2 + 2 * p3) * Fraction(1, 6)
    assert derivation.verdict


@pytest.mark.parametrize("m", [1, 2, 5, 8])
def test_power_sums_force_trivial_zero(m):
    assert newton_no_common_zero(m)


def test_newton_derivation_json():
    data = newton_derivation(2).model_dump(mode="json")
    assert data["verdict"] is True
    assert data["reduced_product"] == "x^2"
    assert data["sigma_in_power_sums"][0] == "p1"
    assert data["steps"][0] == "Newton identities checked for l = 1..2"


def test_newton_needs_positive_m():
    with pytest.raises(ArgumentError):
        newton_derivation(0)
