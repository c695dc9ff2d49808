"""
Tests for the P and Q families and their structural properties
"""

import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent.parent))

from polycycle.errors import ArgumentError, UnsupportedError
from polycycle.poly_core import MPoly, VariableSpace, eval_rational, pretty, substitute
from polycycle.q_recurrence import (
    big_lambda,
    big_lambda_factors,
    check_link_property,
    check_route_equality,
    check_structure,
    combined_second,
    combined_second_closed_form,
    drop_index,
    l_general,
    l_small,
    l_small_factors,
    lambda_space,
    m_poly,
    mu_limit,
    mu_specialize,
    p_family,
    p_initial,
    p_space,
    p_step,
    power_sum_limit,
    power_sum_target,
    q_family,
    q_initial,
    q_step,
)

GOLDEN = Path(__file__).parent / "golden"


def _golden(name: str) -> str:
    return (GOLDEN / name).read_text().strip()


def test_q_second_member_golden():
    assert pretty(q_family(2, 2).member(2)) == _golden("q22.txt")


def test_q_step_matches_family():
    family = q_family(2, 2)
    assert q_step(2, family.member(1)) == family.member(2)
    assert q_step(3, MPoly.zero(q_initial(3).space)).is_zero()


def test_q_step_is_linear():
    family = q_family(3, 2)
    a, b = family.member(1), family.member(2)
    space = a.space
    scale = MPoly.var(space, "lam2") - Fraction(3, 2)
    assert q_step(3, a * 5 + b * scale) == q_step(3, a) * 5 + q_step(3, b) * scale


def test_combined_second_golden():
    assert pretty(combined_second(2)) == _golden("combined_n2.txt")
    assert pretty(combined_second(3)) == _golden("combined_n3.txt")


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_combined_second_closed_form(n):
    assert combined_second(n) == combined_second_closed_form(n)


def test_p_initial():
    space = p_space(2, 1)
    expected = MPoly.var(space, "mu1_1") * MPoly.var(space, "z1") + MPoly.var(space, "mu2_1") * MPoly.var(space, "z2")
    assert p_initial(2) == expected


def test_p_second_member_single_saddle():
    # (mu_11 Z_1)' collapses to mu_12 Z_1^2
    space = p_space(1, 2)
    expected = MPoly.var(space, "mu1_2") * MPoly.var(space, "z1") ** 2
    assert p_family(1, 2).member(2) == expected


def test_p_step_widens_mu_block():
    stepped = p_step(1, p_initial(1))
    assert stepped.space.q_max == 2


def test_mu_limits():
    assert [mu_limit(q) for q in range(1, 6)] == [1, -1, 2, -6, 24]


def test_mu_specialize_single_variable():
    space = p_space(1, 3)
    lam1 = MPoly.var(VariableSpace(1, ("L", "Z")), "lam1")
    assert mu_specialize(MPoly.var(space, "mu1_2")) == (lam1 - 1) * -1
    assert mu_specialize(MPoly.var(space, "mu1_3")) == (lam1 - 1) * 2


@pytest.mark.parametrize("n", [1, 2, 3])
def test_mu_specialize_initial(n):
    assert mu_specialize(p_initial(n)) == q_initial(n)


@pytest.mark.parametrize("n,l_max", [(1, 4), (2, 4), (3, 4), (4, 4)])
def test_route_equality(n, l_max):
    assert check_route_equality(n, l_max)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_structure(n):
    assert check_structure(n, 5) == {"homogeneous": True, "integer_coefficients": True}


@pytest.mark.parametrize("l", [1, 2, 3, 4, 5])
@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_link_property(n, l):
    assert check_link_property(n, l) == {"z_branch": True, "lambda_branch": True}


def test_link_property_needs_two_saddles():
    with pytest.raises(ArgumentError):
        check_link_property(1, 1)


def test_drop_index():
    q22 = q_family(2, 2).member(2)
    reduced = drop_index(substitute(q22, {"z2": 0}), 2, 2)
    assert reduced == q_family(1, 2).member(2)
    with pytest.raises(ArgumentError):
        drop_index(q22, 2, 2)


def test_big_lambda():
    assert len(big_lambda_factors(3)) == 7
    assert eval_rational(big_lambda(2), {"lam1": 2, "lam2": 3}) == 10


def test_m_poly_diagonal():
    assert eval_rational(m_poly(1, 2, 3), {"lam1": 2, "lam2": 2, "lam3": 2}) == 27


def test_l_small():
    assert len(l_small_factors(4)) == 15 + 4
    assert l_small(2) == big_lambda(2)
    with pytest.raises(UnsupportedError):
        l_small_factors(5)


def test_l_general_for_two_saddles():
    # L_2 from R_1 = lam1 - 1 is Lambda_2
    r1 = MPoly.var(lambda_space(1), "lam1") - 1
    assert l_general(2, r1) == big_lambda(2)


def test_l_general_rejects_wrong_arity():
    with pytest.raises(ArgumentError):
        l_general(3, MPoly.var(lambda_space(1), "lam1") - 1)


def test_power_sum_limit_examples():
    space = VariableSpace(2, ("Z",))
    z1, z2 = (MPoly.var(space, name) for name in ("z1", "z2"))
    assert power_sum_limit(3, 1) == z1 + z2
    assert power_sum_limit(3, 2) == -(z1 * z1 + z2 * z2)

    space = VariableSpace(3, ("Z",))
    z1, z2, z3 = (MPoly.var(space, name) for name in ("z1", "z2", "z3"))
    assert power_sum_limit(4, 3) == 2 * (z1 ** 3 + z2 ** 3 + z3 ** 3)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7, 8])
def test_power_sum_limit_all_orders(n):
    for l in range(1, n):
        assert power_sum_limit(n, l) == power_sum_target(n, l)


def test_power_sum_limit_range():
    with pytest.raises(ArgumentError):
        power_sum_limit(3, 3)


def test_q_family_at_lambda_one_vanishes():
    member = q_family(3, 3).member(3)
    assert substitute(member, {"lam1": 1, "lam2": 1, "lam3": 1}).is_zero()


def test_rational_point_evaluation():
    member = q_family(2, 2).member(2)
    value = eval_rational(member, {"lam1": 2, "lam2": 3, "z1": 1, "z2": Fraction(1, 2)})
    # -(1)(1) + (1)(2)(1/2) - (2)(1/4)
    assert value == Fraction(-1, 2)
