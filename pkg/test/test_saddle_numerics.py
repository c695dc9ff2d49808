"""
Tests for the saddle-map numerics: compositions, limit probes, the derivative
identity and the double-cycle family
"""

import sys
from fractions import Fraction
from pathlib import Path

import pytest
from mpmath import mp, mpf
from pydantic import ValidationError

sys.path.insert(0, str(Path(__file__).parent.parent))

from polycycle.errors import ArgumentError, DomainError, PrecisionExhausted
from polycycle.models import PolycycleModel, SaddleModel, decimal_string
from polycycle.q_recurrence import mu_limit
from simulation.config import DEFAULT_X0, IDENTITY_MAX_ORDER, IDENTITY_RANDOM_MODELS
from simulation.double_cycle import double_cycle_family_probe
from simulation.jet import Jet, to_mpf
from simulation.probes import (
    divergence_probe_n1,
    finite_difference_check,
    geometric_sequence,
    identity_check,
    mu_limit_probe,
    richardson_geometric,
    saddle_limits,
    with_escalation,
)
from simulation.saddle_maps import builtin_model, chain, jet_of_map, mu_values, random_models

ACCEPTANCE = mpf("1e-8")


def _model(*saddles, **settings) -> PolycycleModel:
    return PolycycleModel(saddles=tuple(SaddleModel(**s) for s in saddles), **settings)


def _close(a, b, bits=200):
    return abs(a - b) <= mpf(2) ** (-bits) * max(abs(b), mpf(1))


# Models

def test_model_from_json():
    model = PolycycleModel.model_validate_json(
        '{"saddles": [{"lambda": "3/2", "corrections": ["1/2"]}, {"lambda": 2, "c": "1/3", "sign": -1}]}'
    )
    assert model.n == 2
    assert model.saddles[0].lambda_ == Fraction(3, 2)
    assert model.saddles[0].corrections == (Fraction(1, 2),)
    assert model.saddles[1].c == Fraction(1, 3)
    assert model.precision_bits == 256


@pytest.mark.parametrize(
    "saddle",
    [
        {"lambda": 0},
        {"lambda": "-1/2"},
        {"lambda": 1.5},
        {"lambda": "abc"},
        {"lambda": 2, "sign": 0},
        {"lambda": 2, "c": 0},
    ],
)
def test_invalid_saddles(saddle):
    with pytest.raises(ValidationError):
        _model(saddle)


def test_jet_order_covers_n():
    with pytest.raises(ValidationError):
        _model({"lambda": 2}, {"lambda": 3}, jet_order=2)
    with pytest.raises(ValidationError):
        PolycycleModel(saddles=())


def test_random_models_are_seeded():
    assert random_models(4, 11) == random_models(4, 11)
    assert all(1 <= m.n <= 4 for m in random_models(10, 3))


# Maps and chains

def test_map_value_and_slope():
    saddle = SaddleModel(**{"lambda": "1/2", "c": 2})
    with mp.workprec(256):
        jet = jet_of_map(saddle, Jet.variable(4, 2))
        assert _close(jet.value, mpf(4))
        assert _close(jet.derivs[1], mpf(1) / 2)


def test_map_rejects_nonpositive_argument():
    saddle = SaddleModel(**{"lambda": 2})
    with pytest.raises(DomainError):
        jet_of_map(saddle, Jet.variable(0, 2))


def test_correction_radius():
    saddle = SaddleModel(**{"lambda": 2, "corrections": ["-1"]})
    with pytest.raises(DomainError):
        jet_of_map(saddle, Jet.variable(Fraction(3, 5), 2))


@pytest.mark.parametrize("lambda_", ["3/2", "2", "1/3"])
def test_pure_power_mu_values_are_exact(lambda_):
    saddle = SaddleModel(**{"lambda": lambda_, "c": 3})
    with mp.workprec(256):
        values = mu_values(saddle, Fraction(1, 10), 5)
        for q, value in enumerate(values, start=1):
            assert _close(value, mu_limit(q) * (to_mpf(Fraction(lambda_)) - 1))


def test_chain_single_pure_power():
    model = _model({"lambda": "3/2"})
    result = chain(model, Fraction(1, 10))
    assert _close(result.Z[0], mpf(10))
    with mp.workprec(256):
        for q in range(1, 6):
            assert _close(result.mu_at(1, q), mu_limit(q) * mpf("0.5"))


def test_chain_first_derivative_identity():
    model = builtin_model("identity-check")
    result = chain(model, Fraction(1, 10))
    with mp.workprec(model.precision_bits):
        expected = result.mu_at(1, 1) * result.Z[0] + result.mu_at(2, 1) * result.Z[1]
        assert _close(result.D[1], expected)


def test_pure_power_chain_closed_form():
    lambdas = [Fraction(3, 2), Fraction(2), Fraction(1, 3)]
    cs = [Fraction(2), Fraction(3), Fraction(1, 2)]
    model = _model(*({"lambda": str(l), "c": str(c)} for l, c in zip(lambdas, cs)))
    result = chain(model, DEFAULT_X0)
    with mp.workprec(256):
        x = to_mpf(DEFAULT_X0)
        scale, exponent = mpf(1), mpf(1)
        for i, (lambda_, c) in enumerate(zip(lambdas, cs), start=1):
            # F_i = c_i * F_{i-1}^lambda_i
            scale = to_mpf(c) * scale ** to_mpf(lambda_)
            exponent = exponent * to_mpf(lambda_)
            assert _close(result.F[i].value, scale * x ** exponent)
            assert _close(result.F[i].derivs[1], scale * exponent * x ** (exponent - 1))


def test_affine_chain_has_vanishing_derivatives():
    model = _model({"lambda": 1, "tau": "1/3"}, {"lambda": 1, "tau": "1/5"}, {"lambda": 1})
    result = chain(model, DEFAULT_X0)
    assert all(d == 0 for d in result.D[1:])
    assert all(result.mu_at(i, q) == 0 for i in range(1, 4) for q in range(1, 6))
    report = identity_check(model, DEFAULT_X0, 4)
    assert all(value == 0 for value in report.polynomial_values)
    assert all(value == 0 for value in report.finite_difference_values)
    assert report.passed


def test_chain_names_failing_stage():
    model = _model({"lambda": 2, "sign": -1}, {"lambda": 2})
    with pytest.raises(DomainError) as exc_info:
        chain(model, Fraction(1, 10))
    assert exc_info.value.stage == 2
    assert "Stage 2" in str(exc_info.value)


# Derivative identity

def test_identity_builtin_model():
    report = identity_check(builtin_model("identity-check"), Fraction(1, 10), 4)
    assert report.passed
    assert len(report.errors) == 4


def test_identity_random_models():
    models = random_models(IDENTITY_RANDOM_MODELS, 2024)
    assert len(models) == 50
    for model in models:
        report = identity_check(model, DEFAULT_X0, min(model.jet_order - 1, IDENTITY_MAX_ORDER))
        assert report.passed, report.model_dump(mode="json")


def test_identity_tolerance():
    model = builtin_model("identity-check")
    report = identity_check(model, DEFAULT_X0, 4)
    assert report.tolerance == mpf(2) ** -236
    assert report.max_error <= report.tolerance
    wide = identity_check(model.model_copy(update={"precision_bits": 400}), DEFAULT_X0, 4)
    assert wide.tolerance == mpf(2) ** -380
    assert wide.passed


@pytest.mark.parametrize("name", ["identity-check", "saddle-limits"])
def test_jet_derivatives_match_finite_differences(name):
    model = builtin_model(name)
    result = chain(model, DEFAULT_X0)
    differences = finite_difference_check(model, DEFAULT_X0, 4)
    assert len(differences) == 4
    with mp.workprec(model.precision_bits):
        for l, fd in enumerate(differences, start=1):
            assert abs(result.D[l] - fd) <= mpf("1e-6") * max(abs(fd), mpf(1))


def test_identity_report_carries_finite_differences():
    report = identity_check(builtin_model("saddle-limits"), DEFAULT_X0, 3)
    assert len(report.finite_difference_values) == 3
    assert all(e <= report.finite_difference_tolerance for e in report.finite_difference_errors)
    data = report.model_dump(mode="json")
    assert data["passed"] is True
    assert len(data["finite_difference_errors"]) == 3


def test_identity_order_range():
    with pytest.raises(ArgumentError):
        identity_check(builtin_model("identity-check"), Fraction(1, 10), 6)


# Limit probes

def test_geometric_sequence():
    points = geometric_sequence(Fraction(1, 10), Fraction(1, 2), 3)
    assert points == [mpf(1) / 10, mpf(1) / 20, mpf(1) / 40]
    with pytest.raises(ArgumentError):
        geometric_sequence(1, 2, 5)


def test_richardson_removes_polynomial_terms():
    with mp.workprec(256):
        ratio = Fraction(1, 2)
        points = geometric_sequence(Fraction(1, 10), ratio, 10)
        values = [3 + 2 * x + 5 * x * x for x in points]
        assert abs(richardson_geometric(values, ratio) - 3) < mpf("1e-40")


def test_mu_probe_pure_power():
    model = _model({"lambda": "3/2"})
    report = mu_limit_probe(model, 1, 2)
    with mp.workprec(256):
        assert all(_close(e, mpf(-1) / 2) for e in report.estimates)
    assert report.error < ACCEPTANCE


def test_mu_probe_with_corrections():
    model = _model({"lambda": "3/2", "corrections": ["1/2"]})
    report = mu_limit_probe(model, 1, 2)
    assert abs(report.extrapolated - mpf(-1) / 2) < ACCEPTANCE
    # the raw estimates carry an O(y^2) error the extrapolation removes
    assert abs(report.estimates[0] - report.target) > ACCEPTANCE


@pytest.mark.parametrize("q", [1, 2, 3, 4])
def test_mu_probe_three_corrections(q):
    model = _model({"lambda": "5/2", "c": "3/2", "corrections": ["1/3", "-1/4", "1/5"]})
    report = mu_limit_probe(model, 1, q)
    with mp.workprec(256):
        assert _close(report.target, mu_limit(q) * mpf("1.5"))
    assert report.error < ACCEPTANCE


@pytest.mark.parametrize("q", [1, 2, 3])
def test_mu_probe_lambda_one(q):
    model = _model({"lambda": 1, "corrections": ["1/2"]})
    report = mu_limit_probe(model, 1, q)
    assert report.target == 0
    assert abs(report.extrapolated) < ACCEPTANCE


def test_mu_probe_ranges():
    model = _model({"lambda": 2})
    with pytest.raises(ArgumentError):
        mu_limit_probe(model, 1, 6)
    with pytest.raises(ArgumentError):
        mu_limit_probe(model, 2, 1)


def test_builtin_saddle_limits():
    results = saddle_limits(builtin_model("saddle-limits"))
    assert len(results["mu_limits"]) == 3 * 5
    assert all(p.error < ACCEPTANCE for p in results["mu_limits"])
    assert all(r.passed for r in results["divergence"] + results["controls"])


@pytest.mark.parametrize("lambda_,direction", [("2", "-inf"), ("1/2", "+inf"), ("3", "-inf")])
def test_divergence_direction(lambda_, direction):
    report = divergence_probe_n1(_model({"lambda": lambda_}))
    assert report.direction == direction
    assert report.passed


def test_divergence_control_is_bounded():
    report = divergence_probe_n1(_model({"lambda": 1, "c": 2}))
    assert not report.diverges
    assert report.direction is None
    assert report.passed


def test_divergence_single_saddle_only():
    with pytest.raises(ArgumentError):
        divergence_probe_n1(builtin_model("identity-check"))


# Reports

def test_decimal_string_keeps_precision():
    with mp.workprec(256):
        third = mpf(1) / 3
        text = decimal_string(third)
        assert abs(mpf(text) - third) < mpf(2) ** -250
    assert decimal_string(mpf("0.5")) == "0.5"


def test_reports_serialize_with_decimal_strings():
    report = mu_limit_probe(_model({"lambda": "3/2"}), 1, 1)
    data = report.model_dump(mode="json")
    assert data["q"] == 1
    assert data["target"] == "-0.5"
    assert mpf(data["error"]) < ACCEPTANCE
    assert len(data["estimates"]) == len(report.estimates)
    assert all(isinstance(value, str) for value in data["points"])

    divergence = divergence_probe_n1(_model({"lambda": 2})).model_dump(mode="json", by_alias=True)
    assert divergence["lambda"] == "2"
    assert divergence["direction"] == "-inf"
    assert divergence["passed"] is True


# Precision escalation

def test_escalation_settles():
    values, bits = with_escalation(lambda bits: [mpf(1) if bits >= 512 else mpf(bits)], 256)
    assert bits == 512
    assert values == [1]


def test_escalation_not_needed():
    values, bits = with_escalation(lambda bits: [mpf(1) / 3], 256)
    assert bits == 256


def test_escalation_exhausted():
    with pytest.raises(PrecisionExhausted):
        with_escalation(lambda bits: [mpf(bits)], 256)


# Double-cycle family

def test_double_cycle_family():
    report = double_cycle_family_probe(builtin_model("double-cycle-probe"))
    assert len(report.points) == 6
    assert report.monotone_decreasing
    assert report.residuals_ok
    assert report.ratios[-1] < mpf("1e-2")


def test_double_cycle_requires_lambda_product_not_one():
    with pytest.raises(ArgumentError):
        double_cycle_family_probe(_model({"lambda": 2}, {"lambda": "1/2"}))


def test_double_cycle_requires_two_saddles():
    with pytest.raises(ArgumentError):
        double_cycle_family_probe(_model({"lambda": 2}))
