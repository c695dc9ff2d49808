"""
Polycycle Command Line

Every verification as a subcommand with a JSON or text report on stdout (or
--out) and stable exit codes: 0 when all checks pass, 1 on a verification
failure, 2 on usage, domain or model-file errors.

Usage:
    python -m polycycle.main gen-q --n 2 --l 2
    python -m polycycle.main verify-small --n 4 --samples 1000 --seed 7
    python -m polycycle.main saddle-limits --model model.json --precision-bits 512
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

from mpmath import mpf
from pydantic import BaseModel, ValidationError

from simulation.config import DEFAULT_X0, IDENTITY_MAX_ORDER, IDENTITY_RANDOM_MODELS
from simulation.double_cycle import double_cycle_family_probe
from simulation.probes import identity_check, saddle_limits
from simulation.saddle_maps import builtin_model, random_models

from . import __version__
from .config import DEFAULT_SAMPLES, DEFAULT_SEED, FALLBACK_CHECK_POINTS, MIN_AGREEMENT_SAMPLES, settings
from .elimination import (
    diagonal_value,
    eliminant,
    eliminant_agreement,
    eliminant_factors,
    eliminant_n4_trace,
    fallback_cross_check,
    newton_derivation,
    r_display,
    r_display_factors,
    zero_set_compare,
)
from .errors import (
    ArgumentError,
    ConvergenceError,
    DomainError,
    InvariantViolation,
    PrecisionExhausted,
    StructuralError,
    UnsupportedError,
)
from .models import Command, OutputFormat, PolycycleModel, RunConfig, ZeroSetReport
from .poly_core import pretty, to_json
from .q_recurrence import (
    check_link_property,
    check_route_equality,
    check_structure,
    combined_second,
    combined_second_closed_form,
    l_general,
    l_general_factors,
    l_small,
    l_small_factors,
    mu_specialize,
    p_family,
    power_sum_limit,
    power_sum_target,
    q_family,
)

logger = logging.getLogger(__name__)

REPORT_SCHEMA = 1
MU_LIMIT_ACCEPTANCE = "1e-8"
DOUBLE_CYCLE_RATIO_BOUND = "1e-2"

Payload = Tuple[bool, dict]


# Report helpers

def _dump(record: BaseModel) -> dict:
    return record.model_dump(mode="json", by_alias=True)


def _zero_set_json(report: ZeroSetReport, theorem: str) -> dict:
    return {"theorem": theorem, **_dump(report)}


def _mark(ok: bool) -> str:
    return "✓" if ok else "❌"


# Symbolic commands

def _gen_q(config: RunConfig) -> Payload:
    n, l_max = config.n or 2, config.l_max or 2
    family = q_family(n, l_max)
    structure = check_structure(n, l_max)
    combined = combined_second(n)
    combined_ok = combined == combined_second_closed_form(n)
    logger.info(f"Q_{{{n},1..{l_max}}} generated {_mark(all(structure.values()))}")
    payload = {
        "polys": [
            {"l": l, "pretty": pretty(p), "total_degree": p.total_degree(), "poly": to_json(p)}
            for l, p in enumerate(family.polys, start=1)
        ],
        "combined_second": pretty(combined),
        "combined_second_matches": combined_ok,
        "structure": structure,
    }
    return all(structure.values()) and combined_ok, payload


def _gen_p(config: RunConfig) -> Payload:
    n, l_max = config.n or 1, config.l_max or 2
    family = p_family(n, l_max)
    specialized = [mu_specialize(p) == q for p, q in zip(family.polys, q_family(n, l_max).polys)]
    payload = {
        "polys": [
            {"l": l, "pretty": pretty(p), "total_degree": p.total_degree(), "poly": to_json(p)}
            for l, p in enumerate(family.polys, start=1)
        ],
        "specializes_to_q": specialized,
    }
    return all(specialized), payload


def _verify_link(config: RunConfig) -> Payload:
    n_max, l_max = config.n or 4, config.l_max or 4
    cases = []
    passed = True
    for n in range(1, n_max + 1):
        case = {"n": n, "structure": check_structure(n, l_max)}
        if n >= 2:
            case["link"] = [{"l": l, **check_link_property(n, l)} for l in range(1, l_max + 1)]
        if n <= 4:
            case["route_equality"] = check_route_equality(n, min(l_max, 4))
        ok = (
            all(case["structure"].values())
            and all(entry["z_branch"] and entry["lambda_branch"] for entry in case.get("link", []))
            and case.get("route_equality", True)
        )
        logger.info(f"n={n}: structure, link and routes {_mark(ok)}")
        passed = passed and ok
        cases.append(case)
    return passed, {"cases": cases}


def _verify_small(config: RunConfig) -> Payload:
    n = config.n or 3
    if n not in (2, 3, 4):
        raise UnsupportedError(f"verify-small covers n = 2, 3, 4, got n = {n}")
    if config.samples < MIN_AGREEMENT_SAMPLES:
        message = f"verify-small uses at least {MIN_AGREEMENT_SAMPLES} sample points, got --samples {config.samples}"
        if config.strict:
            raise ArgumentError(message)
        logger.warning(message)
    payload: dict = {
        "n": n,
        "eliminant": pretty(eliminant(n)) if n < 4 else None,
        "sample_floor_met": config.samples >= MIN_AGREEMENT_SAMPLES,
    }
    checks: List[bool] = []

    if n < 4:
        exact = eliminant(n) == r_display(n)
        payload["eliminant_matches_display"] = exact
        checks.append(exact)
        agreement = eliminant_agreement(n, config.samples, config.seed)
        payload["solver_agreement"] = _zero_set_json(agreement, f"solver_n{n}")
        both_cases = agreement.b_vanish_count > 0 and agreement.b_vanish_count < agreement.sample_count
        payload["solver_agreement"]["both_cases_sampled"] = both_cases
        checks += [agreement.passed, both_cases]
        if n == 2:
            exact_genericity = l_general(2, eliminant(2)) == l_small(2)
            payload["l_general_equals_l_small"] = exact_genericity
            checks.append(exact_genericity)
    else:
        trace = eliminant_n4_trace()
        payload["trace"] = _dump(trace)
        comparison = zero_set_compare(eliminant_factors(4), r_display_factors(4), config.samples, config.seed)
        payload["zero_sets"] = _zero_set_json(comparison, "small_n4")
        fallback = fallback_cross_check(min(config.samples, FALLBACK_CHECK_POINTS), config.seed)
        payload["solver_agreement"] = _zero_set_json(fallback, "solver_n4")
        checks += [comparison.passed, fallback.passed]

    genericity = zero_set_compare(
        l_general_factors(n, r_display_factors(n)), l_small_factors(n), config.samples, config.seed
    )
    payload["l_small"] = _zero_set_json(genericity, f"small_n{n}" if n < 4 else "l_small_n4")
    checks.append(genericity.passed)

    diagonal = diagonal_value(n)
    payload["diagonal_value"] = str(diagonal)
    checks.append(diagonal != 0)
    logger.info(f"n={n}: eliminant and closed form {_mark(all(checks))}")
    return all(checks), payload


def _verify_newton(config: RunConfig) -> Payload:
    m_max = config.n or 8
    derivations = [newton_derivation(m) for m in range(1, m_max + 1)]
    for derivation in derivations:
        logger.info(f"m={derivation.m}: {_mark(derivation.verdict)}")
    return all(d.verdict for d in derivations), {"derivations": [_dump(d) for d in derivations]}


def _verify_powersum(config: RunConfig) -> Payload:
    n_max = config.n or 8
    results = []
    for n in range(2, n_max + 1):
        for l in range(1, n):
            limit = power_sum_limit(n, l)
            ok = limit == power_sum_target(n, l)
            results.append({"n": n, "l": l, "limit": pretty(limit), "matches": ok})
    return all(r["matches"] for r in results), {"cases": results}


# Numeric commands

def resolve_precision(config: RunConfig, model: PolycycleModel) -> int:
    """--precision-bits > POLYCYCLE_PRECISION_BITS (if set) > model file > default."""
    if config.precision_bits is not None:
        return config.precision_bits
    if "PRECISION_BITS" in settings.model_fields_set:
        return settings.PRECISION_BITS
    return model.precision_bits


def load_model(config: RunConfig) -> PolycycleModel:
    if config.model_path is None:
        model = builtin_model(config.command.value)
    else:
        try:
            text = Path(config.model_path).read_text(encoding="utf-8")
        except OSError as e:
            raise ArgumentError(f"Cannot read model file {config.model_path}: {e}") from e
        model = PolycycleModel.model_validate_json(text)
    bits = resolve_precision(config, model)
    return model.model_copy(update={"precision_bits": bits})


def _saddle_limits(config: RunConfig) -> Payload:
    model = load_model(config)
    results = saddle_limits(model)
    bound = mpf(MU_LIMIT_ACCEPTANCE)
    probes_ok = all(p.error <= bound for p in results["mu_limits"])
    divergence_ok = all(r.passed for r in results["divergence"] + results["controls"])
    logger.info(f"Saddle limits {_mark(probes_ok)}, divergence and controls {_mark(divergence_ok)}")
    payload = {
        "precision_bits": model.precision_bits,
        "mu_limits": [_dump(p) for p in results["mu_limits"]],
        "divergence": [_dump(r) for r in results["divergence"]],
        "controls": [_dump(r) for r in results["controls"]],
    }
    return probes_ok and divergence_ok, payload


def _identity_check(config: RunConfig) -> Payload:
    model = load_model(config)
    models = [model]
    if config.model_path is None:
        models += random_models(IDENTITY_RANDOM_MODELS, config.seed, precision_bits=model.precision_bits)
    reports = []
    for candidate in models:
        l_max = config.l_max or min(candidate.jet_order - 1, IDENTITY_MAX_ORDER)
        reports.append(identity_check(candidate, DEFAULT_X0, l_max))
    passed = all(r.passed for r in reports)
    logger.info(f"Identity checked on {len(reports)} models {_mark(passed)}")
    return passed, {"precision_bits": model.precision_bits, "models": [_dump(r) for r in reports]}


def _double_cycle_probe(config: RunConfig) -> Payload:
    model = load_model(config)
    report = double_cycle_family_probe(model)
    passed = (
        report.monotone_decreasing
        and report.residuals_ok
        and bool(report.points)
        and report.ratios[-1] < mpf(DOUBLE_CYCLE_RATIO_BOUND)
    )
    logger.info(f"Double-cycle family {_mark(passed)}")
    return passed, _dump(report)


HANDLERS: Dict[Command, Callable[[RunConfig], Payload]] = {
    Command.GEN_Q: _gen_q,
    Command.GEN_P: _gen_p,
    Command.VERIFY_LINK: _verify_link,
    Command.VERIFY_SMALL: _verify_small,
    Command.VERIFY_NEWTON: _verify_newton,
    Command.VERIFY_POWERSUM: _verify_powersum,
    Command.SADDLE_LIMITS: _saddle_limits,
    Command.IDENTITY_CHECK: _identity_check,
    Command.DOUBLE_CYCLE_PROBE: _double_cycle_probe,
}


# Rendering

def envelope(config: RunConfig, passed: bool, payload: dict) -> dict:
    report = {
        "schema": REPORT_SCHEMA,
        "version": __version__,
        "command": config.command.value,
        "config": config.echo(),
        "seed": config.seed,
        "verdict": "pass" if passed else "fail",
    }
    report.update(payload)
    return report


def _render_lines(value, indent: int, lines: List[str]) -> None:
    pad = "  " * indent
    if isinstance(value, dict):
        for key, item in value.items():
            if isinstance(item, (dict, list)) and item and not _is_flat(item):
                lines.append(f"{pad}{key}:")
                _render_lines(item, indent + 1, lines)
            else:
                lines.append(f"{pad}{key}: {_flat(item)}")
    elif isinstance(value, list):
        for position, item in enumerate(value, start=1):
            if isinstance(item, (dict, list)) and not _is_flat(item):
                lines.append(f"{pad}[{position}]")
                _render_lines(item, indent + 1, lines)
            else:
                lines.append(f"{pad}- {_flat(item)}")


def _is_flat(value) -> bool:
    if isinstance(value, list):
        return all(not isinstance(item, (dict, list)) for item in value)
    return False


def _flat(value) -> str:
    if isinstance(value, list):
        return ", ".join(_flat(item) for item in value)
    if isinstance(value, dict):
        return "{}"
    if value is None:
        return "-"
    return str(value)


def render(report: dict, output_format: OutputFormat) -> str:
    if output_format == OutputFormat.TEXT:
        lines: List[str] = []
        _render_lines(report, 0, lines)
        return "\n".join(lines) + "\n"
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def _emit(text: str, config: RunConfig) -> None:
    if config.output is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        Path(config.output).write_text(text, encoding="utf-8")
        logger.info(f"Report written to {config.output}")


def run(config: RunConfig) -> int:
    """
    Execute one command and write its report.

    Returns:
        0 when every check passes, 1 on a verification failure, 2 on usage or domain errors
    """
    logger.info("=" * 60)
    logger.info(f"{config.command.value} (seed {config.seed})")
    logger.info("=" * 60)
    try:
        passed, payload = HANDLERS[config.command](config)
    except (ArgumentError, UnsupportedError, DomainError, StructuralError) as e:
        logger.error(f"{config.command.value}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ValidationError as e:
        logger.error(f"Invalid model file: {e}")
        print(f"error: invalid model file: {e}", file=sys.stderr)
        return 2
    except (ConvergenceError, PrecisionExhausted, InvariantViolation) as e:
        logger.error(f"{config.command.value}: {e}")
        details = {"type": type(e).__name__, "message": str(e)}
        if isinstance(e, ConvergenceError):
            details["residuals"] = e.residuals
        _emit(render(envelope(config, False, {"error": details}), config.format), config)
        return 1
    except Exception as e:
        logger.error(f"Unexpected failure in {config.command.value}: {e}", exc_info=True)
        raise

    _emit(render(envelope(config, passed, payload), config.format), config)
    logger.info(f"{config.command.value} finished: {'pass ✓' if passed else 'fail ❌'}")
    return 0 if passed else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=None, help="Number of saddles (or m for verify-newton)")
    common.add_argument("--l", dest="l_max", type=int, default=None, help="Highest family member l")
    common.add_argument(
        "--samples",
        type=int,
        default=DEFAULT_SAMPLES,
        help=f"Sample points for zero-set comparisons (default: {DEFAULT_SAMPLES})",
    )
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"Random seed (default: {DEFAULT_SEED})")
    common.add_argument("--model", dest="model_path", type=Path, default=None, help="JSON model file")
    common.add_argument("--out", dest="output", type=Path, default=None, help="Report file (default: stdout)")
    common.add_argument(
        "--format",
        choices=[f.value for f in OutputFormat],
        default=OutputFormat.JSON.value,
        help="Report format (default: json)",
    )
    common.add_argument(
        "--precision-bits",
        type=int,
        default=None,
        help="Working precision for saddle commands (overrides POLYCYCLE_PRECISION_BITS and the model file)",
    )
    common.add_argument(
        "--strict",
        action="store_true",
        help=f"Refuse verify-small runs below {MIN_AGREEMENT_SAMPLES} samples instead of warning",
    )

    parser = argparse.ArgumentParser(
        prog="polycycle",
        description="Polynomial families, eliminants and saddle-map numerics for hyperbolic polycycles",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    descriptions = {
        Command.GEN_Q: "Generate Q_{n,1..l} and the combined second member",
        Command.GEN_P: "Generate P_{n,1..l} and check their specialization",
        Command.VERIFY_LINK: "Homogeneity, integer coefficients, link property and route equality",
        Command.VERIFY_SMALL: "Eliminants and closed forms for n = 2, 3, 4",
        Command.VERIFY_NEWTON: "Newton-identity derivation for m = 1..n",
        Command.VERIFY_POWERSUM: "Power-sum limits at lambda = 1",
        Command.SADDLE_LIMITS: "Saddle-map derivative limits, divergence and control",
        Command.IDENTITY_CHECK: "Jet derivatives of ln Delta' against P_{n,l}",
        Command.DOUBLE_CYCLE_PROBE: "Double-cycle family for two saddles",
    }
    for command, help_text in descriptions.items():
        subparsers.add_parser(command.value, parents=[common], help=help_text, description=help_text)
    return parser


def parse_config(argv: Optional[List[str]] = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    return RunConfig(
        command=args.command,
        n=args.n,
        l_max=args.l_max,
        seed=args.seed,
        samples=args.samples,
        model_path=args.model_path,
        output=args.output,
        format=args.format,
        precision_bits=args.precision_bits,
        strict=args.strict,
    )


def main(argv: Optional[List[str]] = None) -> int:
    try:
        config = parse_config(argv)
    except SystemExit as e:
        return int(e.code or 0)
    except ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return run(config)
