"""Acceptance suite: every criterion as its own test, at its stated tolerance.

Each test delegates to the corresponding check in parabound.verify (the
same code the `parabound verify` command runs) and prints the one-line
pass/fail detail. Criterion 12 executes the CLI command itself.
"""
import pytest

from parabound import verify
from parabound.cli import main


def _run(check):
    result = check()
    print(f"{'PASS' if result.passed else 'FAIL'}  criterion "
          f"{result.criterion}: {result.name}: {result.detail}")
    assert result.passed, result.detail
    return result


def test_criterion_01_unimodularity():
    _run(verify.check_unimodularity)


def test_criterion_02_normalization():
    _run(verify.check_normalization)


def test_criterion_03_rectangular_oracle():
    _run(verify.check_rectangular_oracle)


def test_criterion_04_hyperbolic_saturation():
    _run(verify.check_hyperbolic_saturation)


def test_criterion_05_dominance_sweep():
    result = _run(verify.check_dominance_sweep)
    assert result.seconds <= 60.0


def test_criterion_06_adiabatic_tightening():
    _run(verify.check_adiabatic_tightening)


def test_criterion_07_frame_independence():
    _run(verify.check_frame_independence)


def test_criterion_08_interaction_split():
    _run(verify.check_interaction_split)


def test_criterion_09_optimizer_contract():
    result = _run(verify.check_optimizer_contract)
    assert result.seconds <= 30.0


def test_criterion_10_integrator_order():
    _run(verify.check_integrator_order)


def test_criterion_11_commuting_reduction():
    _run(verify.check_commuting_reduction)


def test_criterion_12_verify_cli_exits_zero(capsys):
    code = main(["verify"])
    out = capsys.readouterr().out
    assert "criterion" in out
    assert code == 0
