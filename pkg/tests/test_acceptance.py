"""Acceptance gate: one test per headline claim the package has to reproduce.

Each test prints a single pass/fail line so the suite output doubles as an
acceptance report (run with -s or read the captured output on failure).
"""

import pytest

from rslsim.acceptance import run_acceptance


@pytest.fixture(scope="module")
def outcomes():
    return {result.name: result for result in run_acceptance("full")}


def _report(result):
    status = "PASS" if result.passed else "FAIL"
    print(f"[{status}] {result.name} ({result.elapsed:.1f}s): {result.details}")
    assert result.passed, f"{result.name}: {result.details}"


def test_acceptance_covers_all_checks(outcomes):
    assert sorted(outcomes) == [
        "bound-validity",
        "dephasing-tightness",
        "depolarisation-hierarchy",
        "nonmonotonic-dephasing",
        "nonmonotonic-depolarisation",
        "numerical-cross-checks",
        "oracle-optimality-and-search",
        "thermalisation",
    ]


def test_dephasing_bounds_are_tight(outcomes):
    _report(outcomes["dephasing-tightness"])


def test_depolarisation_bound_hierarchy(outcomes):
    _report(outcomes["depolarisation-hierarchy"])


def test_nonmonotonic_dephasing_behaviour(outcomes):
    _report(outcomes["nonmonotonic-dephasing"])


def test_nonmonotonic_depolarisation_behaviour(outcomes):
    _report(outcomes["nonmonotonic-depolarisation"])


def test_thermalisation_bounds(outcomes):
    _report(outcomes["thermalisation"])


def test_bound_validity_over_random_scenarios(outcomes):
    _report(outcomes["bound-validity"])


def test_numerical_cross_checks(outcomes):
    _report(outcomes["numerical-cross-checks"])


def test_oracle_optimality_and_search(outcomes):
    _report(outcomes["oracle-optimality-and-search"])
