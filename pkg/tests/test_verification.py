"""
Verification Harness Tests
==========================

Registry, report shape and one run of every suite at a small budget.
"""

import json

import pytest

from src.core.config import BudgetConfig
from src.core.errors import NotBijection
from src.core.verification import (
    PLANTED_DEFECTS,
    REPORT_COLUMNS,
    CheckContext,
    RegisteredCheck,
    Suite,
    VerificationReport,
    quasi_isometry_distortion,
    registered_checks,
    run_check,
    run_suites,
)


def test_registry_covers_every_suite():
    for suite in Suite:
        assert registered_checks(suite), suite
    names = [c.name for c in registered_checks()]
    assert len(names) == len(set(names))
    assert all(c.anchor for c in registered_checks())


def test_registry_accepts_suite_names():
    assert registered_checks("cyclic") == registered_checks(Suite.CYCLIC)
    with pytest.raises(ValueError):
        registered_checks("bogus")


def test_replacement_suite_contents():
    names = {c.name for c in registered_checks(Suite.REPLACEMENT)}
    assert {"airplane_figure_data", "basilica_counts", "planted_defects", "axioms_hold"} <= names


def test_context_rng_is_deterministic():
    context = CheckContext(BudgetConfig(), seed=7)
    assert context.rng("a").random() == context.rng("a").random()
    assert context.rng("a").random() != context.rng("b").random()


@pytest.mark.parametrize("suite", [s.value for s in Suite])
def test_suite_passes_at_small_budget(suite, small_budget):
    report = run_suites(suite, small_budget, seed=0)
    assert report.results
    assert report.ok, report.to_text()
    assert all(r.suite == suite for r in report.results)


@pytest.mark.parametrize("error", [NotBijection("not onto"), RuntimeError("no room"), ZeroDivisionError("zero"), KeyError("k")])
def test_raising_check_becomes_failure(small_budget, error):
    def broken(context):
        raise error

    check = RegisteredCheck("broken", Suite.CYCLIC, "always raises", broken)
    result = run_check(check, CheckContext(small_budget))
    assert not result.passed
    assert result.detail.startswith(type(error).__name__)
    assert result.suite == "cyclic"


def test_report_views(small_budget):
    def good(context):
        return True, "fine"

    def bad(context):
        return False, "nope"

    context = CheckContext(small_budget, seed=3)
    results = [
        run_check(RegisteredCheck("good", Suite.TREES, "a", good), context),
        run_check(RegisteredCheck("bad", Suite.TREES, "b", bad), context),
        run_check(RegisteredCheck("other", Suite.CYCLIC, "c", good), context),
    ]
    report = VerificationReport(results, small_budget, seed=3)
    assert not report.ok
    assert report.failures == ["bad"]
    assert list(report.frame.columns) == REPORT_COLUMNS
    summary = report.summary()
    assert summary.loc["trees", "passed"] == 1
    assert summary.loc["trees", "total"] == 2
    assert summary.loc["cyclic", "passed"] == 1
    data = json.loads(json.dumps(report.to_json()))
    assert data["ok"] is False
    assert data["seed"] == 3
    assert data["budget"]["radius"] == small_budget.radius
    assert len(data["checks"]) == 3
    assert report.to_csv().splitlines()[0] == ",".join(REPORT_COLUMNS)
    assert report.to_text().endswith("2 of 3 checks passed")


def test_empty_report_summary(small_budget):
    report = VerificationReport([], small_budget)
    assert report.ok
    assert report.summary().empty


def test_planted_defects_are_named_fixtures():
    assert set(PLANTED_DEFECTS) == {"airplane_extra_contact", "rabbit_missing_loop", "airplane_red_ends"}
    for factory, which, condition in PLANTED_DEFECTS.values():
        assert which in {"rabbit", "airplane"}
        assert factory().name
        assert condition in {"density", "separation", "disjointness", "order"}


def test_quasi_isometry_distortion_small():
    passed, detail = quasi_isometry_distortion(3, 3, 2)
    assert passed, detail
