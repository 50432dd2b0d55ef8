"""Property-suite runner: budget accounting, determinism, reporting."""

import numpy as np
import pytest

from deirl.algebra import (CheckResult, SuiteReport, documented_examples,
                           run_property_suite)


def test_default_budget_passes_quickly():
    report = run_property_suite()
    assert report.all_passed, [r.line() for r in report.results
                               if not r.passed]
    assert report.total_cases >= 1000
    assert report.elapsed < 30.0


def test_documented_examples_are_exact():
    examples = documented_examples()
    assert len(examples) == 3
    names = [name for name, _dev, _tol in examples]
    assert any("diag(1,0,-1)" in n for n in names)
    assert any("diag(0,1/2,0)" in n for n in names)
    for name, dev, tol in examples:
        assert dev <= tol, (name, dev)
        assert tol == 1e-12


def test_suite_deterministic_by_seed():
    a = run_property_suite(cases=100, seed=5)
    b = run_property_suite(cases=100, seed=5)
    assert [r.max_dev for r in a.results] == [r.max_dev for r in b.results]


def test_budget_must_cover_every_check():
    with pytest.raises(ValueError, match="per check"):
        run_property_suite(cases=3)


def test_report_lines_flag_failures():
    bad = CheckResult(name="broken", cases=2, tol=1e-10, max_dev=1.0)
    good = CheckResult(name="fine", cases=2, tol=1e-10, max_dev=0.0)
    assert not bad.passed and good.passed
    report = SuiteReport(results=(good, bad), total_cases=4, elapsed=0.01)
    assert not report.all_passed
    lines = report.lines()
    assert any("FAIL" in line for line in lines)
    assert "FAILURES" in lines[-1]
    assert np.isfinite(bad.max_dev)
