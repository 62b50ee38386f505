import pytest

from conftest import SMALL_PAIRS
from models import verification
from models.errors import BudgetExceededError
from models.groups_iso import IsomorphismReport
from models.ring_core import build_context
from models.verification import CHECKS, CheckResult, VerificationReport, run_verification


def _check(report, name):
    return next(check for check in report.checks if check.name == name)


def test_verification_11_23(ctx_11_23):
    report = run_verification(ctx_11_23, budget=10**6)
    assert report.passed, report.failures
    assert report.complete, report.skipped
    assert [check.name for check in report.checks] == [name for name, _ in CHECKS]
    max_cycle = report.checks[-1]
    assert max_cycle.name == "max_cycle"
    assert max_cycle.informational
    assert max_cycle.status == "INFO"
    assert not max_cycle.passed
    assert "20" in max_cycle.detail


def test_suite_covers_structural_invariants():
    names = {name for name, _ in CHECKS}
    assert {"idempotents", "sqrt_mod_N", "cycle_correspondence", "level_rule", "kernel_tree_shape"} <= names


def test_new_checks_pass_11_23(ctx_11_23):
    report = run_verification(ctx_11_23, budget=10**6)
    for name in ("idempotents", "sqrt_mod_N", "cycle_correspondence", "level_rule", "kernel_tree_shape"):
        assert _check(report, name).status == "OK", _check(report, name)
    assert "[0, 1, 23, 231]" in _check(report, "idempotents").detail


def test_quadratic_checks_over_budget_are_skipped(ctx_29_41):
    report = run_verification(ctx_29_41, budget=ctx_29_41.N)
    groups = _check(report, "group_axioms")
    isomorphisms = _check(report, "isomorphisms")
    assert groups.status == "SKIP" and groups.skipped and not groups.passed
    assert "予算超過で省略" in groups.detail
    assert isomorphisms.status == "SKIP"
    assert "g1" in isomorphisms.detail
    assert report.passed, report.failures
    assert not report.complete
    assert {check.name for check in report.skipped} == {"group_axioms", "isomorphisms"}
    assert groups not in report.failures


def test_crt_homomorphism_runs_when_only_n_fits(ctx_11_23):
    # N = 253 <= 300 < N^2
    report = run_verification(ctx_11_23, budget=300)
    crt = _check(report, "crt_homomorphism")
    assert crt.status == "OK"
    assert not crt.skipped
    assert "253" in crt.detail


def test_failing_crt_report_fails_verification(monkeypatch, ctx_11_23):
    broken = IsomorphismReport(injective=False, surjective=False, multiplicative=False, witnesses={"injective": 0})
    monkeypatch.setattr(verification, "check_crt_homomorphism", lambda ctx, budget=None: broken)
    report = run_verification(ctx_11_23, budget=300)
    crt = _check(report, "crt_homomorphism")
    assert crt.status == "NG"
    assert not report.passed
    assert crt in report.failures


def test_check_result_status():
    assert CheckResult(name="a", passed=True).status == "OK"
    assert CheckResult(name="a", passed=False).status == "NG"
    assert CheckResult(name="a", passed=False, skipped=True).status == "SKIP"
    assert CheckResult(name="a", passed=False, informational=True).status == "INFO"
    report = VerificationReport(s=3, p=7, checks=(CheckResult(name="a", passed=False, skipped=True),))
    assert report.passed
    assert not report.complete
    assert report.failures == []


def test_verification_rejects_large_ring(ctx_11_23):
    with pytest.raises(BudgetExceededError):
        run_verification(ctx_11_23, budget=100)


@pytest.mark.parametrize("s, p", SMALL_PAIRS)
def test_verification_small_pairs(s, p):
    report = run_verification(build_context(s, p), budget=10**6)
    assert report.passed, report.failures
    assert report.complete, report.skipped
