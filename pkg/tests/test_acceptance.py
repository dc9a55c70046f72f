"""Acceptance gate: one test per verification criterion.

Each test prints a single PASS/FAIL line (visible with pytest -s or in
the captured output of a failing test) and asserts the criterion.
"""

from mpps import acceptance


def _check(fn):
    res = fn()
    print(res.line())
    assert res.passed, res.line()


def test_criterion_1_pade_coefficient_golden():
    _check(acceptance.check_pade_golden)


def test_criterion_2_ward_block_norms():
    _check(acceptance.check_ward_example)


def test_criterion_3_cost_ratio_formula():
    _check(acceptance.check_cost_ratio)


def test_criterion_4_planner_schedule_reproduction():
    _check(acceptance.check_planner_table1)


def test_criterion_5_nonnormal_diagnostics():
    _check(acceptance.check_nonnormal_diagnostics)


def test_criterion_6_accuracy_suite():
    _check(acceptance.check_accuracy_suite)


def test_criterion_7_bound_containment():
    _check(acceptance.check_bound_containment)


def test_criterion_8_degenerate_equivalence():
    _check(acceptance.check_degenerate_equivalence)


def test_criterion_9_f_constant_recurrence():
    _check(acceptance.check_f_recurrence)
