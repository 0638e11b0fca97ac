import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relprop.verify import (
    SUITES,
    SweepGrid,
    ValidationCase,
    ValidationReport,
    check_klein_gordon,
    check_scaling,
    check_wick,
    cross_validate,
    default_scaling_points,
    hankel_convention_check,
    kg_residual,
    merge_reports,
    run_suite,
)


def _case(report, model=None):
    cases = [c for c in report.cases if model is None or c.inputs.get("model") == model]
    assert cases
    return cases


# ---------------------------------------------------------------- report types

@given(dev=st.floats(0.0, 1.0), tol=st.floats(0.0, 1.0))
def test_case_pass_flag(dev, tol):
    assert ValidationCase({}, "r", dev, tol).passed == (dev <= tol)


def test_report_aggregation_and_serialization():
    cases = [ValidationCase({"x": 1.0}, "a", 1e-3, 1e-2), ValidationCase({"x": 2.0}, "b", 0.5, 0.1)]
    r = ValidationReport("cross", cases, {"s": 1.0})
    assert r.worst_deviation == 0.5
    assert not r.passed and r.failures == [cases[1]]
    d = json.loads(json.dumps(r.to_dict()))
    assert d["n_failed"] == 1 and d["cases"][0]["passed"] is True
    assert ValidationReport("kg", []).worst_deviation == 0.0
    with pytest.raises(ValueError):
        ValidationReport("bogus", [])


def test_merge_reports():
    a = ValidationReport("kg", [ValidationCase({}, "a", 0.0, 1.0)], {"x": 1.0})
    b = ValidationReport("wick", [ValidationCase({}, "b", 2.0, 1.0)], {"y": -1.0})
    m = merge_reports([a, b])
    assert m.suite == "all" and len(m.cases) == 2 and m.sign_calibrations == {"x": 1.0, "y": -1.0}


# ---------------------------------------------------------------- scaling

def test_scaling_identity_is_exact():
    r = check_scaling(1.0, 1.0, default_scaling_points(10))
    assert r.worst_deviation == 0.0


def test_scaling_examples():
    r = check_scaling(1.0, 2.0, [(0.5, 1.0)])
    assert all(c.deviation <= 1e-9 for c in r.cases)
    r = check_scaling(0.5, 10.0, [(3.0, 1.0)])
    assert _case(r, "baeumer")[0].deviation <= 1e-9


def test_scaling_skips_light_cone():
    r = check_scaling(1.0, 2.0, [(1.0, 1.0)])
    assert r.passed and r.cases[0].note == "skipped"


def test_scaling_detects_fault():
    assert not check_scaling(1.0, 2.0, [(0.5, 1.0)], perturb=1e-6).passed


def test_scaling_points_reproducible():
    assert default_scaling_points(20) == default_scaling_points(20)
    for x, t in default_scaling_points(50):
        assert abs(abs(x) - t) > 0.05 * t


# ---------------------------------------------------------------- Wick

def test_wick_example():
    r = check_wick([(2.0, 1.0, 1.0)])
    integral = [c for c in r.cases if "integral" in c.relation]
    closed = [c for c in r.cases if "closed" in c.relation]
    assert len(integral) == len(closed) == 2          # magnitude and phase each
    assert all(c.deviation <= 1e-6 for c in integral)
    assert all(c.deviation <= 1e-12 for c in closed)
    assert r.sign_calibrations["baeumer_outer"] == 1.0


def test_wick_massless():
    r = check_wick([(2.0, 1.0, 0.0)])
    assert r.passed
    assert all(c.deviation <= 1e-12 for c in r.cases if "closed" in c.relation)


def test_wick_requires_outer_region():
    with pytest.raises(ValueError):
        check_wick([(0.5, 1.0, 1.0)])


def test_wick_detects_fault():
    r = check_wick([(2.0, 1.0, 1.0)], perturb=1e-4)
    assert not r.passed


# ---------------------------------------------------------------- Klein-Gordon

def test_kg_order_example():
    r = check_klein_gordon([(0.4, 1.0)], 1.0)
    order_case, residual_case = r.cases
    order = float(order_case.note.split("=")[1])
    assert 1.8 <= order <= 2.2
    assert residual_case.deviation <= 1e-4
    assert r.passed


def test_kg_massless_residual():
    # i t/(pi (x^2 - t^2)) = (i/2pi)[1/(x-t) - 1/(x+t)] is a sum of travelling
    # waves, on which the cross stencil is exact; only rounding remains
    g = 1j / (math.pi * (0.4 ** 2 - 1.0))
    for h in (1e-2, 5e-3, 2.5e-3):
        assert abs(kg_residual(0.4, 1.0, 0.0, h)) <= 1e-10 * abs(g) / h ** 2
    assert check_klein_gordon([(0.4, 1.0), (2.0, 1.0)], 0.0).passed


def test_kg_rejects_cone_points():
    with pytest.raises(ValueError):
        check_klein_gordon([(0.9, 1.0)], 1.0)
    with pytest.raises(ValueError):
        check_klein_gordon([(0.4, 1.0)], 1.0, h_list=(1e-2,))


def test_kg_detects_fault():
    assert not check_klein_gordon([(0.4, 1.0)], 1.0, perturb=1e-3).passed


# ---------------------------------------------------------------- cross validation

def test_cross_small_grid():
    grid = SweepGrid(times=(0.01, 0.32, 2.56), x_fractions=(0.0, 0.5, 0.9, 1.2, 3.0, 5.0))
    r = cross_validate(grid, m_list=(0.0, 1.0))
    assert r.passed
    massless = [c for c in r.cases if c.inputs["m"] == 0.0]
    assert all(c.deviation <= 1e-8 for c in massless)
    series = [c for c in r.cases if "series" in c.relation]
    assert series
    # well inside the validity region the order-10 series is within 1e-3; near
    # its edge (m|x| -> 1) the truncation estimate sets the tolerance
    assert all(c.deviation <= 1e-3 for c in series if c.inputs["x"] * c.inputs["m"] <= 0.5)
    assert all(c.deviation <= c.tolerance for c in series)
    assert "series_phase" in r.sign_calibrations


def test_cross_excludes_cone_band():
    grid = SweepGrid(times=(1.0,), x_fractions=(0.97, 1.0, 1.04, 1.06))
    assert [x for x, _ in grid.points()] == [1.06]


def test_cross_detects_fault():
    grid = SweepGrid(times=(1.0,), x_fractions=(0.5, 2.0))
    assert not cross_validate(grid, m_list=(1.0,), perturb=1e-5, include_series=False).passed


def test_hankel_convention():
    d = hankel_convention_check()
    assert d["hankel2"] < 1e-8 < 0.1 < d["hankel1"]


# ---------------------------------------------------------------- suites

@pytest.mark.parametrize("suite", ["scaling", "wick", "kg"])
def test_default_suites_pass_and_are_reproducible(suite):
    a = run_suite(suite)
    b = run_suite(suite)
    assert a.passed
    assert json.dumps(a.to_dict()) == json.dumps(b.to_dict())


def test_cross_suite_passes():
    r = run_suite("cross")
    assert r.passed
    closed_vs_integral = [c for c in r.cases if "integral" in c.relation and c.inputs["m"] == 1.0]
    assert max(c.deviation for c in closed_vs_integral) <= 1e-6


def test_unknown_suite():
    with pytest.raises(ValueError):
        run_suite("nope")
    assert SUITES[-1] == "all"
