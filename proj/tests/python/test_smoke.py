import math

import pytest

import drstop


def test_thresholds_match_generic():
    spec = drstop.Spec.mean_var_support(1.0, 0.5, 3.0)
    closed = drstop.thresholds(spec, 10)
    generic = drstop.thresholds(spec, 10, method="generic")
    assert len(closed) == 11
    assert closed[-1] == 0.0
    assert closed[1] == pytest.approx(generic[1], abs=1e-9)
    assert max(abs(a - b) for a, b in zip(closed, generic)) <= 1e-9


def test_turning_point():
    r = drstop.turning_point(1.0, 1.3, 5.0, 20)
    assert r["switch_index"] == 15
    assert r["n0"] == 5


def test_moment_bound_certificate():
    c = drstop.moment_bound(drstop.Spec.mean_var_support(1.0, 0.5, 3.0), 1.0)
    assert c["value"] == pytest.approx(5.0 / 6.0, abs=1e-12)
    assert c["regime"] == "middle"
    assert sum(p for _, p in c["atoms"]) == pytest.approx(1.0)
    assert drstop.cox_upper_bound(1.0, 0.5, 3.0, 1.0) == pytest.approx(c["value"])
    assert drstop.verify_certificate(drstop.Spec.mean_mad_support(1.0, 0.5, 4.0), 1.2)["passed"]


def test_mad_breakpoint_diagnostic():
    c = drstop.moment_bound(drstop.Spec.mean_mad_support(1.0, 0.5, 4.0), 0.7)
    assert "breakpoint" in c
    assert c["breakpoint"]["xi1_statement"] > c["breakpoint"]["xi1_proof"]


def test_invalid_spec_raises():
    with pytest.raises(drstop.DrstopError, match="sigma2"):
        drstop.validate(drstop.Spec.mean_var_support(1.0, 1.5, 2.0))
    with pytest.raises(ValueError):
        drstop.thresholds(drstop.Spec.mean_only(-1.0), 3)


def test_witness_is_member():
    spec = drstop.Spec.mean_mad(2.0, 0.7)
    atoms = drstop.witness(spec)
    assert drstop.membership_discrepancy(atoms, spec) <= 1e-12


def test_tail_bounds():
    assert drstop.tail_lower_bound(1.0, 0.5, 3.0, 0.15) == pytest.approx(1.0 / 30.0)
    assert drstop.tail_probability_infimum(1.0, 0.5, 3.0, 0.15) == pytest.approx(1.0 / 33.0)


def test_simulate_is_deterministic():
    spec = drstop.Spec.mean_var_support(1.0, 0.5, 3.0)
    a = drstop.simulate(spec, 5, episodes=20000, seed=3)
    b = drstop.simulate(spec, 5, episodes=20000, seed=3, threads=4)
    assert a == b
    assert abs(a["mean_payoff"] - a["robust_payoff"]) <= 4.0 * a["std_error"]
    c = drstop.simulate(spec, 5, episodes=1000, rule=1.35, nature=drstop.witness(spec))
    assert len(c["selection_histogram"]) == 6
    assert math.isfinite(c["mean_payoff"])
