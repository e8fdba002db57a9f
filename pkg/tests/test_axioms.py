import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from thetafix import (BAction, EPS_STRICT, EPS_TOL, IntervalDomain, SamplePlan, SequencePlan,
                      SimulationFunction, ThetaMetricSpace, check_b_action, check_simulation,
                      check_theta_metric, finite_space, make_b_action, make_simulation)
from thetafix.axioms import HOLDS, VIOLATED, _find_partner, zeta3_tail_max

SMALL = SamplePlan(grid_step=0.5, grid_upper=5.0, n_random=20, domain_points=11)


def _reproduce_b(action, axiom, w):
    """Re-evaluate a B-action witness from scratch; True if it still violates."""
    f = action.eval
    if axiom == "B1":
        if w["s"] == 0 and w["t"] == 0:
            return float(f(0.0, 0.0)) != 0
        return float(f(w["s"], w["t"])) != float(f(w["t"], w["s"]))
    if axiom == "B2":
        s, t, u, v = w["s"], w["t"], w["u"], w["v"]
        premise = (s < u and t <= v) or (s <= u and t < v)
        return premise and not float(f(s, t)) <= float(f(u, v)) - EPS_STRICT
    if axiom == "B3":
        r, s = w["r"], w["s"]
        ts = np.linspace(0, r, 10001)
        return np.min(np.abs(np.asarray(f(ts, np.full_like(ts, s))) - r)) > EPS_TOL
    if axiom == "B4":
        return float(f(w["s"], 0.0)) > w["s"] + EPS_TOL
    raise AssertionError(axiom)


@pytest.mark.parametrize("kind", ["sum", "euclid", "product-sum", "sqrt-sum"])
def test_catalog_actions_hold(kind):
    rep = check_b_action(make_b_action(kind))
    assert rep.ok, [(v.axiom, v.witness) for v in rep.verdicts if not v.holds]
    assert [v.axiom for v in rep.verdicts] == ["B1", "B2", "B3", "B4"]


def test_shifted_sum_breaks_b1():
    bad = BAction("shifted", lambda s, t: s + t + 1)
    rep = check_b_action(bad, SMALL)
    v = rep["B1"]
    assert v.verdict == VIOLATED
    assert (v.witness["s"], v.witness["t"], v.witness["theta_st"]) == (0.0, 0.0, 1.0)
    assert _reproduce_b(bad, "B1", v.witness)


def test_asymmetric_action_breaks_b1():
    bad = BAction("lopsided", lambda s, t: 2 * s + t)
    v = check_b_action(bad, SMALL)["B1"]
    assert v.verdict == VIOLATED
    assert _reproduce_b(bad, "B1", v.witness)


def test_b4_violation():
    bad = BAction("double", lambda s, t: 2 * (s + t))
    v = check_b_action(bad, SMALL)["B4"]
    assert v.verdict == VIOLATED
    assert _reproduce_b(bad, "B4", v.witness)


def test_rational_action_fails_b2_b3():
    act = make_b_action("rational")
    rep = check_b_action(act)
    assert rep["B1"].holds and rep["B4"].holds
    for axiom in ("B2", "B3"):
        assert rep[axiom].verdict == VIOLATED
        assert _reproduce_b(act, axiom, rep[axiom].witness)


def test_b2_as_stated_refutes_addition():
    # the converse implication fails even for +, e.g. 0+2 < 1+1.5 with 2 > 1.5
    rep = check_b_action(make_b_action("sum"), SMALL, b2_reading="as-stated")
    w = rep["B2"].witness
    assert rep["B2"].verdict == VIOLATED
    assert w["s"] + w["t"] < w["u"] + w["v"]
    assert not ((w["s"] < w["u"] and w["t"] <= w["v"]) or (w["s"] <= w["u"] and w["t"] < w["v"]))


def test_b3_partner_search():
    t, resid = _find_partner(make_b_action("sum"), 3.0, 1.0)
    assert t == pytest.approx(2.0, abs=1e-9)
    t, resid = _find_partner(make_b_action("euclid"), 5.0, 3.0)
    assert t == pytest.approx(4.0, abs=1e-8)
    t, resid = _find_partner(make_b_action("euclid"), 5.0, 5.0)
    assert t == 0.0 and resid == 0.0
    t, resid = _find_partner(make_b_action("rational"), 0.5, 0.0)
    assert t is None and resid == 0.5


def test_b_action_report_deterministic():
    act = make_b_action("sqrt-sum")
    assert check_b_action(act).to_dict() == check_b_action(act).to_dict()


# theta-metric ------------------------------------------------------------

def test_triangle_example_binding_equality(triangle):
    rep = check_theta_metric(triangle)
    assert rep.ok
    v = rep["theta3"]
    assert v.checked == 27
    assert v.worst_margin == 0.0
    b = v.binding
    assert b["d_xy"] == 13.0 and b["bound"] == 13.0 and b["margin"] == 0.0
    assert (b["x"], b["y"], b["z"]) == ("a", "c", "b")


def test_triangle_table_under_sum():
    space = finite_space("abc", {("a", "b"): 5, ("b", "c"): 12, ("a", "c"): 13}, make_b_action("sum"))
    rep = check_theta_metric(space)
    assert rep.ok
    # brute-force oracle over the 27 triples
    D = space.table
    triples = [(x, y, z) for x in range(3) for y in range(3) for z in range(3)]
    worst = min(D[x][z] + D[z][y] - D[x][y] for x, y, z in triples)
    proper = min(D[x][z] + D[z][y] - D[x][y] for x, y, z in triples if len({x, y, z}) == 3)
    assert rep["theta3"].worst_margin == worst == 0.0
    assert rep["theta3"].binding["margin"] == proper == 4.0


def test_broken_triangle_witness():
    space = finite_space("abc", {("a", "b"): 5, ("b", "c"): 1, ("a", "c"): 13}, make_b_action("euclid"))
    v = check_theta_metric(space)["theta3"]
    assert v.verdict == VIOLATED
    w = v.witness
    assert (w["x"], w["y"], w["z"]) == ("a", "c", "b")
    assert w["d_xy"] == 13 and w["bound"] == math.sqrt(26)
    assert v.worst_margin == pytest.approx(math.sqrt(26) - 13)


@settings(max_examples=15, deadline=None)
@given(step=st.sampled_from([0.05, 0.1, 0.25, 1.0]), seed=st.integers(0, 2**32 - 1),
       n_random=st.integers(0, 50), points=st.integers(2, 31))
def test_euclidean_unit_interval_is_metric_for_any_plan(step, seed, n_random, points):
    space = ThetaMetricSpace(IntervalDomain(0, 1), make_b_action("sum"))
    plan = SamplePlan(grid_step=step, seed=seed, n_random=n_random, domain_points=points)
    assert check_theta_metric(space, plan).ok


def test_interval_theta_metric_with_product_sum(unit_interval):
    rep = check_theta_metric(unit_interval)
    assert rep.ok
    assert rep["theta3"].checked == 101 ** 3 + 198


# simulation functions ----------------------------------------------------

@pytest.mark.parametrize("kind,params,aux", [
    ("rational", [], None), ("linear", [0.5], None), ("linear", [0.0], None), ("linear", [0.875], None),
    ("eta", [], "half"), ("eta", [], "ratio"), ("phi", [], "half"), ("phi", [], "sq-ratio"),
])
def test_catalog_simulations_hold(kind, params, aux):
    rep = check_simulation(make_simulation(kind, params, aux))
    assert rep.ok
    assert [v.axiom for v in rep.verdicts] == ["zeta1", "zeta2", "zeta3"]


def test_linear_half_margin_at_one_one():
    zeta = make_simulation("linear", [0.5])
    assert 1 - 1 - zeta.eval(1, 1) == 0.5
    # smallest grid s is 0.1, so the worst grid margin is 0.5 * 0.1 unless a random s is smaller
    rep = check_simulation(zeta)
    assert 0 < rep["zeta2"].worst_margin <= 0.05


def test_difference_is_not_a_simulation():
    zeta = SimulationFunction("difference", lambda t, s: s - t)
    rep = check_simulation(zeta, SMALL)
    v = rep["zeta2"]
    assert v.verdict == VIOLATED
    w = v.witness
    assert zeta.eval(w["t"], w["s"]) > w["s"] - w["t"] - EPS_STRICT
    assert rep["zeta1"].holds


def test_zeta1_violation():
    zeta = SimulationFunction("offset", lambda t, s: s / 2 - t + 1)
    v = check_simulation(zeta, SMALL)["zeta1"]
    assert v.verdict == VIOLATED and v.witness["zeta"] == 1.0


def test_zeta3_catches_limit_zero():
    # vanishes on the diagonal, so the limsup along t_n = s_n is 0
    zeta = SimulationFunction("tight", lambda t, s: s - t - (s - t) ** 2)
    rep = check_simulation(zeta, SMALL, SequencePlan(limits=(1.0,), coefficients=(0.0,)))
    assert rep["zeta3"].verdict == VIOLATED
    assert rep["zeta3"].witness["tail_max"] == 0.0


def test_zeta3_tail_oracle():
    zeta = make_simulation("linear", [0.5])
    # t_n = 1 + 1/n, s_n = 1 - 1/n: zeta = -0.5 - 1.5/n, increasing in n
    expected = max(0.5 * (1 - 1 / n) - (1 + 1 / n) for n in range(100, 1101))
    assert zeta3_tail_max(zeta, 1.0, 1.0, -1.0, 100, 1100) == pytest.approx(expected, abs=1e-15)


def test_zeta3_nested_tails_do_not_grow():
    for kind, p in [("linear", [0.5]), ("rational", [])]:
        rep = check_simulation(make_simulation(kind, p))
        assert rep.flags == []


def test_plan_validation():
    with pytest.raises(ValueError):
        SamplePlan(grid_step=0)
    with pytest.raises(ValueError):
        SamplePlan(n_random=-1)
    with pytest.raises(ValueError):
        SequencePlan(tail_start=1)


def test_verdict_labels():
    assert HOLDS == "holds-on-samples" and VIOLATED == "violated"
