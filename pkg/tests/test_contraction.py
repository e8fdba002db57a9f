import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from thetafix import (DomainError, IntervalDomain, SamplePlan, ThetaMetricSpace,
                      contractivity_check, distance, finite_space, m_value, make_b_action,
                      make_self_map, make_simulation, modified_z_margin, sample_points, z_margin)
from thetafix.contraction import NONNEGATIVE, VIOLATED

from oracles import margin_oracle, random_finite_case

UNIT = IntervalDomain(0.0, 1.0)


@pytest.fixture
def space():
    return ThetaMetricSpace(UNIT, make_b_action("product-sum"))


def test_m_value_at_fixed_points(space):
    ident = make_self_map("identity", [], UNIT)
    assert m_value(space, ident, 0.2, 0.9) == distance(space, 0.2, 0.9)
    T = make_self_map("affine", [2, 0.25], UNIT)
    assert m_value(space, T, 0.5, 0.5) == 0


def test_m_value_cross_piece_bound(space):
    T = make_self_map("two-piece", [2 / 9, 1 / 9, 0.5], UNIT)
    xs = [x for x in sample_points(space, T) if x < 0.5]
    ys = [y for y in sample_points(space, T) if y >= 0.5]
    low = min(m_value(space, T, float(x), float(y)) for x in xs for y in ys)
    assert low >= 7 / 18
    # attained at y = 1/2 where d(y, Ty) = 1/2 - 1/9
    assert low == pytest.approx(7 / 18)


def test_m_value_domain_mismatch(space):
    T = make_self_map("affine", [2, 0.25], UNIT)
    with pytest.raises(DomainError):
        m_value(space, T, 0.2, 1.2)
    other = make_self_map("identity", [], IntervalDomain(0, 2))
    with pytest.raises(DomainError):
        m_value(space, other, 0.2, 0.3)


def test_split_point_injected(space):
    T = make_self_map("two-piece", [0.2, 0.1, 0.505], UNIT)
    pts = sample_points(space, T)
    assert 0.505 in pts and pts.size == 102


def test_affine_margin_matches_closed_form(space):
    a, b, lam = 2.0, 0.25, 0.6
    T = make_self_map("affine", [a, b], UNIT)
    rep = z_margin(space, T, make_simulation("linear", [lam]))
    assert rep.verdict == NONNEGATIVE and rep.pair_count == 101 ** 2
    assert rep.min_margin == 0.0 and rep.argmin_pair == (0.0, 0.0)
    # (lambda - 1/a) * min |x - y| over distinct grid points
    assert rep.min_margin_distinct == pytest.approx((lam - 1 / a) * 0.01, rel=1e-9)


def test_reciprocal_margin_nonnegative(space):
    rep = z_margin(space, make_self_map("reciprocal", [], UNIT), make_simulation("rational"))
    assert rep.ok
    # the margin vanishes analytically on pairs containing 0, so float noise may clamp it
    assert rep.min_margin >= -1e-9


def test_identity_is_not_contraction(space):
    ident = make_self_map("identity", [], UNIT)
    rep = z_margin(space, ident, make_simulation("linear", [0.5]))
    assert rep.verdict == VIOLATED
    assert rep.min_margin == -0.5
    assert rep.argmin_pair == (0.0, 1.0)


def test_modified_two_piece_examples(space):
    for c1, c2, lam in [(2 / 9, 1 / 9, 0.5), (1 / 7, 2 / 7, 7 / 8)]:
        T = make_self_map("two-piece", [c1, c2, 0.5], UNIT)
        rep = modified_z_margin(space, T, make_simulation("linear", [lam]))
        assert rep.ok and not rep.clamped
        assert rep.pair_count == 101 ** 2


def test_modified_margin_on_diagonal(space):
    T = make_self_map("affine", [3, 0.1], UNIT)
    zeta = make_simulation("linear", [0.5])
    for x in (0.0, 0.4, 1.0):
        # zeta(0, M(x, x)) = lambda * d(x, Tx)
        assert zeta.eval(0.0, m_value(space, T, x, x)) == 0.5 * distance(space, x, T.apply(x))


def test_contractivity_examples(space):
    rep = contractivity_check(space, make_self_map("affine", [2, 0.25], UNIT))
    assert rep.ok and rep.min_margin == pytest.approx(0.005)
    assert contractivity_check(space, make_self_map("reciprocal", [], UNIT)).ok
    doubleton = finite_space("ab", {("a", "b"): 1}, make_b_action("sum"))
    rep = contractivity_check(doubleton, make_self_map("identity", [], doubleton.domain))
    assert rep.verdict == VIOLATED and rep.min_margin == 0


def test_reciprocal_contraction_identity():
    # |Tx - Ty| = |x - y| / ((1+x)(1+y))
    T = make_self_map("reciprocal", [], UNIT)
    for x, y in [(0.1, 0.7), (0.0, 1.0), (0.33, 0.34)]:
        assert abs(T.apply(x) - T.apply(y)) == pytest.approx(abs(x - y) / ((1 + x) * (1 + y)))


def test_m_dominates_distance(space):
    T = make_self_map("two-piece", [2 / 9, 1 / 9, 0.5], UNIT)
    for x in np.linspace(0, 1, 21):
        for y in np.linspace(0, 1, 21):
            assert m_value(space, T, float(x), float(y)) >= distance(space, float(x), float(y))


def test_positive_z_margin_implies_contractive(space):
    zeta = make_simulation("linear", [0.6])
    for a, b in [(2, 0.25), (3, 0.5), (1.8, 0.1)]:
        T = make_self_map("affine", [a, b], UNIT)
        rep = z_margin(space, T, zeta)
        if rep.min_margin_distinct > 1e-9:
            assert contractivity_check(space, T).ok


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 6), seed=st.integers(0, 2**32 - 1),
       zeta_pick=st.sampled_from([("linear", [0.5]), ("linear", [0.9]), ("rational", [])]),
       modified=st.booleans())
def test_finite_margins_match_oracle(n, seed, zeta_pick, modified):
    labels, dist, image = random_finite_case(np.random.default_rng(seed), n)
    space = finite_space(labels, dist, make_b_action("sum"))
    T = make_self_map("finite-table", image, space.domain)
    zeta = make_simulation(*zeta_pick)
    rep = (modified_z_margin if modified else z_margin)(space, T, zeta)
    best, arg = margin_oracle(space, T, zeta, range(n), modified)
    assert rep.min_margin == best + 0.0
    assert rep.argmin_pair == (labels[arg[0]], labels[arg[1]])
    assert rep.pair_count == n * n


def test_margin_report_deterministic(space):
    T = make_self_map("reciprocal", [], UNIT)
    zeta = make_simulation("rational")
    assert z_margin(space, T, zeta).to_dict() == z_margin(space, T, zeta).to_dict()


def test_coarser_plan(space):
    T = make_self_map("affine", [2, 0.25], UNIT)
    rep = z_margin(space, T, make_simulation("linear", [0.6]), SamplePlan(domain_points=11))
    assert rep.pair_count == 121
