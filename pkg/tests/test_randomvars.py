"""Symmetric random-variable models, gauges, and expectation engines."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geomlab import (
    ABSOLUTE_VALUE,
    BudgetExceededError,
    ConvexGauge,
    MonteCarlo,
    SymmetricRV,
    cos_theta,
    complex_circle,
    expect,
    make_lp,
    power_gauge,
    rademacher,
    tail_mass,
    uniform_symmetric,
)
from geomlab.randomvars import grid_total, product_grid_chunks

ALL_MODELS = [rademacher(), cos_theta(), complex_circle(), uniform_symmetric()]


class TestExpect:
    def test_rademacher_pair_abs_sum(self):
        # The four-sign average of |s + t| is exactly 1.
        assert expect([rademacher(), rademacher()], lambda s, t: abs(s + t)) == 1.0

    def test_cos_squared(self):
        assert expect([cos_theta()], lambda s: s * s) == pytest.approx(0.5, abs=1e-14)

    def test_single_rademacher_mean(self):
        assert expect([rademacher()], lambda s: s) == 0.0

    def test_empty_tuple_rejected(self):
        with pytest.raises(ValueError):
            expect([], lambda: 1.0)

    def test_budget_exceeded(self):
        rvs = [rademacher()] * 25  # 2^25 > 2^24
        with pytest.raises(BudgetExceededError):
            expect(rvs, lambda *s: 1.0)

    def test_linearity(self):
        rvs = [cos_theta(), rademacher()]
        g1 = lambda s, t: s * s + t
        g2 = lambda s, t: abs(s) * abs(t)
        lhs = expect(rvs, lambda s, t: 2.0 * g1(s, t) + 3.0 * g2(s, t))
        rhs = 2.0 * expect(rvs, g1) + 3.0 * expect(rvs, g2)
        assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_monotonicity(self):
        rvs = [uniform_symmetric()]
        low = expect(rvs, lambda s: s * s)
        high = expect(rvs, lambda s: s * s + 0.25 * abs(s))
        assert low <= high

    @pytest.mark.parametrize("rv", [rademacher(), cos_theta(), uniform_symmetric()], ids=lambda r: r.kind)
    def test_symmetry_exact_for_deterministic_engines(self, rv):
        g = lambda s: math.exp(s) + 0.5 * s  # deliberately asymmetric
        assert expect([rv], g) == expect([rv], lambda s: g(-s))

    def test_adaptive_doubling_reaches_nonpolynomial_integrals(self):
        # E|cos| = 2/pi is not a trigonometric polynomial identity.
        rv = cos_theta(nodes=16)
        assert expect([rv], abs) == pytest.approx(2.0 / math.pi, abs=1e-8)

    def test_monte_carlo_seeded_and_reproducible(self):
        rv = SymmetricRV("cos_theta", MonteCarlo(samples=4000, seed=123))
        a = expect([rv], lambda s: s * s)
        b = expect([rv], lambda s: s * s)
        assert a == b
        assert a == pytest.approx(0.5, abs=0.05)

    def test_monte_carlo_requires_sample_count(self):
        with pytest.raises(ValueError):
            MonteCarlo(samples=1, seed=0)


class TestNodeSupports:
    @pytest.mark.parametrize("rv", ALL_MODELS, ids=lambda r: r.kind)
    def test_nodes_symmetric_with_matching_weights(self, rv):
        vals, wts = rv.nodes_weights()
        half = len(vals) // 2
        assert np.array_equal(vals[:half], -vals[half:])
        assert np.array_equal(wts[:half], wts[half:])
        assert wts.sum() == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("rv", ALL_MODELS, ids=lambda r: r.kind)
    def test_nodes_inside_unit_ball(self, rv):
        vals, _ = rv.nodes_weights()
        assert np.abs(vals).max() <= 1.0 + 1e-15

    def test_exact_enumeration_only_for_signs(self):
        from geomlab import ExactEnumeration

        with pytest.raises(ValueError):
            SymmetricRV("cos_theta", ExactEnumeration())

    def test_json_roundtrip(self):
        for rv in ALL_MODELS + [SymmetricRV("rademacher", MonteCarlo(samples=100, seed=9))]:
            assert SymmetricRV.from_json(rv.to_json()) == rv


class TestTailMass:
    def test_rademacher_point_mass(self):
        assert tail_mass(rademacher(), 1.0 / 12.0) == 0.5

    def test_cos_theta_closed_form(self):
        # P{|cos - 1| < eta} = arccos(1 - eta)/pi; at eta = 1 this is 1/2.
        assert tail_mass(cos_theta(), 1.0) == pytest.approx(math.acos(0.0) / math.pi, abs=1e-15)
        assert tail_mass(cos_theta(), 1.0) == 0.5

    def test_cos_theta_monte_carlo_cross_check(self):
        thetas = np.random.default_rng(31).uniform(0.0, 2.0 * np.pi, 10**6)
        empirical = float(np.mean(np.abs(np.cos(thetas) - 1.0) < 1.0))
        assert tail_mass(cos_theta(), 1.0) == pytest.approx(empirical, abs=2e-3)

    @pytest.mark.parametrize("rv", ALL_MODELS, ids=lambda r: r.kind)
    def test_full_support_above_diameter(self, rv):
        assert tail_mass(rv, 2.5) == 1.0

    @pytest.mark.parametrize("rv", ALL_MODELS, ids=lambda r: r.kind)
    def test_positive_for_every_positive_eta(self, rv):
        for eta in (1e-6, 1e-3, 0.1, 1.0, 1.9):
            assert tail_mass(rv, eta) > 0.0

    def test_rejects_nonpositive_eta(self):
        with pytest.raises(ValueError):
            tail_mass(rademacher(), 0.0)

    def test_uniform_linear_tail(self):
        assert tail_mass(uniform_symmetric(), 0.5) == 0.25

    def test_circle_arc_tail(self):
        assert tail_mass(complex_circle(), 2.0) == pytest.approx(1.0, abs=1e-15)
        assert tail_mass(complex_circle(), 1.0) == pytest.approx(2 * math.asin(0.5) / math.pi)


class TestGauges:
    def test_power_gauge_basics(self):
        phi = power_gauge(2)
        assert phi(0.0) == 0.0
        assert phi(-3.0) == 9.0
        assert phi.inverse(9.0) == 3.0
        assert phi.strictly_convex

    def test_rejects_p_at_most_one(self):
        with pytest.raises(ValueError):
            power_gauge(1.0)

    def test_abs_gauge_not_strictly_convex(self):
        assert not ABSOLUTE_VALUE.strictly_convex
        assert ABSOLUTE_VALUE(-2.5) == 2.5

    def test_strict_midpoint_convexity_sampled(self, rng):
        phi = power_gauge(1.5)
        s = rng.uniform(0.01, 10.0, 200)
        t = rng.uniform(0.01, 10.0, 200)
        keep = np.abs(s - t) > 1e-6
        mid = phi((s[keep] + t[keep]) / 2.0)
        assert (mid < (phi(s[keep]) + phi(t[keep])) / 2.0).all()

    def test_superadditive_on_nonnegatives(self, rng):
        phi = power_gauge(3)
        a = rng.uniform(0.0, 5.0, 200)
        b = rng.uniform(0.0, 5.0, 200)
        assert (phi(a + b) >= phi(a) + phi(b) - 1e-12).all()

    @settings(max_examples=50, deadline=None, derandomize=True)
    @given(
        p=st.floats(min_value=1.01, max_value=6.0),
        t=st.floats(min_value=0.0, max_value=100.0),
    )
    def test_inverse_roundtrip_property(self, p, t):
        phi = power_gauge(p)
        assert phi.inverse(phi(t)) == pytest.approx(t, rel=1e-9, abs=1e-12)

    def test_unknown_kind_rejected(self):
        with pytest.raises(ValueError):
            ConvexGauge("cubic")


def test_abs_gauge_counterexample_identity(rng):
    # With phi = |t| and a sign flip of the same vector, the average never
    # moves: E|1 + r| = 1 for every unit x, so phi = |t| detects nothing.
    space = make_lp(3, 2)
    for _ in range(20):
        x = space.random_unit(rng)
        val = expect([rademacher()], lambda s: ABSOLUTE_VALUE(space.norm(x + s * x)))
        assert val == pytest.approx(1.0, abs=1e-12)


def test_product_grid_chunks_matches_direct_enumeration():
    grids = [rademacher().nodes_weights(), cos_theta(nodes=8).nodes_weights()]
    rows = []
    weights = []
    for V, w in product_grid_chunks(grids, max_rows=3):
        rows.append(V)
        weights.append(w)
    V = np.vstack(rows)
    w = np.concatenate(weights)
    assert V.shape == (grid_total(grids), 2)
    assert w.sum() == pytest.approx(1.0, abs=1e-15)
    direct = sum(
        wa * wb * (va + vb) ** 2
        for va, wa in zip(*grids[0])
        for vb, wb in zip(*grids[1])
    )
    assert float(w @ (V.sum(axis=1) ** 2)) == pytest.approx(direct, abs=1e-14)
