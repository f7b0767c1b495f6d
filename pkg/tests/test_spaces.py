"""Norm oracles, lattices, and derived constructions."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from geomlab import (
    BochnerSpace,
    ExpYoung,
    LorentzLattice,
    OrliczLattice,
    PowerYoung,
    WeightedLpLattice,
    bochner,
    check_lattice_axioms,
    check_norm_axioms,
    complexify,
    lattice_calculus,
    make_lp,
    pconvexify,
)
from conftest import lattice_id, shipped_lattices, shipped_spaces


class TestLpNorms:
    def test_euclidean(self):
        assert make_lp(2, 2).norm([3, 4]) == 5.0

    def test_max_norm(self):
        assert make_lp(3, math.inf).norm([1, -2, 0.5]) == 2.0

    def test_l1(self):
        assert make_lp(2, 1).norm([0.3, 0.7]) == 1.0

    @pytest.mark.parametrize("p", [0.5, 0.99, -1])
    def test_rejects_p_below_one(self, p):
        with pytest.raises(ValueError):
            make_lp(2, p)

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError):
            make_lp(2, 2).norm([1, 2, 3])

    def test_real_space_rejects_complex(self):
        with pytest.raises(ValueError):
            make_lp(2, 2).norm([1j, 0])


class TestLatticeCalculus:
    def test_coordinatewise_pythagoras(self):
        lat = WeightedLpLattice([1, 1], 1)
        out = lattice_calculus(
            lat, lambda f, g: (np.abs(f) ** 2 + np.abs(g) ** 2) ** 0.5, [3, 0], [4, 1]
        )
        assert np.allclose(out, [5, 1])

    def test_modulus(self):
        lat = WeightedLpLattice([1, 1], 1)
        out = lattice_calculus(lat, np.abs, [-2, 5])
        assert np.array_equal(out, [2, 5])

    def test_power_substitution(self):
        # Degree-1 two-point image (|f|^2 + (2|g|/C)^2)^(1/2) at C = 2
        lat = WeightedLpLattice([1, 1], 1)
        c = 2.0
        out = lattice_calculus(
            lat,
            lambda f, g: (np.abs(f) ** 2 + (2 * np.abs(g) / c) ** 2) ** 0.5,
            [1, 0],
            [1, 1],
        )
        assert np.allclose(out, [math.sqrt(2), 1.0])

    def test_dimension_mismatch(self):
        lat = WeightedLpLattice([1, 1], 1)
        with pytest.raises(ValueError):
            lattice_calculus(lat, np.abs, [1, 2, 3])

    def test_negative_radicand_rejected(self):
        lat = WeightedLpLattice([1, 1], 1)
        with pytest.raises(ValueError):
            lattice_calculus(lat, lambda f: f**0.5, [-1.0, 1.0])


class TestPConvexification:
    def test_single_atom_support(self):
        pc = pconvexify(WeightedLpLattice([1, 1], 1), 2)
        assert pc.norm([1, 0]) == 1.0

    def test_two_atom_value(self):
        pc = pconvexify(WeightedLpLattice([1, 1], 1), 2)
        assert pc.norm([1, 1]) == pytest.approx(math.sqrt(2), abs=1e-15)

    def test_root_identity_matches_l2(self, rng):
        # ||u^2||_1^(1/2) == ||u||_2 checked by direct evaluation
        pc = pconvexify(WeightedLpLattice([1, 1], 1), 2)
        l2 = make_lp(2, 2)
        for _ in range(100):
            u = rng.standard_normal(2) * 3
            assert pc.norm(u) == pytest.approx(l2.norm(u), abs=1e-12)

    def test_power_norm_same_arithmetic_path(self, rng):
        lat = WeightedLpLattice([0.5, 1.0, 2.0], 1.5)
        pc = pconvexify(lat, 2.5)
        for _ in range(50):
            u = rng.standard_normal(3)
            assert pc.power_norm(u) == lat.norm(np.abs(u) ** 2.5)

    @pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
    def test_unit_weight_exponent_one_gives_lp(self, p, rng):
        pc = pconvexify(WeightedLpLattice(np.ones(3), 1), p)
        lp = make_lp(3, p)
        for _ in range(50):
            u = rng.standard_normal(3)
            assert pc.norm(u) == pytest.approx(lp.norm(u), abs=1e-12)

    @pytest.mark.parametrize("p", [1.0, 0.5])
    def test_rejects_p_at_most_one(self, p):
        with pytest.raises(ValueError):
            pconvexify(WeightedLpLattice([1, 1], 1), p)


class TestComplexification:
    def test_l1_value(self):
        cx = complexify(WeightedLpLattice([1, 1], 1))
        assert cx.norm([1j, 1]) == 2.0

    def test_linf_value(self):
        cx = complexify(WeightedLpLattice([1, 1], math.inf))
        assert cx.norm([3 + 4j, 1]) == 5.0

    def test_restriction_agrees_exactly(self, rng):
        lat = LorentzLattice([1.0, 0.5, 0.25])
        cx = complexify(lat)
        for _ in range(100):
            v = rng.standard_normal(3)
            assert cx.norm(v.astype(complex)) == lat.norm(v)

    def test_rejects_non_lattice(self):
        with pytest.raises(ValueError):
            complexify(make_lp(2, 2))


class TestBochner:
    def test_four_sign_atoms(self):
        # |r1 + r2| averaged over the four sign atoms of weight 1/4
        space = bochner([0.25] * 4, 1, make_lp(1, 2))
        f = space.pack(np.array([[2.0], [0.0], [0.0], [2.0]]))
        assert space.norm(f) == 1.0

    def test_single_atom(self):
        inner = make_lp(3, 2)
        space = bochner([1.0], 2, inner)
        v = np.array([1.0, 2.0, 2.0])
        assert space.norm(space.pack(v[None, :])) == inner.norm(v)

    def test_symmetric_two_atoms(self):
        space = bochner([0.5, 0.5], 2, make_lp(1, 2))
        f = space.pack(np.array([[1.0], [-1.0]]))
        assert space.norm(f) == 1.0

    def test_rejects_empty_atoms(self):
        with pytest.raises(ValueError):
            bochner([], 2, make_lp(1, 2))

    def test_rejects_nonpositive_weight(self):
        with pytest.raises(ValueError):
            bochner([0.5, 0.0], 2, make_lp(1, 2))

    def test_rejects_p_infinity(self):
        with pytest.raises(ValueError):
            bochner([1.0], math.inf, make_lp(1, 2))

    def test_pack_unpack_roundtrip(self, rng):
        space = bochner([0.25, 0.75], 2, make_lp(3, 2))
        vals = rng.standard_normal((2, 3))
        assert np.array_equal(space.unpack(space.pack(vals)), vals)


@pytest.mark.parametrize("space", shipped_spaces(), ids=lambda s: s.label)
def test_norm_axioms(space):
    report = check_norm_axioms(space, seed=7, samples=1000)
    assert report.max_violation() <= 1e-10


@pytest.mark.parametrize("lattice", shipped_lattices(), ids=lattice_id)
def test_lattice_axioms(lattice):
    report = check_lattice_axioms(lattice, seed=7, samples=1000)
    assert report.monotonicity <= 1e-12
    assert report.modulus_invariance == 0.0


@pytest.mark.parametrize(
    "lattice",
    [OrliczLattice([1.0, 2.0], ExpYoung()), OrliczLattice([1.0, 1.0, 0.5], PowerYoung(2.5))],
    ids=["orlicz-exp", "orlicz-pow"],
)
def test_orlicz_modular_at_norm_is_one(lattice, rng):
    # The Luxemburg gauge makes the modular equal 1 at the norm (to bisection tol).
    for _ in range(20):
        v = rng.standard_normal(lattice.dim) * 5
        s = lattice.norm(v)
        modular = float(lattice.young(np.abs(v) / s) @ lattice.weights)
        assert modular == pytest.approx(1.0, rel=1e-10)


def test_orlicz_power_young_matches_weighted_lp(rng):
    # Phi(t) = t^q makes the Luxemburg norm the weighted L_q norm.
    orl = OrliczLattice([0.5, 1.5], PowerYoung(3.0))
    ref = WeightedLpLattice([0.5, 1.5], 3.0)
    for _ in range(30):
        v = rng.standard_normal(2) * 4
        assert orl.norm(v) == pytest.approx(ref.norm(v), rel=1e-12)


@settings(max_examples=60, deadline=None, derandomize=True)
@given(
    scale=st.floats(min_value=0.01, max_value=100.0),
    coords=st.lists(st.floats(min_value=-50, max_value=50), min_size=2, max_size=2),
)
def test_orlicz_homogeneity_property(scale, coords):
    lat = OrliczLattice([1.0, 1.0], ExpYoung())
    v = np.array(coords)
    assert lat.norm(scale * v) == pytest.approx(scale * lat.norm(v), rel=1e-10, abs=1e-12)


def test_lorentz_sorts_sigma_and_uses_rearrangement():
    lat = LorentzLattice([0.25, 1.0, 0.5])  # unsorted on purpose
    assert lat.norm([1, 2, 3]) == pytest.approx(3 * 1.0 + 2 * 0.5 + 1 * 0.25)


def test_top_k_ladder_is_a_norm():
    lat = LorentzLattice([1.0, 1.0, 0.0])  # top-2 sum
    assert lat.norm([3, -1, 2]) == 5.0
    report = check_norm_axioms(lat, seed=3, samples=500)
    assert report.max_violation() <= 1e-12
