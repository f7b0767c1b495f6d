"""Shared fixtures: the spaces and lattices exercised across the suite."""

import math

import numpy as np
import pytest

from geomlab import (
    ExpYoung,
    LorentzLattice,
    OrliczLattice,
    WeightedLpLattice,
    make_lp,
)


def shipped_lattices():
    return [
        WeightedLpLattice([1.0, 1.0], 1, label="l1^2"),
        WeightedLpLattice([0.5, 1.0, 2.0], 1.5, label="L1.5(w)^3"),
        OrliczLattice([1.0, 1.0], ExpYoung()),
        LorentzLattice([1.0, 0.5, 0.25]),
    ]


def shipped_spaces():
    return [
        make_lp(2, 1),
        make_lp(2, 2),
        make_lp(3, 2),
        make_lp(2, 3),
        make_lp(2, math.inf),
        make_lp(3, math.inf),
        make_lp(2, 2, field="complex"),
    ] + shipped_lattices()


@pytest.fixture
def rng():
    return np.random.default_rng(20260811)


def lattice_id(lattice):
    return lattice.label
