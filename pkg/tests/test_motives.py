from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dtcalc.errors import PoleAtOne
from dtcalc.motives import (
    L,
    LaurentL,
    StrataMotive,
    Stratum,
    euler_char,
    euler_char_mon,
    is_regular_at_one,
    q,
    sch_realize,
)

fracs = st.builds(Fraction, st.integers(-20, 20), st.integers(1, 6))


def test_point_motives_of_torus_strata():
    assert Stratum.of(1, free=[0]).point_motive == L / (L - 1)
    assert Stratum.of(1, nonzero=[0]).point_motive == LaurentL(1)
    assert Stratum.of(3, free=[0, 1]).point_motive == L ** 2 / (L - 1) ** 3


def test_regularity_at_one():
    assert is_regular_at_one((1 - L) / (L - 1))
    assert not is_regular_at_one(1 / (L - 1))
    assert is_regular_at_one((1 - L) ** 2 / (L - 1))


def test_euler_characteristic():
    a = Fraction(1, 2)
    assert euler_char(-(a * L + 1 - a)) == -1
    assert euler_char(LaurentL(7)) == 7
    with pytest.raises(PoleAtOne):
        euler_char(L / (L - 1))


def test_monodromic_euler_characteristic():
    assert euler_char_mon(q) == -1
    assert euler_char_mon(q ** 2) == 1
    assert euler_char_mon((q - 1 / q) * q / (q ** 2 - 1)) == 1


def test_half_realization_squares_to_l():
    assert (L / (L - 1)).to_half() == q ** 2 / (q ** 2 - 1)


def test_json_round_trip_of_rational_function():
    f = (3 * L ** 2 - Fraction(1, 2)) / (L - 1) ** 2
    assert LaurentL.from_json(f.to_json()) == f
    assert (1 / (L - 1)).to_json() == {"num": ["1"], "den": ["-1", "1"]}


def test_free_coordinate_splits_into_zero_and_nonzero():
    a = StrataMotive.of(Stratum.of(1, free=[0]))
    split = StrataMotive.of(Stratum.of(1, zero=[0])) + StrataMotive.of(Stratum.of(1, nonzero=[0]))
    assert a == split
    assert a.simplified().items() == a.items()
    assert str(split.simplified()) == "[a]"


def test_labels_and_formatting():
    m = StrataMotive({Stratum.of(2, zero=[0], nonzero=[1]): "1/2", Stratum.of(2, free=[0, 1]): -1})
    assert str(m) == "1/2*[0g] - [aa]"
    assert str(StrataMotive.zero()) == "0"


@given(st.lists(st.tuples(st.sampled_from("0ga"), st.sampled_from("0ga"), fracs), max_size=5))
def test_realization_is_invariant_under_refinement(terms):
    def stratum(a, b):
        states = {0: a, 1: b}
        return Stratum.of(2, zero=[c for c, s in states.items() if s == "0"],
                          nonzero=[c for c, s in states.items() if s == "g"],
                          free=[c for c, s in states.items() if s == "a"])

    m = StrataMotive([(stratum(a, b), c) for a, b, c in terms])
    assert sch_realize(m) == sch_realize(m.refined())
    assert m.simplified() == m
    assert sch_realize(m.simplified()) == sch_realize(m)


def test_disjointness_of_states_is_enforced():
    with pytest.raises(ValueError):
        Stratum.of(1, zero=[0], free=[0])
