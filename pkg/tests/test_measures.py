from __future__ import annotations

from fractions import Fraction
from itertools import permutations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dtcalc.errors import ArrangementMismatch, BadDimensionVector
from dtcalc.exactq import Subspace, dot, face_cone, from_inequalities, vector
from dtcalc.measures import (
    HallCategory,
    Morphism,
    canonical_measure,
    convolve,
    delta,
    explicit_measure,
    invert,
    ordering_cone,
    partition_check,
    pullback_measure,
    quiver_measure,
    to_prestability,
    trivial_measure,
)
from dtcalc.stackmodel import LinearTorusStack

Q1 = LinearTorusStack.build(3, [[-1, 1, 0], [0, -1, 1]])
Q2 = LinearTorusStack.build(3, [[-1, 1, 0], [-1, 0, 1]])
A1 = LinearTorusStack.build(1, [[1]])
FULL3 = Subspace.full(3)

slopes = st.lists(st.integers(-3, 3), min_size=3, max_size=3)


def chamber_oracle(x, zeta):
    """Pull the slope measure back by hand, chamber by chamber.

    An ordering chamber of Q^3 is stable for equal slopes or when slopes are
    non-increasing along it.  Its special closure in x keeps the weights that
    are positive at an interior point.
    """
    tally: dict = {}
    stable = [p for p in permutations(range(3)) if all(zeta[p[i]] >= zeta[p[i + 1]] for i in range(2))]
    for perm in stable:
        point = [0, 0, 0]
        for rank, i in enumerate(perm):
            point[i] = 3 - rank
        keep = [w for w in x.weights if dot(vector(w), vector(point)) > 0]
        cone = from_inequalities(FULL3, keep)
        tally[cone] = tally.get(cone, Fraction(0)) + Fraction(1, len(stable))
    return tally


def test_trivial_measure_sits_on_face_cones():
    mu = trivial_measure(Q1)
    assert mu(face_cone(FULL3)) == 1
    assert mu(from_inequalities(FULL3, [[-1, 1, 0]])) == 0
    assert mu(face_cone(Subspace.span([[1, 1, 1]], 3))) == 1
    assert partition_check(mu, Q1)


def test_trivial_slopes_give_one_sixth_per_chamber():
    mu = quiver_measure(3, [(0, 1), (1, 2)], [0, 0, 0])
    for perm in permutations(range(3)):
        assert mu(ordering_cone(3, [[i] for i in perm])) == Fraction(1, 6)


def test_two_vertex_slopes_pick_one_chamber():
    mu = quiver_measure(2, [(0, 1)], [1, 0])
    assert mu(ordering_cone(2, [[0], [1]])) == 1
    assert mu(ordering_cone(2, [[1], [0]])) == 0
    assert ordering_cone(2, [[0], [1]]).contains(vector([1, 0]))


def test_one_vertex_measure_is_the_face():
    mu = quiver_measure(1, [], [0])
    assert mu(face_cone(Subspace.full(1))) == 1


@pytest.mark.parametrize("x, expected", [
    (Q1, {(): Fraction(1, 6), ("w1",): Fraction(1, 3), ("w2",): Fraction(1, 3), ("w1", "w2"): Fraction(1, 6)}),
    (Q2, {(): Fraction(1, 3), ("w1",): Fraction(1, 6), ("w2",): Fraction(1, 6), ("w1", "w2"): Fraction(1, 3)}),
])
def test_pullback_of_trivial_slopes(x, expected):
    mu = pullback_measure(quiver_measure(3, [], [0, 0, 0]), x)
    named = {"w1": x.weights[0], "w2": x.weights[1]}
    for ws, value in expected.items():
        assert mu(from_inequalities(FULL3, [named[w] for w in ws])) == value
    assert sum(expected.values()) == 1
    assert partition_check(mu, x)


@given(slopes)
@pytest.mark.parametrize("x", [Q1, Q2])
def test_pullback_matches_the_chamber_oracle(x, zeta):
    mu = pullback_measure(quiver_measure(3, [], zeta), x)
    oracle = chamber_oracle(x, zeta)
    for cone in x.special_cones_in_face(FULL3):
        assert mu(cone) == oracle.get(cone, Fraction(0))


@given(slopes)
def test_random_slopes_give_a_partition_of_unity(zeta):
    nu = quiver_measure(3, [(0, 1), (1, 2)], zeta)
    assert all(v >= 0 for v in nu.values.values())
    for x in (Q1, Q2):
        assert partition_check(pullback_measure(nu, x), x)


def test_pullback_along_the_identity_is_unchanged():
    mu = canonical_measure(Q1)
    assert pullback_measure(mu, Q1) == mu


def test_pullback_to_a_graded_component_is_a_partition():
    mu = pullback_measure(quiver_measure(3, [], [0, 0, 0]), Q1)
    for face in Q1.special_faces:
        xa = Q1.grad_restrict(face)
        assert partition_check(pullback_measure(mu, xa), xa)


def test_pullback_needs_every_special_face():
    mu = trivial_measure(A1)
    with pytest.raises(ArrangementMismatch):
        pullback_measure(mu, Q1)


def test_perturbed_measure_fails_the_partition_check():
    mu = pullback_measure(quiver_measure(3, [], [0, 0, 0]), Q1)
    assert not partition_check(mu.perturbed(face_cone(FULL3), Fraction(1, 100)), Q1)


def test_mass_on_a_non_special_cone_is_rejected():
    mu = explicit_measure(A1, {face_cone(Subspace.zero(1)): 1, from_inequalities(Subspace.full(1), [[-1]]): 1})
    assert not partition_check(mu, A1)


def test_dimension_vector_must_be_all_ones():
    with pytest.raises(BadDimensionVector):
        quiver_measure(2, [(0, 1)], [0, 0], dimension=[2, 1])
    with pytest.raises(BadDimensionVector):
        quiver_measure(2, [(0, 3)], [0, 0])


# --- incidence algebra --------------------------------------------------------------


def positive_a1():
    full = Subspace.full(1)
    return explicit_measure(A1, {face_cone(Subspace.zero(1)): 1, from_inequalities(full, [[1]]): 1})


def test_hall_category_of_the_affine_line():
    cat = HallCategory(A1)
    ms = cat.morphisms
    assert len(ms) == 4
    assert sum(m.is_identity for m in ms) == 2


def test_inverse_on_a_single_arrow_is_minus_one():
    cat = HallCategory(A1)
    p = to_prestability(positive_a1(), A1, cat)
    arrow = Morphism(Subspace.zero(1), from_inequalities(Subspace.full(1), [[1]]))
    assert p(arrow) == 1
    assert invert(p)(arrow) == -1


@pytest.mark.parametrize("x", [Q1, Q2, A1, LinearTorusStack.build(2, [[1, -1]])])
def test_group_laws_for_canonical_measures(x):
    cat = HallCategory(x)
    p = to_prestability(canonical_measure(x), x, cat)
    inv = invert(p)
    d = delta(cat)
    assert convolve(p, inv) == d
    assert convolve(inv, p) == d
    assert convolve(d, p) == p


@given(slopes)
def test_inverse_of_pulled_back_quiver_measures(zeta):
    mu = pullback_measure(quiver_measure(3, [], zeta), Q1)
    cat = HallCategory(Q1)
    p = to_prestability(mu, Q1, cat)
    assert convolve(p, invert(p)) == delta(cat)


def test_prestability_is_one_on_identities():
    cat = HallCategory(Q1)
    p = to_prestability(canonical_measure(Q1), Q1, cat)
    assert all(p(m) == 1 for m in cat.morphisms if m.is_identity)
