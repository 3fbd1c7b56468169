from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dtcalc.errors import BasisMismatch, DegenerateCone, NotAMorphism
from dtcalc.exactq import Subspace, conical_hull, face_cone, from_inequalities, vector
from dtcalc.motives import StrataMotive, Stratum, sch_realize
from dtcalc.stackmodel import LinearTorusStack

Q1 = LinearTorusStack.build(3, [[-1, 1, 0], [0, -1, 1]])
A1 = LinearTorusStack.build(1, [[1]])
BGM = LinearTorusStack.build(1, [])
FULL3 = Subspace.full(3)
DIAG = Subspace.span([[1, 1, 1]], 3)
W1 = [-1, 1, 0]
W2 = [0, -1, 1]


def origin(x):
    return StrataMotive.of(Stratum.of(x.rank, zero=x.coords))


def test_special_faces_of_q1_are_the_four_flats():
    faces = Q1.special_faces
    assert len(faces) == 4
    assert set(faces) == {DIAG, Subspace.span([[1, 1, 0], [0, 0, 1]], 3),
                          Subspace.span([[1, 0, 0], [0, 1, 1]], 3), FULL3}


def test_classifying_stack_has_a_single_face():
    assert BGM.special_faces == (Subspace.full(1),)
    assert BGM.crk == 1


def test_central_face_and_rank():
    assert Q1.central_face == DIAG and Q1.crk == 1
    assert A1.central_face == Subspace.zero(1) and A1.crk == 0


def test_graded_components_keep_vanishing_weights():
    plane = Subspace.span([[1, 1, 0], [0, 0, 1]], 3)
    xa = Q1.grad_restrict(plane)
    assert xa.weights == ((-1, 1, 0),)
    assert Q1.grad_restrict(FULL3).weights == ()
    assert Q1.grad_restrict(Subspace.zero(3)) == Q1


def test_special_cone_closure_examples():
    assert Q1.special_cone_closure(conical_hull([[2, 1, 0]], 3)) == face_cone(FULL3)
    half = from_inequalities(FULL3, [W1])
    assert Q1.special_cone_closure(conical_hull([[0, 1, 0]], 3)) == half
    assert Q1.special_cone_closure(half) == half


def test_special_cones_in_the_top_face():
    cones = Q1.special_cones_in_face(FULL3)
    expected = {face_cone(FULL3), from_inequalities(FULL3, [W1]), from_inequalities(FULL3, [W2]),
                from_inequalities(FULL3, [W1, W2])}
    assert set(cones) == expected
    assert BGM.special_cones_in_face(Subspace.full(1)) == (face_cone(Subspace.full(1)),) or \
        list(BGM.special_cones_in_face(Subspace.full(1))) == [face_cone(Subspace.full(1))]
    a1 = set(A1.special_cones_in_face(Subspace.full(1)))
    assert a1 == {face_cone(Subspace.full(1)), from_inequalities(Subspace.full(1), [[1]])}


@given(st.lists(st.integers(-3, 3), min_size=3, max_size=3).filter(any))
def test_closure_is_idempotent_and_contains_the_ray(v):
    c = conical_hull([v], 3)
    sp = Q1.special_cone_closure(c)
    assert sp.contains(vector(v))
    assert Q1.special_cone_closure(sp) == sp
    assert Q1.is_special_cone(sp)


@given(st.lists(st.integers(-3, 3), min_size=3, max_size=3).filter(any))
def test_closure_preserves_the_attracting_set(v):
    c = conical_hull([v], 3)
    sp = Q1.special_cone_closure(c)
    assert Q1.attracting(sp) == Q1.attracting(c)
    assert Q1.vanishing(sp.carrier) == Q1.vanishing(c.carrier)


def test_hall_compose_examples():
    zero = face_cone(Subspace.zero(3))
    for s in Q1.special_cones():
        assert Q1.hall_compose(zero, s) == s
    assert Q1.hall_compose(face_cone(FULL3), face_cone(FULL3)) == face_cone(FULL3)
    x = LinearTorusStack.build(2, [[1, 0], [0, 1]])
    quadrant = conical_hull([[1, 0], [0, 1]], 2)
    assert x.hall_compose(conical_hull([[1, 0]], 2), quadrant) == quadrant


def test_hall_compose_needs_nested_spans():
    c = face_cone(FULL3)
    with pytest.raises(NotAMorphism):
        Q1.hall_compose(c, face_cone(DIAG))


def test_induction_on_the_affine_line():
    b = origin(A1.grad_restrict(Subspace.full(1)))
    pos = from_inequalities(Subspace.full(1), [[1]])
    assert A1.hall_induce(pos, b) == A1.whole()
    assert A1.hall_induce(face_cone(Subspace.full(1)), b) == origin(A1)


def test_graded_pullback_on_the_affine_line():
    full = Subspace.full(1)
    assert A1.graded_pullback(full, A1.whole()) == origin(A1.grad_restrict(full))
    assert A1.graded_pullback(Subspace.zero(1), A1.whole()) == A1.whole()
    nz = StrataMotive.of(Stratum.of(1, nonzero=[0]))
    assert A1.graded_pullback(full, nz).is_zero()


def test_stratum_faces_use_the_weights_of_zero_and_free_coordinates():
    open_s = Stratum.of(3, nonzero=[0, 1])
    assert Q1.stratum_special_faces(open_s) == [DIAG]
    assert len(Q1.stratum_special_faces(Stratum.of(3, zero=[0, 1]))) == 4
    assert set(Q1.stratum_special_faces(Q1.top_stratum)) == set(Q1.special_faces)


def test_intrinsic_stratum_faces_drop_zero_coordinates():
    assert Q1.stratum_special_faces(Stratum.of(3, zero=[0, 1]), intrinsic=True) == [FULL3]


def test_strata_from_another_model_are_rejected():
    with pytest.raises(BasisMismatch):
        Q1.stratum_special_faces(Stratum.of(1, free=[0]))


def test_faces_outside_the_lattice_are_rejected():
    u = A1.open_substack([0])
    with pytest.raises(DegenerateCone):
        u.grad_restrict(Subspace.full(1))


def test_open_substack_lattice_and_faces():
    x = LinearTorusStack.build(2, [[1, 0], [0, 1]])
    u = x.open_substack([0])
    assert u.lattice == Subspace.span([[0, 1]], 2)
    assert u.face_rank == 1
    assert set(u.special_faces) == {Subspace.zero(2), Subspace.span([[0, 1]], 2)}


def test_restriction_to_an_open_part_keeps_compatible_strata():
    u = A1.open_substack([0])
    assert A1.restrict_to_open(A1.whole(), u) == u.whole()
    assert A1.restrict_to_open(origin(A1), u).is_zero()


def test_induced_classes_realize_to_attracting_loci():
    # For the positive half-space of Q1 the attracting set of the origin's
    # fixed locus is the line where the weight (0,-1,1) coordinate vanishes.
    half = from_inequalities(FULL3, [W1])
    fixed = origin(Q1.grad_restrict(FULL3))
    got = Q1.hall_induce(half, fixed)
    assert got == StrataMotive.of(Stratum.of(3, zero=[1], free=[0]))
    assert sch_realize(got) == sch_realize(StrataMotive.of(Stratum.of(3, zero=[1], free=[0])))
