from __future__ import annotations

from fractions import Fraction
from itertools import permutations, product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dtcalc.exactq import (
    Arrangement,
    Subspace,
    as_rational,
    chambers,
    conical_hull,
    dot,
    face_cone,
    flats,
    from_inequalities,
    intersect,
    kernel,
    primitive,
    vector,
)

small = st.integers(min_value=-4, max_value=4)


def vecs(n, count):
    return st.lists(st.lists(small, min_size=n, max_size=n), min_size=0, max_size=count)


def test_as_rational_parses_strings_and_rejects_floats():
    assert as_rational("3/6") == Fraction(1, 2)
    assert as_rational("-2") == Fraction(-2)
    with pytest.raises((TypeError, ValueError)):
        as_rational(0.5)


def test_primitive_clears_denominators_and_common_factors():
    assert primitive(vector(["1/2", "1/3", "0"])) == vector([3, 2, 0])
    assert primitive(vector([-4, 6])) == vector([-2, 3])


def test_kernel_of_quiver_weights_is_the_diagonal():
    k = kernel([[-1, 1, 0], [0, -1, 1]], 3)
    assert k.dim == 1
    assert k.contains(vector([1, 1, 1]))
    assert k == Subspace.span([[2, 2, 2]], 3)


def test_subspace_lattice_operations():
    a = Subspace.span([[1, 0, 0]], 3)
    b = Subspace.span([[0, 1, 0]], 3)
    assert (a + b).dim == 2
    assert a.intersect(b) == Subspace.zero(3)
    assert a < a + b
    assert not (a + b) <= a
    assert Subspace.full(3).intersect(a) == a


@given(vecs(4, 4))
def test_kernel_vectors_are_annihilated(rows):
    k = kernel(rows, 4)
    for v in k.basis:
        assert all(dot(vector(r), v) == 0 for r in rows)
    rank = Subspace.span(rows, 4).dim
    assert k.dim == 4 - rank


@given(vecs(3, 4))
def test_span_basis_is_canonical(rows):
    s = Subspace.span(rows, 3)
    t = Subspace.span(list(reversed(rows)) + [[a + b for a, b in zip(*rows[:2])]] if len(rows) >= 2 else rows, 3)
    assert s == t
    assert s.key() == t.key()


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=1, max_size=4))
def test_conical_hull_contains_generators_and_sums(gens):
    c = conical_hull(gens, 3)
    for g in gens:
        assert c.contains(vector(g))
    total = [sum(col) for col in zip(*gens)]
    assert c.contains(vector(total))


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=1, max_size=4))
def test_inequalities_and_generators_describe_the_same_cone(gens):
    c = conical_hull(gens, 3)
    d = from_inequalities(c.carrier, c.facet_covectors())
    assert c == d


def test_cone_string_form():
    c = from_inequalities(Subspace.full(2), [[-1, 1]])
    assert str(c) == "{-x1+x2>=0}"
    assert str(face_cone(Subspace.zero(2))) == "{0}"


def test_intersection_of_half_planes_is_a_quadrant():
    full = Subspace.full(2)
    q = intersect(from_inequalities(full, [[1, 0]]), from_inequalities(full, [[0, 1]]))
    assert q == conical_hull([[1, 0], [0, 1]], 2)
    assert q.contains(vector([1, 1]))
    assert not q.contains(vector([-1, 1]))


def _sign_vectors(covectors, n, box=3):
    """Brute force: the generic sign patterns met on an integer box."""
    seen = set()
    for p in product(range(-box, box + 1), repeat=n):
        signs = tuple((dot(vector(w), vector(p)) > 0) - (dot(vector(w), vector(p)) < 0) for w in covectors)
        if 0 not in signs:
            seen.add(signs)
    return seen


def test_braid_arrangement_has_six_chambers_and_five_flats():
    ws = [[1, -1, 0], [0, 1, -1], [1, 0, -1]]
    arr = Arrangement.of(Subspace.full(3), ws)
    assert len(chambers(arr)) == 6 == len(_sign_vectors(ws, 3))
    fl = flats(arr)
    assert sorted(f.dim for f in fl) == [1, 2, 2, 2, 3]


@given(st.lists(st.lists(st.integers(-2, 2), min_size=2, max_size=2), min_size=1, max_size=4))
def test_plane_chamber_count_matches_sign_patterns(ws):
    arr = Arrangement.of(Subspace.full(2), ws)
    live = [w for w in ws if any(w)]
    assert len(chambers(arr)) == max(1, len(_sign_vectors(live, 2, box=6)))


def test_arrangement_drops_parallel_and_vanishing_covectors():
    arr = Arrangement.of(Subspace.full(2), [[1, 0], [2, 0], [0, 0], [-1, 0]])
    assert len(arr.covectors) == 1


def test_permutation_chambers_of_the_braid_arrangement():
    ws = [[1, -1, 0], [0, 1, -1], [1, 0, -1]]
    cs = chambers(Arrangement.of(Subspace.full(3), ws))
    for perm in permutations(range(3)):
        p = [0, 0, 0]
        for rank, i in enumerate(perm):
            p[i] = 3 - rank
        assert sum(c.contains(vector(p)) for c in cs) == 1
