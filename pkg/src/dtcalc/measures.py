"""Stability and prestability measures on special cone arrangements.

A stability measure assigns a rational number to cones so that on every face
the full-dimensional cones carry total mass one.  Measures built on a finer
arrangement (ordering cones of a quiver, chambers of the weight arrangement)
are transported to a stack model with :func:`pullback_measure`, which sums the
mass of every source cone into its special closure.

Prestability measures live on the morphisms of the Hall category: objects are
special faces and a morphism ``alpha -> beta`` is a full-dimensional special
cone of ``beta`` containing ``alpha``.  They form a group under the
convolution :func:`convolve`, with unit :func:`delta` and inverse
:func:`invert`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import factorial
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import ArrangementMismatch, BadDimensionVector, MeasureInvalid
from .exactq import (
    Arrangement,
    Cone,
    Subspace,
    as_rational,
    chambers,
    conical_hull,
    face_cone,
)
from .stackmodel import StackModel


class StabilityMeasure:
    """Rational values on cones, together with the faces the values are spread over."""

    def __init__(self, values: Mapping[Cone, object], faces: Iterable[Subspace], tag: str = "") -> None:
        self.values: dict[Cone, Fraction] = {}
        for c, v in values.items():
            r = as_rational(v)
            if r:
                self.values[c] = self.values.get(c, Fraction(0)) + r
        self.faces = frozenset(faces)
        self.tag = tag
        for c in self.values:
            if c.carrier not in self.faces:
                raise ArrangementMismatch(f"cone {c} lies in no declared face of the measure")

    def __call__(self, cone: Cone) -> Fraction:
        return self.values.get(cone, Fraction(0))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StabilityMeasure):
            return NotImplemented
        return self.values == other.values and self.faces == other.faces

    def __repr__(self) -> str:
        return f"StabilityMeasure({self.tag or 'anonymous'}, {len(self.values)} nonzero values)"

    def mass(self, face: Subspace) -> Fraction:
        return sum((v for c, v in self.values.items() if c.carrier == face), Fraction(0))

    def perturbed(self, cone: Cone, delta: object) -> StabilityMeasure:
        vals = dict(self.values)
        vals[cone] = vals.get(cone, Fraction(0)) + as_rational(delta)
        return StabilityMeasure(vals, self.faces, self.tag + "'")


# --- built-in measures ------------------------------------------------------


def trivial_measure(x: StackModel) -> StabilityMeasure:
    """Mass one on each special face, viewed as a cone."""
    return StabilityMeasure({face_cone(f): 1 for f in x.special_faces}, x.special_faces, "trivial")


def explicit_measure(x: StackModel, values: Mapping[Cone, object], tag: str = "explicit") -> StabilityMeasure:
    return StabilityMeasure(values, x.special_faces, tag)


def quiver_arrangement_faces(vertices: int) -> list[tuple[tuple[int, ...], ...]]:
    """Set partitions of the vertices, each block sorted, blocks ordered by first element."""
    parts: list[list[list[int]]] = [[]]
    for v in range(vertices):
        nxt = []
        for p in parts:
            for i in range(len(p)):
                nxt.append(p[:i] + [p[i] + [v]] + p[i + 1:])
            nxt.append(p + [[v]])
        parts = nxt
    return sorted(tuple(tuple(b) for b in p) for p in parts)


def _partition_subspace(n: int, blocks: Sequence[Sequence[int]]) -> Subspace:
    return Subspace.span([[1 if i in b else 0 for i in range(n)] for b in blocks], n)


def ordering_cone(n: int, ordered_blocks: Sequence[Sequence[int]]) -> Cone:
    """The cone {x_B1 >= x_B2 >= ...} in the face where x is constant on each block."""
    cumulative: list[list[int]] = []
    seen: set[int] = set()
    for b in ordered_blocks[:-1]:
        seen |= set(b)
        cumulative.append([1 if i in seen else 0 for i in range(n)])
    return conical_hull(cumulative, n, [[1] * n] if n else [])


def _permutations(items: Sequence[int]) -> Iterator[tuple[int, ...]]:
    if not items:
        yield ()
        return
    for i, first in enumerate(items):
        for rest in _permutations(items[:i] + items[i + 1:]):
            yield (first,) + rest


def quiver_measure(vertices: int, edges: Sequence[tuple[int, int]], slopes: Sequence[object],
                   dimension: Sequence[int] | None = None) -> StabilityMeasure:
    """The measure of a slope function on the ordering arrangement of Q^vertices.

    Each ordering chamber of a set-partition face gets ``1/|S|`` when the block
    slopes are non-increasing along the ordering and 0 otherwise, where ``|S|``
    counts the orderings that keep the slope sequence.  The slope of a block is
    the average of its vertex slopes.
    """
    if dimension is not None and any(int(d) != 1 for d in dimension):
        raise BadDimensionVector(f"only the all-ones dimension vector is supported, got {list(dimension)}")
    if dimension is not None and len(dimension) != vertices:
        raise BadDimensionVector("dimension vector length differs from the number of vertices")
    if len(slopes) != vertices:
        raise BadDimensionVector("one slope per vertex is required")
    for s, t in edges:
        if not (0 <= s < vertices and 0 <= t < vertices):
            raise BadDimensionVector(f"edge ({s}, {t}) refers to a missing vertex")
    zeta = [as_rational(s) for s in slopes]
    values: dict[Cone, Fraction] = {}
    faces = []
    for blocks in quiver_arrangement_faces(vertices):
        faces.append(_partition_subspace(vertices, blocks))
        block_slope = [sum((zeta[i] for i in b), Fraction(0)) / len(b) for b in blocks]
        multiplicity: dict[Fraction, int] = {}
        for s in block_slope:
            multiplicity[s] = multiplicity.get(s, 0) + 1
        stab = 1
        for m in multiplicity.values():
            stab *= factorial(m)
        for order in _permutations(list(range(len(blocks)))):
            seq = [block_slope[i] for i in order]
            if all(seq[i] >= seq[i + 1] for i in range(len(seq) - 1)):
                values[ordering_cone(vertices, [blocks[i] for i in order])] = Fraction(1, stab)
    return StabilityMeasure(values, faces, "quiver")


def chamber_measure(x: StackModel) -> StabilityMeasure:
    """Equal mass on every chamber of the weight arrangement inside each special face."""
    values: dict[Cone, Fraction] = {}
    for f in x.special_faces:
        cones = x.special_cones_in_face(f)
        walls = [w for c in cones for w in c.facet_covectors()]
        cells = chambers(Arrangement.of(f, walls))
        for cell in cells:
            values[cell] = Fraction(1, len(cells))
    return StabilityMeasure(values, x.special_faces, "chambers")


def canonical_measure(x: StackModel) -> StabilityMeasure:
    """The chamber measure carried to the special cones of ``x``."""
    m = pullback_measure(chamber_measure(x), x)
    m.tag = "canonical"
    return m


# --- pullback and checks ------------------------------------------------------


def pullback_measure(mu: StabilityMeasure, x: StackModel) -> StabilityMeasure:
    """Sum the mass of every source cone into its special closure in ``x``."""
    targets = set(x.special_faces)
    missing = [f for f in targets if f not in mu.faces]
    if missing:
        raise ArrangementMismatch(f"the measure does not cover the special face {missing[0]}")
    values: dict[Cone, Fraction] = {}
    for cone, v in mu.values.items():
        if cone.carrier not in targets:
            continue
        closure = x.special_cone_closure(cone)
        values[closure] = values.get(closure, Fraction(0)) + v
    return StabilityMeasure(values, targets, mu.tag)


def partition_check(mu: StabilityMeasure, x: StackModel) -> bool:
    """Every special face carries total mass one, and only special cones carry mass."""
    special = set(x.special_cones())
    if any(c not in special for c in mu.values):
        return False
    return all(mu.mass(f) == 1 for f in x.special_faces)


def is_permissible(mu: StabilityMeasure, x: StackModel) -> bool:
    """Only finitely many cones carry mass.

    Measures here are finite dictionaries over models with finitely many
    special cones, so this always holds; it is kept as an explicit gate.
    """
    return True


# --- the Hall category and its incidence algebra ------------------------------


@dataclass(frozen=True)
class Morphism:
    source: Subspace
    cone: Cone

    @property
    def target(self) -> Subspace:
        return self.cone.carrier

    @property
    def is_identity(self) -> bool:
        return self.cone.is_face_cone() and self.source == self.cone.carrier


class HallCategory:
    """Special faces with special cones over inclusions, composed by ``hall_compose``."""

    def __init__(self, x: StackModel) -> None:
        self.x = x
        self.faces = list(x.special_faces)
        self.out: dict[Subspace, list[Morphism]] = {}
        for a in self.faces:
            arrows = []
            for b in self.faces:
                if not a <= b:
                    continue
                for c in x.special_cones_in_face(b):
                    if x.cone_contains_face(c, a):
                        arrows.append(Morphism(a, c))
            self.out[a] = arrows

    @cached_property
    def morphisms(self) -> list[Morphism]:
        return [m for a in self.faces for m in self.out[a]]

    def compose(self, first: Morphism, second: Morphism) -> Morphism:
        return Morphism(first.source, self.x.hall_compose(first.cone, second.cone))

    @cached_property
    def _factorizations(self) -> dict[Morphism, list[tuple[Morphism, Morphism]]]:
        table: dict[Morphism, list[tuple[Morphism, Morphism]]] = {m: [] for m in self.morphisms}
        for f in self.morphisms:
            for g in self.out[f.target]:
                table[self.compose(f, g)].append((f, g))
        return table

    def factorizations(self, m: Morphism) -> list[tuple[Morphism, Morphism]]:
        return self._factorizations[m]


class PrestabilityMeasure:
    """Rational values on the morphisms of a Hall category (missing morphisms are 0)."""

    def __init__(self, cat: HallCategory, values: Mapping[Morphism, object]) -> None:
        self.cat = cat
        self.values = {m: as_rational(v) for m, v in values.items() if as_rational(v)}

    def __call__(self, m: Morphism) -> Fraction:
        return self.values.get(m, Fraction(0))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PrestabilityMeasure):
            return NotImplemented
        return self.values == other.values

    def __repr__(self) -> str:
        return f"PrestabilityMeasure({len(self.values)} nonzero values)"


def delta(cat: HallCategory) -> PrestabilityMeasure:
    return PrestabilityMeasure(cat, {m: 1 for m in cat.morphisms if m.is_identity})


def to_prestability(mu: StabilityMeasure, x: StackModel, cat: HallCategory | None = None) -> PrestabilityMeasure:
    """P(alpha, sigma): mass of the cones of span(sigma) whose join with alpha is sigma."""
    cat = cat or HallCategory(x)
    values: dict[Morphism, Fraction] = {}
    for m in cat.morphisms:
        total = Fraction(0)
        for c in x.special_cones_in_face(m.target):
            v = mu(c)
            if v and x.join(m.source, c) == m.cone:
                total += v
        values[m] = total
    return PrestabilityMeasure(cat, values)


def convolve(mu: PrestabilityMeasure, nu: PrestabilityMeasure, x: StackModel | None = None) -> PrestabilityMeasure:
    """(mu * nu)(f) = sum over f = f1 ^ f2 of mu(f1) nu(f2)."""
    cat = mu.cat
    values = {}
    for m in cat.morphisms:
        values[m] = sum((mu(f) * nu(g) for f, g in cat.factorizations(m)), Fraction(0))
    return PrestabilityMeasure(cat, values)


def invert(mu: PrestabilityMeasure, x: StackModel | None = None) -> PrestabilityMeasure:
    """Convolution inverse as an alternating sum over chains of non-identity morphisms."""
    cat = mu.cat
    for a in cat.faces:
        if mu(Morphism(a, face_cone(a))) != 1:
            raise MeasureInvalid("only measures with value 1 on identities can be inverted")
    memo: dict[Morphism, Fraction] = {}

    def chains(m: Morphism) -> Fraction:
        # signed sum over m = f1 ^ f2 ^ ... ^ fn with every fi a non-identity
        if m in memo:
            return memo[m]
        total = Fraction(1) if m.is_identity else Fraction(0)
        for f, g in cat.factorizations(m):
            if f.is_identity:
                continue
            total -= mu(f) * chains(g)
        memo[m] = total
        return total

    return PrestabilityMeasure(cat, {m: chains(m) for m in cat.morphisms})


__all__ = [
    "StabilityMeasure",
    "PrestabilityMeasure",
    "HallCategory",
    "Morphism",
    "trivial_measure",
    "explicit_measure",
    "quiver_measure",
    "quiver_arrangement_faces",
    "ordering_cone",
    "chamber_measure",
    "canonical_measure",
    "pullback_measure",
    "partition_check",
    "is_permissible",
    "to_prestability",
    "convolve",
    "invert",
    "delta",
]
