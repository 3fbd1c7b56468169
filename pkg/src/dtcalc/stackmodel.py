"""Stack models exposing the component-lattice interface.

Two models are provided.

:class:`LinearTorusStack`
    A split torus of rank ``n`` acting on affine space with integer weights,
    optionally restricted to the open substack where some coordinates are
    nonzero.  Its component lattice is a subspace of Q^n (all of Q^n for the
    closed case) with trivial face automorphisms.  Special faces are the flats
    of the weight arrangement, and the special closure of a cone keeps the
    weights vanishing on it and those nonnegative on it.

:class:`TableStack`
    A stack described by tables: declared faces and cones (embedded in some
    Q^n only to give them canonical keys), per-face bases of strata, and the
    linear maps that Hall induction and graded restriction induce on them.

Both models answer the same questions, so the measure and epsilon engines are
written once against that shared interface.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import BasisMismatch, DegenerateCone, NotAMorphism
from .exactq import (
    Arrangement,
    Cone,
    Subspace,
    Vector,
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
from .motives import LaurentL, StrataMotive, Stratum, TableClass


@dataclass(frozen=True)
class LinearTorusStack:
    """The quotient V/T, or its open part where the ``nonzero`` coordinates are invertible."""

    rank: int
    weights: tuple[tuple[int, ...], ...]
    coords: tuple[int, ...]
    nonzero: frozenset[int] = frozenset()
    name: str = field(default="", compare=False)

    @staticmethod
    def build(rank: int, weights: Iterable[Sequence[int]], nonzero: Iterable[int] = (),
              name: str = "") -> LinearTorusStack:
        ws = tuple(tuple(int(x) for x in w) for w in weights)
        return LinearTorusStack(rank, ws, tuple(range(len(ws))), frozenset(nonzero), name)

    def __post_init__(self) -> None:
        if len(self.weights) != len(self.coords):
            raise ValueError("one weight per coordinate is required")
        if len(set(self.coords)) != len(self.coords):
            raise ValueError("coordinate labels must be distinct")
        for w in self.weights:
            if len(w) != self.rank:
                raise ValueError(f"weight {w} does not have length {self.rank}")
        if not self.nonzero <= set(self.coords):
            raise ValueError("nonzero constraints must refer to coordinates of the model")

    # -- basic data ----------------------------------------------------------

    @cached_property
    def _weight_map(self) -> dict[int, Vector]:
        return {c: vector(w) for c, w in zip(self.coords, self.weights)}

    def weight(self, c: int) -> Vector:
        return self._weight_map[c]

    @property
    def dim(self) -> int:
        return len(self.coords) - self.rank

    @cached_property
    def lattice(self) -> Subspace:
        """The rational component lattice: cocharacters fixing the nonzero coordinates."""
        if not self.nonzero:
            return Subspace.full(self.rank)
        return kernel([self.weight(c) for c in sorted(self.nonzero)], self.rank)

    @property
    def face_rank(self) -> int:
        """Largest dimension of a non-degenerate face."""
        return self.lattice.dim

    @cached_property
    def central_face(self) -> Subspace:
        return kernel([self.weight(c) for c in self.coords], self.rank) if self.coords \
            else Subspace.full(self.rank)

    @property
    def crk(self) -> int:
        return self.central_face.dim

    @cached_property
    def special_faces(self) -> tuple[Subspace, ...]:
        return tuple(self.stratum_special_faces(self.top_stratum))

    @cached_property
    def top_stratum(self) -> Stratum:
        """The whole model as a single coordinate stratum."""
        return Stratum(frozenset(), self.nonzero, frozenset(self.coords) - self.nonzero, self.rank)

    def whole(self) -> StrataMotive:
        return StrataMotive.of(self.top_stratum)

    def fine_strata(self) -> list[Stratum]:
        return sorted(self.top_stratum.refine(), key=Stratum.sort_key)

    def coordinate_strata(self) -> list[Stratum]:
        """Every coordinate stratum (each free coordinate zero, nonzero or free)."""
        rest = [c for c in self.coords if c not in self.nonzero]
        out = []
        for states in _product("0ga", len(rest)):
            z = {c for c, s in zip(rest, states) if s == "0"}
            g = {c for c, s in zip(rest, states) if s == "g"}
            a = {c for c, s in zip(rest, states) if s == "a"}
            out.append(Stratum(frozenset(z), frozenset(g) | self.nonzero, frozenset(a), self.rank))
        return out

    def check_stratum(self, s: Stratum) -> None:
        if s.rank != self.rank or set(s.coords) != set(self.coords) or not self.nonzero <= s.nonzero:
            raise BasisMismatch(f"{s.label} is not a stratum of {self.describe()}")

    def describe(self) -> str:
        ws = ", ".join("(" + ",".join(str(x) for x in w) + ")" for w in self.weights)
        core = f"A^{len(self.coords)}/Gm^{self.rank} weights [{ws}]"
        if self.nonzero:
            core += " with nonzero " + ",".join(f"x{c}" for c in sorted(self.nonzero))
        return core

    # -- weights against faces and cones ------------------------------------

    def vanishing(self, face: Subspace) -> frozenset[int]:
        return frozenset(c for c in self.coords if face.vanishes(self.weight(c)))

    def attracting(self, cone: Cone) -> frozenset[int]:
        """Coordinates whose weight is nonnegative on the cone."""
        gens = cone.generators
        return frozenset(c for c in self.coords if all(dot(self.weight(c), g) >= 0 for g in gens))

    def _check_in_lattice(self, face: Subspace) -> None:
        if face.ambient != self.rank or not face <= self.lattice:
            raise DegenerateCone(f"{face} is not a face of {self.describe()}")

    # -- faces ----------------------------------------------------------------

    def grad_restrict(self, alpha: Subspace) -> LinearTorusStack:
        """The graded component X_alpha: keep the coordinates fixed by alpha."""
        self._check_in_lattice(alpha)
        keep = [i for i, c in enumerate(self.coords) if alpha.vanishes(self.weight(c))]
        return LinearTorusStack(
            self.rank,
            tuple(self.weights[i] for i in keep),
            tuple(self.coords[i] for i in keep),
            self.nonzero,
            self.name,
        )

    def stratum_special_faces(self, s: Stratum, intrinsic: bool = False) -> list[Subspace]:
        """Faces of X carried by a coordinate stratum.

        The lattice of the stratum is cut out by its nonzero coordinates.  By
        default its faces are the special faces of X inside that lattice, the
        flats of the free and zero weights.  This is the family that keeps
        epsilon additive when a stratum is cut into smaller ones.  With
        ``intrinsic`` only the free weights are used, giving the special
        faces of the stratum as a stack in its own right.
        """
        self.check_stratum(s)
        base = kernel([self.weight(c) for c in sorted(s.nonzero)], self.rank) if s.nonzero \
            else Subspace.full(self.rank)
        cols = sorted(s.free) if intrinsic else sorted(s.free | s.zero)
        return _flats_cached(Arrangement.of(base, [self.weight(c) for c in cols]))

    def generator_faces(self, gen: Stratum, intrinsic: bool = False) -> list[Subspace]:
        return self.stratum_special_faces(gen, intrinsic)

    # -- cones ------------------------------------------------------------------

    @lru_cache(maxsize=None)
    def special_cone_closure(self, cone: Cone) -> Cone:
        self._check_in_lattice(cone.carrier)
        a0 = self.vanishing(cone.carrier)
        plus = self.attracting(cone) - a0
        e = kernel([self.weight(c) for c in sorted(a0)], self.rank) if a0 else Subspace.full(self.rank)
        return from_inequalities(e, [self.weight(c) for c in sorted(plus)])

    def is_special_cone(self, cone: Cone) -> bool:
        return self.special_cone_closure(cone) == cone

    @lru_cache(maxsize=None)
    def special_cones_in_face(self, face: Subspace) -> tuple[Cone, ...]:
        self._check_in_lattice(face)
        directions: dict[Vector, Vector] = {}
        for c in self.coords:
            w = self.weight(c)
            r = face.restrict(w)
            if any(r):
                directions.setdefault(primitive(r), w)
        reps = [directions[k] for k in sorted(directions)]
        found: set[Cone] = set()
        for size in range(len(reps) + 1):
            for subset in combinations(reps, size):
                cone = from_inequalities(face, subset)
                if cone.carrier == face and self.is_special_cone(cone):
                    found.add(cone)
        return tuple(sorted(found, key=Cone.key))

    def special_cones(self) -> list[Cone]:
        return [c for f in self.special_faces for c in self.special_cones_in_face(f)]

    @lru_cache(maxsize=None)
    def hall_compose(self, first: Cone, second: Cone) -> Cone:
        """first ^ second: extend ``first`` along ``second`` in the larger face."""
        if not first.carrier <= second.carrier:
            raise NotAMorphism(f"span of {first} is not inside the face of {second}")
        big = second.carrier
        positive = self.attracting(first) - self.vanishing(first.carrier)
        d = from_inequalities(big, [self.weight(c) for c in sorted(positive)])
        if d.carrier != big:
            raise NotAMorphism(f"no full-dimensional special cone around {first} in {big}")
        return intersect(second, d)

    @lru_cache(maxsize=None)
    def join(self, face: Subspace, cone: Cone) -> Cone:
        """The special closure of the hull of ``face`` and ``cone``."""
        hull = conical_hull(cone.rays, self.rank, face.basis + cone.lineality.basis)
        return self.special_cone_closure(hull)

    def cone_contains_face(self, cone: Cone, face: Subspace) -> bool:
        return face <= cone.lineality

    # -- motives ----------------------------------------------------------------

    @lru_cache(maxsize=None)
    def _induce_stratum(self, cone: Cone, s: Stratum) -> Stratum:
        fixed = self.vanishing(cone.carrier)
        if set(s.coords) != fixed or s.rank != self.rank:
            raise BasisMismatch(f"{s.label} is not a stratum of the graded component of {cone}")
        attract = self.attracting(cone)
        outside = frozenset(self.coords) - fixed
        return Stratum(s.zero | (outside - attract), s.nonzero, s.free | (outside & attract), self.rank)

    def hall_induce(self, cone: Cone, m: StrataMotive) -> StrataMotive:
        """Hall induction along ``cone`` from X_span(cone) to X."""
        def one(k):
            if not isinstance(k, Stratum):
                raise BasisMismatch(f"{k} is not a torus stratum")
            return StrataMotive.of(self._induce_stratum(cone, k))
        return m.map_classes(one)

    def restrict_stratum(self, s: Stratum, alpha: Subspace) -> Stratum | None:
        """The alpha-fixed part of a stratum, as a stratum of X_alpha (None if empty)."""
        fixed = self.vanishing(alpha)
        if any(c not in fixed for c in s.nonzero):
            return None
        return Stratum(s.zero & fixed, s.nonzero, s.free & fixed, s.rank)

    def graded_pullback(self, alpha: Subspace, m: StrataMotive) -> StrataMotive:
        def one(k):
            if not isinstance(k, Stratum):
                raise BasisMismatch(f"{k} is not a torus stratum")
            self.check_stratum(k)
            r = self.restrict_stratum(k, alpha)
            return StrataMotive.of(r) if r is not None else StrataMotive.zero()
        return m.map_classes(one)

    def restrict_generator(self, gen: Stratum, beta: Subspace) -> StrataMotive:
        r = self.restrict_stratum(gen, beta)
        return StrataMotive.of(r) if r is not None else StrataMotive.zero()

    def induce_from(self, alpha: Subspace, cone: Cone, m: StrataMotive) -> StrataMotive:
        """Hall induction for X_alpha along a cone containing alpha."""
        return self.grad_restrict(alpha).hall_induce(cone, m)

    def automorphisms(self, face: Subspace) -> int:
        return 1

    def open_substack(self, nonzero: Iterable[int]) -> LinearTorusStack:
        """The open part where the given coordinates are also invertible."""
        return LinearTorusStack(self.rank, self.weights, self.coords,
                                self.nonzero | frozenset(nonzero), self.name)

    def restrict_to_open(self, m: StrataMotive, u: LinearTorusStack) -> StrataMotive:
        """Pull a motive back to an open substack with the same coordinates."""
        if u.coords != self.coords or not self.nonzero <= u.nonzero:
            raise BasisMismatch(f"{u.describe()} is not an open substack of {self.describe()}")
        return StrataMotive({s: c for s, c in m.refined().items() if u.nonzero <= s.nonzero})


@lru_cache(maxsize=None)
def _flats_cached(arr: Arrangement) -> list[Subspace]:
    return flats(arr)


def _product(alphabet: str, n: int) -> list[tuple[str, ...]]:
    out: list[tuple[str, ...]] = [()]
    for _ in range(n):
        out = [p + (a,) for p in out for a in alphabet]
    return out


# --- tabulated stacks --------------------------------------------------------


@dataclass
class TableFace:
    ident: str
    subspace: Subspace
    classes: dict[str, TableClass]
    tot: dict[str, StrataMotive]
    restrict: dict[str, StrataMotive]


@dataclass
class TableCone:
    ident: str
    face: str
    cone: Cone
    star: dict[str, StrataMotive]


class TableStack:
    """A stack given by declared faces, cones, strata bases and induction tables.

    The central face's basis is the basis of X itself.  Every face carries a
    pushforward table ``tot`` (its own face cone induces along it) and a
    restriction table from the basis of X.  Cones other than face cones carry
    their own induction table ``star``.  Compositions and joins that are not
    forced by the identity rules must be tabulated.
    """

    def __init__(self, name: str, ambient: int, dim: int, central: str,
                 faces: Sequence[TableFace], cones: Sequence[TableCone],
                 composites: Mapping[str, StrataMotive] | None = None,
                 joins: Mapping[tuple[str, str], str] | None = None,
                 compositions: Mapping[tuple[str, str], str] | None = None,
                 automorphisms: Mapping[str, int] | None = None) -> None:
        self.name = name
        self.ambient = ambient
        self.dim = dim
        self.faces = {f.ident: f for f in faces}
        if central not in self.faces:
            raise ValueError(f"central face {central!r} is not declared")
        self.central = central
        self.cones = {c.ident: c for c in cones}
        for c in cones:
            if c.face not in self.faces:
                raise ValueError(f"cone {c.ident!r} sits in an undeclared face {c.face!r}")
            if c.cone.carrier != self.faces[c.face].subspace:
                raise DegenerateCone(f"cone {c.ident!r} does not span face {c.face!r}")
        self.composites = dict(composites or {})
        self.joins = dict(joins or {})
        self.compositions = dict(compositions or {})
        self._aut = dict(automorphisms or {})
        self._face_by_space = {f.subspace: f.ident for f in faces}
        self._cone_ids: dict[Cone, str] = {}
        for f in faces:
            self._cone_ids[face_cone(f.subspace)] = f.ident
        for c in cones:
            if c.cone in self._cone_ids:
                raise ValueError(f"cone {c.ident!r} duplicates {self._cone_ids[c.cone]!r}")
            self._cone_ids[c.cone] = c.ident

    def _data(self) -> tuple:
        return (self.ambient, self.dim, self.central, self.faces, self.cones, self.composites,
                self.joins, self.compositions, self._aut)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TableStack):
            return NotImplemented
        return self._data() == other._data()

    __hash__ = None  # type: ignore[assignment]

    # -- lookups -------------------------------------------------------------------

    def face_id(self, face: Subspace) -> str:
        try:
            return self._face_by_space[face]
        except KeyError:
            raise BasisMismatch(f"{face} is not a declared face of {self.name}") from None

    def cone_id(self, cone: Cone) -> str:
        try:
            return self._cone_ids[cone]
        except KeyError:
            raise BasisMismatch(f"{cone} is not a declared cone of {self.name}") from None

    def cone_by_id(self, ident: str) -> Cone:
        if ident in self.faces:
            return face_cone(self.faces[ident].subspace)
        return self.cones[ident].cone

    # -- shared interface -------------------------------------------------------

    @property
    def classes(self) -> dict[str, TableClass]:
        return self.faces[self.central].classes

    @property
    def special_faces(self) -> tuple[Subspace, ...]:
        return tuple(sorted((f.subspace for f in self.faces.values()), key=Subspace.key))

    @property
    def central_face(self) -> Subspace:
        return self.faces[self.central].subspace

    @property
    def crk(self) -> int:
        return self.central_face.dim

    @property
    def face_rank(self) -> int:
        return max(f.subspace.dim for f in self.faces.values())

    def whole(self) -> StrataMotive:
        return StrataMotive({c: 1 for c in self.classes.values()})

    def special_cones_in_face(self, face: Subspace) -> tuple[Cone, ...]:
        fid = self.face_id(face)
        out = [face_cone(face)] + [c.cone for c in self.cones.values() if c.face == fid]
        return tuple(sorted(out, key=Cone.key))

    def special_cones(self) -> list[Cone]:
        return [c for f in self.special_faces for c in self.special_cones_in_face(f)]

    def special_cone_closure(self, cone: Cone) -> Cone:
        self.cone_id(cone)
        return cone

    def is_special_cone(self, cone: Cone) -> bool:
        return cone in self._cone_ids

    def cone_contains_face(self, cone: Cone, face: Subspace) -> bool:
        return face <= cone.lineality

    def hall_compose(self, first: Cone, second: Cone) -> Cone:
        if not first.carrier <= second.carrier:
            raise NotAMorphism(f"span of {first} is not inside the face of {second}")
        if first.is_face_cone():
            return second
        if second.is_face_cone() and first.carrier == second.carrier:
            return first
        key = (self.cone_id(first), self.cone_id(second))
        if key not in self.compositions:
            raise NotAMorphism(f"composition {key[0]} ^ {key[1]} is not tabulated")
        return self.cone_by_id(self.compositions[key])

    def join(self, face: Subspace, cone: Cone) -> Cone:
        if face.dim == 0 or face <= cone.lineality:
            return cone
        if face == cone.carrier:
            return face_cone(face)
        key = (self.face_id(face), self.cone_id(cone))
        if key not in self.joins:
            raise NotAMorphism(f"join of {key[0]} with {key[1]} is not tabulated")
        return self.cone_by_id(self.joins[key])

    def _star_table(self, cone: Cone) -> tuple[TableFace, dict[str, StrataMotive]]:
        ident = self.cone_id(cone)
        if ident in self.faces:
            f = self.faces[ident]
            return f, f.tot
        c = self.cones[ident]
        return self.faces[c.face], c.star

    def hall_induce(self, cone: Cone, m: StrataMotive) -> StrataMotive:
        face, table = self._star_table(cone)

        def one(k):
            if not isinstance(k, TableClass) or k.label not in face.classes or k.label not in table:
                raise BasisMismatch(f"{k} is not a basis class over face {face.ident!r}")
            return table[k.label]
        return m.map_classes(one)

    def graded_pullback(self, alpha: Subspace, m: StrataMotive) -> StrataMotive:
        face = self.faces[self.face_id(alpha)]

        def one(k):
            if not isinstance(k, TableClass) or k.label not in self.classes:
                raise BasisMismatch(f"{k} is not a basis class of {self.name}")
            return face.restrict.get(k.label, StrataMotive.zero())
        return m.map_classes(one)

    def generator_faces(self, gen: object = None, intrinsic: bool = False) -> list[Subspace]:
        self._check_generator(gen)
        return list(self.special_faces)

    def restrict_generator(self, gen: object, beta: Subspace) -> StrataMotive:
        self._check_generator(gen)
        return self.graded_pullback(beta, self.whole())

    def _check_generator(self, gen: object) -> None:
        if gen is not None and gen != self.whole():
            raise BasisMismatch("tabulated stacks only support the whole stack as a generator")

    def induce_from(self, alpha: Subspace, cone: Cone, m: StrataMotive) -> StrataMotive:
        if alpha == self.central_face:
            return self.hall_induce(cone, m)
        if cone == face_cone(alpha):
            return m
        raise BasisMismatch(f"no induction table from face {self.face_id(alpha)!r}")

    def automorphisms(self, face: Subspace) -> int:
        return self._aut.get(self.face_id(face), 1)

    def describe(self) -> str:
        return f"table stack {self.name!r}"


def composite(parts: Mapping[str, object], classes: Mapping[str, TableClass],
              composites: Mapping[str, StrataMotive]) -> StrataMotive:
    """Expand a declared combination of basis labels and composite names."""
    acc = []
    for label, c in parts.items():
        if label in classes:
            acc.append(StrataMotive.of(classes[label], c))
        elif label in composites:
            acc.append(composites[label].scale(c))
        else:
            raise BasisMismatch(f"unknown class label {label!r}")
    return StrataMotive.total(acc)


StackModel = LinearTorusStack | TableStack


# --- module-level operations --------------------------------------------------


def special_faces(x: StackModel) -> list[Subspace]:
    return list(x.special_faces)


def central_face(x: StackModel) -> Subspace:
    return x.central_face


def grad_restrict(x: LinearTorusStack, alpha: Subspace) -> LinearTorusStack:
    return x.grad_restrict(alpha)


def special_cone_closure(x: StackModel, cone: Cone) -> Cone:
    return x.special_cone_closure(cone)


def special_cones_in_face(x: StackModel, face: Subspace) -> list[Cone]:
    return list(x.special_cones_in_face(face))


def hall_compose(x: StackModel, first: Cone, second: Cone) -> Cone:
    return x.hall_compose(first, second)


def hall_induce(x: StackModel, cone: Cone, m: StrataMotive) -> StrataMotive:
    return x.hall_induce(cone, m)


def graded_pullback(x: StackModel, alpha: Subspace, m: StrataMotive) -> StrataMotive:
    return x.graded_pullback(alpha, m)


def stratum_special_faces(x: LinearTorusStack, s: Stratum, intrinsic: bool = False) -> list[Subspace]:
    return x.stratum_special_faces(s, intrinsic)


def table_class(label: str, motive: LaurentL) -> TableClass:
    return TableClass(label, motive)


__all__ = [
    "LinearTorusStack",
    "TableStack",
    "TableFace",
    "TableCone",
    "StackModel",
    "composite",
    "special_faces",
    "central_face",
    "grad_restrict",
    "special_cone_closure",
    "special_cones_in_face",
    "hall_compose",
    "hall_induce",
    "graded_pullback",
    "stratum_special_faces",
    "table_class",
    "Fraction",
]
