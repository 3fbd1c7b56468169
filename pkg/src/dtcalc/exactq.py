"""Exact rational linear algebra and small-dimensional polyhedral geometry.

Vectors are tuples of :class:`fractions.Fraction`.  Subspaces are kept in
reduced row echelon form and cones in a simultaneous generator/facet form, so
structural equality of these objects coincides with equality of the underlying
sets.  Dimensions in this package are tiny, which lets the double description
routine below stay simple.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce
from math import gcd, lcm
from typing import Iterable, Sequence

Rational = Fraction
Vector = tuple[Fraction, ...]


def as_rational(x: object) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot read {x!r} as an exact rational")


def vector(xs: Iterable[object]) -> Vector:
    return tuple(as_rational(x) for x in xs)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def _scale(c: Fraction, v: Vector) -> Vector:
    return tuple(c * x for x in v)


def _sub(u: Vector, v: Vector) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def _add(u: Vector, v: Vector) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def _neg(v: Vector) -> Vector:
    return tuple(-x for x in v)


def zero_vector(n: int) -> Vector:
    return (Fraction(0),) * n


def unit_vector(n: int, i: int) -> Vector:
    return tuple(Fraction(1 if j == i else 0) for j in range(n))


def primitive(v: Sequence[Fraction]) -> Vector:
    """Positive rescaling of ``v`` to a primitive integer vector."""
    if all(x == 0 for x in v):
        return tuple(Fraction(0) for _ in v)
    den = reduce(lcm, (x.denominator for x in v), 1)
    ints = [int(x * den) for x in v]
    g = reduce(gcd, (abs(i) for i in ints if i), 0)
    return tuple(Fraction(i // g) for i in ints)


def rref(rows: Sequence[Sequence[Fraction]], ncols: int) -> tuple[list[Vector], list[int]]:
    """Reduced row echelon form; returns the nonzero rows and pivot columns."""
    m = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        p = m[r][c]
        m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return [tuple(row) for row in m[:r]], pivots


def rank(rows: Sequence[Sequence[Fraction]], ncols: int) -> int:
    return len(rref(rows, ncols)[1]) if rows else 0


def _nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[Vector]:
    red, pivots = rref(rows, ncols) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(tuple(v))
    return basis


@dataclass(frozen=True)
class Subspace:
    """A linear subspace of Q^n held by the RREF basis of its span."""

    ambient: int
    basis: tuple[Vector, ...]

    @staticmethod
    def span(vectors: Iterable[Sequence[object]], ambient: int) -> Subspace:
        rows = [vector(v) for v in vectors]
        for v in rows:
            if len(v) != ambient:
                raise ValueError(f"vector {v} does not live in Q^{ambient}")
        red, _ = rref(rows, ambient) if rows else ([], [])
        return Subspace(ambient, tuple(red))

    @staticmethod
    def zero(n: int) -> Subspace:
        return Subspace(n, ())

    @staticmethod
    def full(n: int) -> Subspace:
        return Subspace.span([unit_vector(n, i) for i in range(n)], n)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def key(self) -> tuple:
        return (self.dim, self.basis)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(i for i, x in enumerate(b) if x != 0) for b in self.basis)

    def coords(self, v: Sequence[Fraction]) -> Vector:
        """Coordinates of ``v`` in the canonical basis (pivot entries)."""
        return tuple(v[p] for p in self.pivots)

    def from_coords(self, y: Sequence[Fraction]) -> Vector:
        acc = zero_vector(self.ambient)
        for c, b in zip(y, self.basis):
            if c:
                acc = _add(acc, _scale(c, b))
        return acc

    def contains(self, v: Sequence[Fraction]) -> bool:
        return tuple(v) == self.from_coords(self.coords(v))

    def __le__(self, other: Subspace) -> bool:  # type: ignore[override]
        return all(other.contains(b) for b in self.basis)

    def __lt__(self, other: Subspace) -> bool:  # type: ignore[override]
        return self.dim < other.dim and self <= other

    def annihilator(self) -> list[Vector]:
        """A basis of the covectors vanishing on this subspace."""
        return _nullspace(self.basis, self.ambient)

    def intersect(self, other: Subspace) -> Subspace:
        return kernel(self.annihilator() + other.annihilator(), self.ambient)

    def __add__(self, other: Subspace) -> Subspace:
        return Subspace.span(self.basis + other.basis, self.ambient)

    def restrict(self, covector: Sequence[Fraction]) -> Vector:
        """The covector restricted to this subspace, in basis coordinates."""
        return tuple(dot(covector, b) for b in self.basis)

    def vanishes(self, covector: Sequence[Fraction]) -> bool:
        return all(dot(covector, b) == 0 for b in self.basis)

    def to_json(self) -> list[list[str]]:
        return [[str(x) for x in b] for b in self.basis]

    def __str__(self) -> str:
        if not self.basis:
            return "{0}"
        if self.dim == self.ambient:
            return f"Q^{self.ambient}"
        return "span{" + ", ".join(_fmt_vec(b) for b in self.basis) + "}"


def _fmt_vec(v: Sequence[Fraction]) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


def kernel(matrix: Sequence[Sequence[object]], ncols: int | None = None) -> Subspace:
    """The canonical subspace {x : Mx = 0}."""
    rows = [vector(r) for r in matrix]
    if ncols is None:
        if not rows:
            raise ValueError("the number of columns is needed for an empty matrix")
        ncols = len(rows[0])
    return Subspace.span(_nullspace(rows, ncols), ncols)


# --- double description ---------------------------------------------------


def _double_description(d: int, inequalities: Sequence[Vector]) -> tuple[list[Vector], list[Vector]]:
    """Generators of {y in Q^d : a.y >= 0 for all a}.

    Returns ``(lineality basis, extreme rays)`` where the rays are extreme in
    the cone modulo its lineality space.
    """
    lin = [unit_vector(d, i) for i in range(d)]
    rays: list[Vector] = []
    seen: list[Vector] = []
    for a in inequalities:
        if all(x == 0 for x in a):
            continue
        seen.append(a)
        vals = [dot(a, l) for l in lin]
        j = next((i for i, v in enumerate(vals) if v != 0), None)
        if j is not None:
            l0, a0 = lin[j], vals[j]
            if a0 < 0:
                l0, a0 = _neg(l0), -a0
            lin = [_sub(l, _scale(vals[i] / vals[j], lin[j])) for i, l in enumerate(lin) if i != j]
            rays = [_sub(r, _scale(dot(a, r) / a0, l0)) for r in rays] + [l0]
        else:
            pos = [r for r in rays if dot(a, r) > 0]
            zer = [r for r in rays if dot(a, r) == 0]
            neg = [r for r in rays if dot(a, r) < 0]
            target = d - len(lin) - 2
            new = pos + zer
            for p in pos:
                tp = {i for i, b in enumerate(seen) if dot(b, p) == 0}
                for n in neg:
                    common = [seen[i] for i in tp if dot(seen[i], n) == 0]
                    if rank(common, d) != target:
                        continue
                    new.append(_sub(_scale(dot(a, p), n), _scale(dot(a, n), p)))
            rays = new
        rays = _prune(d, len(lin), seen, rays)
    return lin, rays


def _prune(d: int, nlin: int, ineqs: Sequence[Vector], rays: Sequence[Vector]) -> list[Vector]:
    out: list[Vector] = []
    keys: set[Vector] = set()
    for r in rays:
        if all(x == 0 for x in r):
            continue
        tight = [a for a in ineqs if dot(a, r) == 0]
        if rank(tight, d) != d - nlin - 1:
            continue
        k = primitive(r)
        if k not in keys:
            keys.add(k)
            out.append(k)
    return out


@dataclass(frozen=True)
class Cone:
    """A rational polyhedral cone, full-dimensional in its carrier (its span).

    Identity is decided by the carrier and the canonical facet list; facets are
    primitive integer covectors written in the carrier's basis coordinates.
    """

    carrier: Subspace
    facets: tuple[Vector, ...]
    lineality: Subspace = field(compare=False)
    rays: tuple[Vector, ...] = field(compare=False)

    @property
    def dim(self) -> int:
        return self.carrier.dim

    def key(self) -> tuple:
        return (self.carrier.key(), self.facets)

    @property
    def ambient(self) -> int:
        return self.carrier.ambient

    @property
    def generators(self) -> tuple[Vector, ...]:
        """Rays together with both orientations of the lineality basis."""
        return self.rays + self.lineality.basis + tuple(_neg(b) for b in self.lineality.basis)

    def facet_covectors(self) -> tuple[Vector, ...]:
        """Facets as ambient covectors (supported on the carrier's pivots)."""
        out = []
        for f in self.facets:
            w = [Fraction(0)] * self.ambient
            for c, p in zip(f, self.carrier.pivots):
                w[p] = c
            out.append(tuple(w))
        return tuple(out)

    def contains(self, v: Sequence[Fraction]) -> bool:
        return contains(self, v)

    def __le__(self, other: Cone) -> bool:  # type: ignore[override]
        return all(other.contains(g) for g in self.generators)

    def is_face_cone(self) -> bool:
        return not self.facets

    def __str__(self) -> str:
        if not self.facets:
            return str(self.carrier)
        ineq = ", ".join(_fmt_covector(w) + ">=0" for w in self.facet_covectors())
        if self.dim == self.ambient:
            return "{" + ineq + "}"
        return "{" + ineq + " in " + str(self.carrier) + "}"


def _fmt_covector(w: Sequence[Fraction]) -> str:
    parts = []
    for i, c in enumerate(w):
        if c == 0:
            continue
        name = f"x{i + 1}"
        if c == 1:
            parts.append(f"+{name}")
        elif c == -1:
            parts.append(f"-{name}")
        else:
            parts.append(f"{'+' if c > 0 else ''}{c}{name}")
    s = "".join(parts)
    return s[1:] if s.startswith("+") else s


def _cone_from_generators(rays: Sequence[Vector], lineality: Sequence[Vector], n: int) -> Cone:
    span = Subspace.span(list(rays) + list(lineality), n)
    s = span.dim
    dual_ineqs: list[Vector] = [span.coords(r) for r in rays]
    for l in lineality:
        y = span.coords(l)
        dual_ineqs += [y, _neg(y)]
    dual_lin, dual_rays = _double_description(s, dual_ineqs)
    assert not dual_lin, "a cone is always full-dimensional in its span"
    facets = tuple(sorted(primitive(f) for f in dual_rays))
    # canonical generators: recompute from the facets inside the span
    lin_y, rays_y = _double_description(s, list(facets))
    lin = Subspace.span([span.from_coords(y) for y in lin_y], n)
    complement = kernel(list(lin.basis), n) if lin.basis else Subspace.full(n)
    canon_rays = {primitive(_project(span.from_coords(y), lin, complement)) for y in rays_y}
    return Cone(span, facets, lin, tuple(sorted(canon_rays)))


def _project(r: Vector, lin: Subspace, complement: Subspace) -> Vector:
    """Component of ``r`` in ``complement`` along ``lin``."""
    if not lin.basis:
        return r
    rows = [tuple(b) for b in lin.basis] + [tuple(b) for b in complement.basis]
    # solve r = sum x_i rows_i and drop the lineality part
    n = len(r)
    aug = [tuple(rows[j][i] for j in range(len(rows))) + (r[i],) for i in range(n)]
    red, piv = rref(aug, len(rows) + 1)
    coeffs = [Fraction(0)] * len(rows)
    for row, p in zip(red, piv):
        coeffs[p] = row[-1]
    acc = zero_vector(n)
    for c, b in zip(coeffs[len(lin.basis):], complement.basis):
        acc = _add(acc, _scale(c, b))
    return acc


@lru_cache(maxsize=None)
def _hull_cached(rays: tuple[Vector, ...], lineality: tuple[Vector, ...], n: int) -> Cone:
    return _cone_from_generators(rays, lineality, n)


def conical_hull(vecs: Iterable[Sequence[object]], carrier: Subspace | int,
                 lineality: Iterable[Sequence[object]] = ()) -> Cone:
    """The smallest cone containing ``vecs`` (and the span of ``lineality``)."""
    n = carrier if isinstance(carrier, int) else carrier.ambient
    rays = tuple(sorted({primitive(vector(v)) for v in vecs}))
    rays = tuple(r for r in rays if any(r))
    lin = tuple(Subspace.span(list(lineality), n).basis) if lineality else ()
    if not isinstance(carrier, int):
        for v in rays + lin:
            if not carrier.contains(v):
                raise ValueError(f"generator {v} is not in the carrier {carrier}")
    return _hull_cached(rays, lin, n)


@lru_cache(maxsize=None)
def _from_inequalities_cached(carrier: Subspace, covectors: tuple[Vector, ...]) -> Cone:
    ineqs = [carrier.restrict(w) for w in covectors]
    lin_y, rays_y = _double_description(carrier.dim, ineqs)
    rays = [carrier.from_coords(y) for y in rays_y]
    lin = [carrier.from_coords(y) for y in lin_y]
    return _cone_from_generators(rays, lin, carrier.ambient)


def from_inequalities(carrier: Subspace, covectors: Iterable[Sequence[object]]) -> Cone:
    """The cone {x in carrier : w(x) >= 0 for each ambient covector w}."""
    cov = tuple(sorted({vector(w) for w in covectors}))
    return _from_inequalities_cached(carrier, cov)


def face_cone(face: Subspace) -> Cone:
    """A subspace regarded as a cone (no facets)."""
    return from_inequalities(face, ())


def intersect(a: Cone, b: Cone) -> Cone:
    if a.ambient != b.ambient:
        raise ValueError("cones live in different ambient spaces")
    carrier = a.carrier.intersect(b.carrier)
    return from_inequalities(carrier, a.facet_covectors() + b.facet_covectors())


def contains(c: Cone, v: Sequence[object]) -> bool:
    w = vector(v)
    if not c.carrier.contains(w):
        return False
    y = c.carrier.coords(w)
    return all(dot(f, y) >= 0 for f in c.facets)


@dataclass(frozen=True)
class Arrangement:
    """Hyperplanes {w = 0} inside an ambient subspace."""

    ambient: Subspace
    covectors: tuple[Vector, ...]

    @staticmethod
    def of(ambient: Subspace, covectors: Iterable[Sequence[object]]) -> Arrangement:
        kept: list[Vector] = []
        keys: set[Vector] = set()
        for w in covectors:
            v = vector(w)
            r = ambient.restrict(v)
            if all(x == 0 for x in r):
                continue
            k = primitive(r)
            if next(x for x in k if x) < 0:
                k = _neg(k)
            if k in keys:
                continue
            keys.add(k)
            kept.append(v)
        return Arrangement(ambient, tuple(kept))


def chambers(arr: Arrangement) -> list[Cone]:
    """Closed full-dimensional cells of the arrangement, by successive splitting."""
    cells = [face_cone(arr.ambient)]
    for w in arr.covectors:
        nxt: list[Cone] = []
        for cell in cells:
            for s in (1, -1):
                piece = intersect(cell, from_inequalities(arr.ambient, [_scale(Fraction(s), w)]))
                if piece.carrier == arr.ambient:
                    nxt.append(piece)
        cells = nxt
    return sorted(set(cells), key=Cone.key)


def flats(arr: Arrangement) -> list[Subspace]:
    """All intersections of hyperplanes of the arrangement, ambient included."""
    found = {arr.ambient}
    frontier = [arr.ambient]
    while frontier:
        nxt = []
        for f in frontier:
            for w in arr.covectors:
                if f.vanishes(w):
                    continue
                g = f.intersect(kernel([w], f.ambient))
                if g not in found:
                    found.add(g)
                    nxt.append(g)
        frontier = nxt
    return sorted(found, key=Subspace.key)
