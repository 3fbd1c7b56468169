"""DT invariants of smooth models and Theta-stratifications of torus quotients.

The smooth Behrend function is the constant sign ``(-1)^dim``, and its motivic
version is ``q^(-dim)`` with ``L = q^2``.  With these, the numerical invariant
is the Euler characteristic of ``(1 - L)^k eps^(k)`` up to sign, and the
motivic invariant is ``(q - 1/q)^k q^(-dim) eps^(k)``.

A linear form ``l`` and a positive-definite norm ``q`` on cocharacters give
each point the direction maximising ``l(lam)/sqrt(q(lam))`` over the
cocharacters whose limit exists.  That maximiser is rational, so
``l(lam)^2/q(lam)`` is compared instead of the irrational ratio.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .errors import NotApplicable, NotRegular
from .exactq import Cone, Subspace, conical_hull, dot, kernel, primitive, vector
from .epsilon import Indicator, epsilon_k
from .measures import StabilityMeasure
from .motives import HalfMotive, L, Stratum, euler_char, sch_realize
from .motives import q as Q_HALF
from .stackmodel import LinearTorusStack, StackModel

Ray = tuple[Fraction, ...]


# --- Behrend data and DT invariants ---------------------------------------------


@dataclass(frozen=True)
class BehrendData:
    """The smooth Behrend function: the constant sign (-1)^dim."""

    dim: int

    @staticmethod
    def smooth(x: StackModel) -> BehrendData:
        return BehrendData(x.dim)

    @property
    def sign(self) -> int:
        return -1 if self.dim % 2 else 1

    @property
    def motivic(self) -> HalfMotive:
        return Q_HALF ** (-self.dim)


@dataclass
class DisjointUnion:
    """A finite disjoint union of connected models, each with its own measure."""

    parts: list[tuple[StackModel, StabilityMeasure]] = field(default_factory=list)


def dt_numerical(x: StackModel | DisjointUnion, mu: StabilityMeasure | None = None, k: int = 0,
                 behrend: BehrendData | None = None) -> Fraction:
    """(-1)^dim times the Euler characteristic of (1 - L)^k eps^(k)(1_X)."""
    if isinstance(x, DisjointUnion):
        return sum((dt_numerical(p, m, k) for p, m in x.parts), Fraction(0))
    nu = behrend or BehrendData.smooth(x)
    e = sch_realize(epsilon_k(x, mu, None, k))
    return nu.sign * euler_char((1 - L) ** k * e)


def dt_motivic(x: StackModel | DisjointUnion, mu: StabilityMeasure | None = None, k: int = 0,
               behrend: BehrendData | None = None) -> HalfMotive:
    """(q - 1/q)^k q^(-dim) eps^(k)(1_X) with L = q^2."""
    if isinstance(x, DisjointUnion):
        total = HalfMotive(0)
        for p, m in x.parts:
            total = total + dt_motivic(p, m, k)
        return total
    nu = behrend or BehrendData.smooth(x)
    e = sch_realize(epsilon_k(x, mu, None, k)).to_half()
    return (Q_HALF - 1 / Q_HALF) ** k * nu.motivic * e


# --- Theta-stratifications --------------------------------------------------------


@dataclass(frozen=True)
class LinearForm:
    coeffs: tuple[Fraction, ...]

    @staticmethod
    def of(xs: Iterable[object]) -> LinearForm:
        return LinearForm(vector(xs))

    def __call__(self, lam: Sequence[Fraction]) -> Fraction:
        return dot(self.coeffs, lam)


@dataclass(frozen=True)
class QuadNorm:
    matrix: tuple[tuple[Fraction, ...], ...]

    @staticmethod
    def of(rows: Iterable[Iterable[object]]) -> QuadNorm:
        m = tuple(vector(r) for r in rows)
        n = len(m)
        if any(len(r) != n for r in m):
            raise ValueError("the norm must be a square matrix")
        if any(m[i][j] != m[j][i] for i in range(n) for j in range(n)):
            raise ValueError("the norm must be symmetric")
        for size in range(1, n + 1):
            if _det([row[:size] for row in m[:size]]) <= 0:
                raise ValueError("the norm must be positive definite")
        return QuadNorm(m)

    @staticmethod
    def identity(n: int) -> QuadNorm:
        return QuadNorm.of([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    def bilinear(self, u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
        return sum((u[i] * self.matrix[i][j] * v[j] for i in range(len(u)) for j in range(len(v))), Fraction(0))

    def __call__(self, lam: Sequence[Fraction]) -> Fraction:
        return self.bilinear(lam, lam)


def _det(m: Sequence[Sequence[Fraction]]) -> Fraction:
    a = [list(map(Fraction, r)) for r in m]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return det


def _solve(m: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    n = len(m)
    a = [row[:] + [rhs] for row, rhs in zip(m, b)]
    for c in range(n):
        p = next(r for r in range(c, n) if a[r][c] != 0)
        a[c], a[p] = a[p], a[c]
        a[c] = [x / a[c][c] for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [a[r][n] for r in range(n)]


def best_direction(ell: LinearForm, norm: QuadNorm, space: Subspace) -> Ray | None:
    """The q-gradient of ell inside ``space``; None when ell vanishes there."""
    basis = list(space.basis)
    if not basis:
        return None
    gram = [[norm.bilinear(u, v) for v in basis] for u in basis]
    rhs = [ell(u) for u in basis]
    if not any(rhs):
        return None
    y = _solve(gram, rhs)
    n = space.ambient
    return tuple(sum((y[i] * basis[i][j] for i in range(len(basis))), Fraction(0)) for j in range(n))


@dataclass(frozen=True)
class ThetaStratification:
    """The destabilising ray of every fine stratum (None on the semistable locus)."""

    model: LinearTorusStack
    ell: LinearForm
    norm: QuadNorm
    assignment: tuple[tuple[Stratum, Ray | None], ...]

    @property
    def semistable(self) -> tuple[Stratum, ...]:
        return tuple(s for s, r in self.assignment if r is None)

    @property
    def strata(self) -> list[tuple[Ray, tuple[Stratum, ...]]]:
        groups: dict[Ray, list[Stratum]] = {}
        for s, r in self.assignment:
            if r is not None:
                groups.setdefault(r, []).append(s)
        return sorted((r, tuple(ss)) for r, ss in groups.items())

    def ray_of(self, s: Stratum) -> Ray | None:
        return dict(self.assignment)[s]

    def face_rays(self) -> dict[Subspace, Ray | None]:
        """lambda_alpha for every special face, raising NotRegular on two candidates.

        The candidates at alpha are the destabilising rays lying in alpha of the
        points fixed by alpha, with the zero cocharacter standing for
        semistable points.
        """
        x = self.model
        out: dict[Subspace, Ray | None] = {}
        zero = tuple(Fraction(0) for _ in range(x.rank))
        for alpha in x.special_faces:
            fixed = x.vanishing(alpha)
            found: set[Ray] = set()
            for s, r in self.assignment:
                if not (s.nonzero <= fixed):
                    continue
                if r is None:
                    found.add(zero)
                elif alpha.contains(r):
                    found.add(r)
            if len(found) > 1:
                raise NotRegular(f"face {alpha} carries several destabilising rays")
            r = next(iter(found), None)
            out[alpha] = None if r is None or not any(r) else r
        return out

    def is_cover(self) -> bool:
        """The assigned strata are pairwise disjoint and cover the model."""
        fine = [s for s, _ in self.assignment]
        return len(set(fine)) == len(fine) and set(fine) == set(self.model.fine_strata())


def _limit_subspaces(x: LinearTorusStack, cols: Sequence[int]) -> list[Subspace]:
    """Spans of the faces of the limit cone: some of its inequalities made equalities."""
    out = []
    for size in range(len(cols) + 1):
        for active in combinations(cols, size):
            walls = kernel([x.weight(c) for c in active], x.rank) if active else None
            out.append(x.lattice.intersect(walls) if walls is not None else x.lattice)
    return out


def destabilising_ray(x: LinearTorusStack, support: frozenset[int], ell: LinearForm,
                      norm: QuadNorm) -> Ray | None:
    """The primitive maximiser of ell/sqrt(q) on the limit cone of a fine support."""
    cols = sorted(support - x.nonzero)
    inside = [x.weight(c) for c in cols]
    best: list[tuple[Fraction, Ray]] = []
    for space in _limit_subspaces(x, cols):
        lam = best_direction(ell, norm, space)
        if lam is None or ell(lam) <= 0:
            continue
        if any(dot(w, lam) < 0 for w in inside):
            continue
        value = ell(lam) ** 2 / norm(lam)
        best.append((value, primitive(lam)))
    if not best:
        return None
    top = max(v for v, _ in best)
    rays = {r for v, r in best if v == top}
    if len(rays) > 1:
        raise NotRegular(f"support {sorted(support)} has several maximising rays")
    return rays.pop()


def theta_stratify(x: LinearTorusStack, ell: LinearForm | Sequence[object],
                   norm: QuadNorm | Sequence[Sequence[object]] | None = None) -> ThetaStratification:
    """Assign every fine stratum its destabilising ray."""
    if not isinstance(x, LinearTorusStack):
        raise NotApplicable("Theta-stratifications are computed for torus models")
    ell = ell if isinstance(ell, LinearForm) else LinearForm.of(ell)
    if norm is None:
        norm = QuadNorm.identity(x.rank)
    elif not isinstance(norm, QuadNorm):
        norm = QuadNorm.of(norm)
    if len(ell.coeffs) != x.rank or len(norm.matrix) != x.rank:
        raise ValueError("the linear form and the norm must match the torus rank")
    assignment = tuple((s, destabilising_ray(x, s.nonzero, ell, norm)) for s in x.fine_strata())
    strat = ThetaStratification(x, ell, norm, assignment)
    strat.face_rays()
    return strat


def ray_cone(x: LinearTorusStack, lam: Ray) -> Cone:
    return conical_hull([lam], x.rank)


def is_adapted(strat: ThetaStratification, mu: StabilityMeasure, x: LinearTorusStack | None = None,
               strict: bool = True) -> bool:
    """Whether the mass of mu avoids cones that miss the destabilising ray.

    The literal condition asks ``lambda_alpha in sigma`` for every cone of
    positive mass in alpha.  The strict form also asks that extending the ray
    along the cone gives the cone back, which excludes cones where the ray is
    only a lineality direction.
    """
    x = x or strat.model
    rays = strat.face_rays()
    for alpha, lam in rays.items():
        if lam is None:
            continue
        ray = ray_cone(x, lam)
        line = ray.carrier
        for sigma in x.special_cones_in_face(alpha):
            if not mu(sigma):
                continue
            if not sigma.contains(lam):
                return False
            if strict and x.hall_compose(ray, x.join(line, sigma)) != sigma:
                return False
    return True


def semistable_reduction_check(x: LinearTorusStack, mu: StabilityMeasure, strat: ThetaStratification,
                               strict: bool = True) -> bool:
    """eps^(crk) of 1_X equals eps^(crk) of the semistable indicator."""
    if not is_adapted(strat, mu, x, strict):
        raise NotApplicable("the measure is not adapted to the stratification")
    lhs = epsilon_k(x, mu, None, x.crk)
    rhs = epsilon_k(x, mu, Indicator.of(strat.semistable), x.crk)
    return lhs == rhs


__all__ = [
    "BehrendData",
    "DisjointUnion",
    "LinearForm",
    "QuadNorm",
    "ThetaStratification",
    "destabilising_ray",
    "theta_stratify",
    "is_adapted",
    "semistable_reduction_check",
    "dt_numerical",
    "dt_motivic",
    "best_direction",
]
