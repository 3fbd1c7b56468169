"""Virtual-rank projections and epsilon motives.

Both operators are alternating sums over strictly increasing chains
``beta_0 < beta_1 < ... < beta_n`` of special faces of a generator stratum.
The projection ``pi^(k)`` pushes the fixed locus of ``beta_n`` forward by
``tot``.  The epsilon motive ``eps^(k)`` also chooses a full-dimensional
special cone ``sigma_i`` of ``beta_i`` at each step, weights the term by the
measure of those cones, and induces along the composite
``sigma_0 ^ (beta_0 v sigma_1) ^ ... ^ (beta_{n-1} v sigma_n)``.

Everything here works against the shared stack-model interface, so torus and
tabulated models go through the same code.  The face-indexed epsilon family is
also computed a second way, by inverting the prestability measure in the
incidence algebra of the Hall category, which gives an independent check.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import MeasureInvalid, NotApplicable
from .exactq import Cone, Subspace, face_cone
from .measures import (
    HallCategory,
    Morphism,
    StabilityMeasure,
    invert,
    is_permissible,
    partition_check,
    pullback_measure,
    to_prestability,
)
from .motives import L, StrataMotive, Stratum, is_regular_at_one, sch_realize
from .stackmodel import LinearTorusStack, StackModel


@dataclass(frozen=True)
class ChainTerm:
    """One summand: a face chain, its cones, the composite cone and the signed weight."""

    chain: tuple[Subspace, ...]
    cones: tuple[Cone, ...]
    composite: Cone
    coefficient: Fraction

    @property
    def sign(self) -> int:
        return -1 if (len(self.chain) - 1) % 2 else 1


@dataclass(frozen=True)
class Indicator:
    """A finite disjoint union of generator strata, standing for its indicator function."""

    strata: tuple[object, ...]

    @staticmethod
    def whole(x: StackModel) -> Indicator:
        if isinstance(x, LinearTorusStack):
            return Indicator((x.top_stratum,))
        return Indicator((None,))

    @staticmethod
    def of(strata: Iterable[Stratum]) -> Indicator:
        items = tuple(strata)
        seen: set[Stratum] = set()
        for s in items:
            fine = set(s.refine())
            if fine & seen:
                raise ValueError("indicator strata must be pairwise disjoint")
            seen |= fine
        return Indicator(items)

    def motive(self, x: StackModel) -> StrataMotive:
        return StrataMotive.total(x.whole() if s is None else StrataMotive.of(s) for s in self.strata)


def _as_indicator(x: StackModel, a: Indicator | Sequence[Stratum] | Stratum | None) -> Indicator:
    if a is None:
        return Indicator.whole(x)
    if isinstance(a, Indicator):
        return a
    if isinstance(a, Stratum):
        return Indicator((a,))
    return Indicator.of(a)


def face_chains(faces: Sequence[Subspace], start: Iterable[Subspace]) -> Iterator[tuple[Subspace, ...]]:
    """All strictly increasing chains of ``faces`` beginning at one of ``start``."""
    above = {f: [g for g in faces if f < g] for f in faces}

    def extend(chain: tuple[Subspace, ...]) -> Iterator[tuple[Subspace, ...]]:
        yield chain
        for g in above[chain[-1]]:
            yield from extend(chain + (g,))

    for f in start:
        yield from extend((f,))


def _faces_of(x: StackModel, gen: object, intrinsic: bool) -> list[Subspace]:
    return sorted(x.generator_faces(gen, intrinsic), key=Subspace.key)


def _sign(n: int) -> int:
    return -1 if n % 2 else 1


# --- projections --------------------------------------------------------------


def _pi_chains(x: StackModel, gen: object, start: Sequence[Subspace], faces: Sequence[Subspace]) -> StrataMotive:
    parts = []
    for chain in face_chains(faces, start):
        top = chain[-1]
        m = x.restrict_generator(gen, top)
        parts.append(x.hall_induce(face_cone(top), m).scale(_sign(len(chain) - 1)))
    return StrataMotive.total(parts)


def pi_k(x: StackModel, k: int, gen: object = None, intrinsic: bool = False) -> StrataMotive:
    """The virtual-rank-k projection of the class of a generator stratum."""
    if gen is None and isinstance(x, LinearTorusStack):
        gen = x.top_stratum
    faces = _faces_of(x, gen, intrinsic)
    return _pi_chains(x, gen, [f for f in faces if f.dim == k], faces)


def pi_face(x: StackModel, alpha: Subspace, gen: object = None, intrinsic: bool = False) -> StrataMotive:
    """The face-refined projection: only chains starting at ``alpha``."""
    if gen is None and isinstance(x, LinearTorusStack):
        gen = x.top_stratum
    faces = _faces_of(x, gen, intrinsic)
    if alpha not in faces:
        return StrataMotive.zero()
    return _pi_chains(x, gen, [alpha], faces)


def pi_motive(x: LinearTorusStack, k: int, m: StrataMotive) -> StrataMotive:
    """Extend ``pi_k`` linearly to a combination of strata of ``x``."""
    return StrataMotive.total(pi_k(x, k, s).scale(c) for s, c in m.items())


# --- epsilon motives -------------------------------------------------------------


def _check_measure(x: StackModel, mu: StabilityMeasure) -> None:
    if not partition_check(mu, x):
        raise MeasureInvalid(f"measure {mu.tag or ''} is not a partition of unity on {x.describe()}")
    if not is_permissible(mu, x):
        raise MeasureInvalid("measure is not permissible")


def chain_terms(x: StackModel, mu: StabilityMeasure, gen: object, start: Sequence[Subspace],
                faces: Sequence[Subspace], first: Cone | None = None) -> Iterator[ChainTerm]:
    """Chain summands with nonzero weight.

    With ``first`` given, every chain starts at its span and uses it as
    ``sigma_0`` without weighting by its measure.
    """
    for chain in face_chains(faces, start):
        options = [x.special_cones_in_face(b) for b in chain]
        if first is not None:
            options[0] = (first,)

        def walk(i: int, cones: tuple[Cone, ...], composite: Cone, weight: Fraction) -> Iterator[ChainTerm]:
            if i == len(chain):
                yield ChainTerm(chain, cones, composite, _sign(len(chain) - 1) * weight)
                return
            for c in options[i]:
                w = weight if (i == 0 and first is not None) else weight * mu(c)
                if not w:
                    continue
                nxt = c if i == 0 else x.hall_compose(composite, x.join(chain[i - 1], c))
                yield from walk(i + 1, cones + (c,), nxt, w)

        yield from walk(0, (), face_cone(chain[0]), Fraction(1))


def _epsilon_sum(x: StackModel, mu: StabilityMeasure, gen: object, start: Sequence[Subspace],
                 faces: Sequence[Subspace], first: Cone | None = None) -> StrataMotive:
    parts = []
    restricted: dict[Subspace, StrataMotive] = {}
    for t in chain_terms(x, mu, gen, start, faces, first):
        top = t.chain[-1]
        if top not in restricted:
            restricted[top] = x.restrict_generator(gen, top)
        parts.append(x.hall_induce(t.composite, restricted[top]).scale(t.coefficient))
    return StrataMotive.total(parts)


def epsilon_k(x: StackModel, mu: StabilityMeasure, a: Indicator | Sequence[Stratum] | Stratum | None,
              k: int, validate: bool = True, intrinsic: bool = False) -> StrataMotive:
    """The virtual-rank-k epsilon motive of an indicator (the whole stack when ``a`` is None)."""
    if validate:
        _check_measure(x, mu)
    parts = []
    for gen in _as_indicator(x, a).strata:
        faces = _faces_of(x, gen, intrinsic)
        parts.append(_epsilon_sum(x, mu, gen, [f for f in faces if f.dim == k], faces))
    return StrataMotive.total(parts)


def epsilon_cone(x: StackModel, mu: StabilityMeasure, a: Indicator | Sequence[Stratum] | Stratum | None,
                 sigma: Cone, validate: bool = True) -> StrataMotive:
    """The cone-refined epsilon motive, expanded directly as a chain sum from ``sigma``."""
    if validate:
        _check_measure(x, mu)
    alpha = sigma.carrier
    parts = []
    for gen in _as_indicator(x, a).strata:
        faces = _faces_of(x, gen, False)
        if alpha in faces:
            parts.append(_epsilon_sum(x, mu, gen, [alpha], faces, first=sigma))
    return StrataMotive.total(parts)


def epsilon_cone_factored(x: LinearTorusStack, mu: StabilityMeasure,
                          a: Indicator | Sequence[Stratum] | Stratum | None, sigma: Cone) -> StrataMotive:
    """The cone-refined epsilon motive by restriction to X_alpha, top epsilon there, then induction."""
    if not isinstance(x, LinearTorusStack):
        raise NotApplicable("the factored route needs a torus model")
    alpha = sigma.carrier
    xa = x.grad_restrict(alpha)
    mua = pullback_measure(mu, xa)
    parts = []
    for gen in _as_indicator(x, a).strata:
        r = x.restrict_stratum(gen, alpha)
        if r is None:
            continue
        parts.append(epsilon_k(xa, mua, r, alpha.dim))
    return x.hall_induce(sigma, StrataMotive.total(parts))


def epsilon_all(x: StackModel, mu: StabilityMeasure, a: Indicator | Sequence[Stratum] | Stratum | None = None,
                validate: bool = True) -> dict[int, StrataMotive]:
    top = x.face_rank
    return {k: epsilon_k(x, mu, a, k, validate) for k in range(top + 1)}


# --- checks -----------------------------------------------------------------------


def sum_rule_check(x: StackModel, mu: StabilityMeasure) -> bool:
    """The epsilon motives of every virtual rank add up to the class of the stack."""
    total = StrataMotive.total(epsilon_all(x, mu).values())
    return total == x.whole()


def no_pole_check(x: StackModel, mu: StabilityMeasure, k: int) -> bool:
    """(1 - L)^k eps^(k) is regular at L = 1, and eps^(k) vanishes below the central rank."""
    e = epsilon_k(x, mu, None, k, validate=False)
    if k < x.crk and not e.is_zero():
        return False
    return is_regular_at_one((1 - L) ** k * sch_realize(e))


def epsilon_family(x: LinearTorusStack, mu: StabilityMeasure,
                   a: Indicator | Sequence[Stratum] | Stratum | None = None) -> dict[Subspace, StrataMotive]:
    """Face-indexed family: top epsilon of the alpha-fixed part, computed on X_alpha."""
    out = {}
    ind = _as_indicator(x, a)
    for alpha in x.special_faces:
        xa = x.grad_restrict(alpha)
        mua = pullback_measure(mu, xa)
        rs = [r for r in (x.restrict_stratum(s, alpha) for s in ind.strata) if r is not None]
        out[alpha] = epsilon_k(xa, mua, rs, alpha.dim) if rs else StrataMotive.zero()
    return out


def delta_family(x: StackModel, a: Indicator | Sequence[Stratum] | Stratum | None = None) -> dict[Subspace, StrataMotive]:
    """alpha -> class of the alpha-fixed part of the indicator, over X_alpha."""
    m = _as_indicator(x, a).motive(x)
    return {alpha: x.graded_pullback(alpha, m) for alpha in x.special_faces}


def act(x: StackModel, p, family: dict[Subspace, StrataMotive], cat: HallCategory) -> dict[Subspace, StrataMotive]:
    """(P * f)_alpha = sum over alpha -> beta along sigma of P(alpha, sigma) star_sigma(f_beta)."""
    out = {}
    for alpha in cat.faces:
        parts = []
        for m in cat.out[alpha]:
            v = p(m)
            if v:
                parts.append(x.induce_from(alpha, m.cone, family[m.target]).scale(v))
        out[alpha] = StrataMotive.total(parts)
    return out


def mobius_family(x: StackModel, mu: StabilityMeasure,
                  a: Indicator | Sequence[Stratum] | Stratum | None = None) -> dict[Subspace, StrataMotive]:
    """The epsilon family as the inverse prestability measure acting on the delta family."""
    cat = HallCategory(x)
    inv = invert(to_prestability(mu, x, cat))
    return act(x, inv, delta_family(x, a), cat)


def mobius_check(x: StackModel, mu: StabilityMeasure) -> bool:
    """Chain-sum and incidence-algebra epsilon families agree exactly.

    Tabulated models only expose induction out of the central face, so there
    the comparison is made at the central face against the chain sum of X.
    """
    mob = mobius_family(x, mu)
    if isinstance(x, LinearTorusStack):
        return epsilon_family(x, mu) == mob
    return mob[x.central_face] == epsilon_k(x, mu, None, x.crk)


__all__ = [
    "ChainTerm",
    "Indicator",
    "face_chains",
    "chain_terms",
    "pi_k",
    "pi_face",
    "pi_motive",
    "epsilon_k",
    "epsilon_cone",
    "epsilon_cone_factored",
    "epsilon_all",
    "sum_rule_check",
    "no_pole_check",
    "epsilon_family",
    "delta_family",
    "mobius_family",
    "mobius_check",
    "act",
    "Morphism",
]
