"""Rings of motives used as targets of the invariant engine.

Two kinds of values live here.

* :class:`LaurentL` and :class:`HalfMotive` are reduced rational functions in
  the Lefschetz class ``L`` and in a square root ``q`` of it.  They are thin
  wrappers around sympy's univariate rational function fields.
* :class:`StrataMotive` is a finite Q-linear combination of stratum classes over
  a stack model.  Coordinate strata of a torus model expand into a basis of
  fine strata (every coordinate either zero or nonzero), so equality between
  strata motives is decided exactly in that basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

from sympy import QQ
from sympy.polys.fields import field as _sympy_field

from .errors import PoleAtOne
from .exactq import as_rational

_L_FIELD, _L_GEN = _sympy_field("L", QQ)
_Q_FIELD, _Q_GEN = _sympy_field("q", QQ)


def _to_fraction(c: object) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))  # type: ignore[attr-defined]


def _coeffs(poly) -> list[Fraction]:
    terms = dict(poly.terms())
    if not terms:
        return [Fraction(0)]
    top = max(e[0] for e in terms)
    return [_to_fraction(terms[(i,)]) if (i,) in terms else Fraction(0) for i in range(top + 1)]


class _RationalFunction:
    """Shared arithmetic for the two one-variable rational function fields."""

    __slots__ = ("_f",)
    _field = _L_FIELD
    _gen = _L_GEN
    _var = "L"

    def __init__(self, value: object = 0) -> None:
        if isinstance(value, type(self)):
            self._f = value._f
        elif isinstance(value, _RationalFunction):
            raise TypeError("cannot mix L-motives and q-motives")
        elif hasattr(value, "numer") and hasattr(value, "denom"):
            self._f = value
        else:
            r = as_rational(value)
            self._f = self._field(QQ(r.numerator, r.denominator))

    @classmethod
    def gen(cls):
        return cls(cls._gen)

    @classmethod
    def from_coeffs(cls, num: Iterable[object], den: Iterable[object] = (1,)):
        """Build from ascending coefficient lists (index = power)."""
        def poly(cs):
            acc = cls._field(0)
            for i, c in enumerate(cs):
                r = as_rational(c)
                if r:
                    acc += QQ(r.numerator, r.denominator) * cls._gen**i
            return acc
        d = poly(den)
        if d == 0:
            raise ZeroDivisionError("zero denominator")
        return cls(poly(num) / d)

    def _coerce(self, other: object):
        if isinstance(other, type(self)):
            return other._f
        if isinstance(other, _RationalFunction):
            raise TypeError("cannot mix L-motives and q-motives")
        return type(self)(other)._f

    def __add__(self, other):
        return type(self)(self._f + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return type(self)(self._f - self._coerce(other))

    def __rsub__(self, other):
        return type(self)(self._coerce(other) - self._f)

    def __mul__(self, other):
        return type(self)(self._f * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return type(self)(self._f / self._coerce(other))

    def __rtruediv__(self, other):
        return type(self)(self._coerce(other) / self._f)

    def __neg__(self):
        return type(self)(-self._f)

    def __pow__(self, k: int):
        return type(self)(self._f**k)

    def __eq__(self, other: object) -> bool:
        try:
            return self._f == self._coerce(other)
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        return hash((self._var, tuple(self.numerator()), tuple(self.denominator())))

    def numerator(self) -> list[Fraction]:
        """Ascending coefficients, scaled so that the denominator is monic."""
        lc = _to_fraction(self._f.denom.LC)
        return [c / lc for c in _coeffs(self._f.numer)]

    def denominator(self) -> list[Fraction]:
        lc = _to_fraction(self._f.denom.LC)
        return [c / lc for c in _coeffs(self._f.denom)]

    def is_zero(self) -> bool:
        return self._f == 0

    def is_regular_at(self, x: Fraction) -> bool:
        return _eval(self.denominator(), x) != 0

    def evaluate(self, x: object) -> Fraction:
        x = as_rational(x)
        den = _eval(self.denominator(), x)
        if den == 0:
            raise PoleAtOne(f"{self} has a pole at {self._var} = {x}")
        return _eval(self.numerator(), x) / den

    def to_json(self) -> dict[str, list[str]]:
        return {"num": [str(c) for c in self.numerator()],
                "den": [str(c) for c in self.denominator()]}

    @classmethod
    def from_json(cls, payload: Mapping[str, Iterable[object]]):
        return cls.from_coeffs(payload["num"], payload.get("den", ["1"]))

    def __str__(self) -> str:
        return _format(self.numerator(), self.denominator(), self._var)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self})"


def _eval(cs: list[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(cs):
        acc = acc * x + c
    return acc


def _format_poly(cs: list[Fraction], var: str) -> str:
    parts = []
    for i in range(len(cs) - 1, -1, -1):
        c = cs[i]
        if c == 0:
            continue
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if mono and abs(c) == 1:
            body = mono
        elif mono:
            body = f"{abs(c)}*{mono}"
        else:
            body = str(abs(c))
        parts.append(("-" if c < 0 else "+", body))
    if not parts:
        return "0"
    head_sign, head = parts[0]
    out = ("-" if head_sign == "-" else "") + head
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def _format(num: list[Fraction], den: list[Fraction], var: str) -> str:
    n = _format_poly(num, var)
    if den == [Fraction(1)]:
        return n
    d = _format_poly(den, var)
    if len([c for c in num if c]) > 1:
        n = f"({n})"
    if len([c for c in den if c]) > 1:
        d = f"({d})"
    return f"{n}/{d}"


class LaurentL(_RationalFunction):
    """A reduced rational function in the Lefschetz class L."""

    __slots__ = ()
    _field = _L_FIELD
    _gen = _L_GEN
    _var = "L"

    def to_half(self) -> HalfMotive:
        """Substitute L = q^2."""
        def spread(cs: list[Fraction]) -> list[Fraction]:
            out = [Fraction(0)] * (2 * len(cs) - 1)
            out[::2] = cs
            return out
        return HalfMotive.from_coeffs(spread(self.numerator()), spread(self.denominator()))


class HalfMotive(_RationalFunction):
    """A reduced rational function in q, where q^2 stands for L."""

    __slots__ = ()
    _field = _Q_FIELD
    _gen = _Q_GEN
    _var = "q"


L = LaurentL.gen()
q = HalfMotive.gen()


def is_regular_at_one(f: LaurentL) -> bool:
    return f.is_regular_at(Fraction(1))


def euler_char(f: LaurentL) -> Fraction:
    """Evaluation at L = 1; raises PoleAtOne when f has a pole there."""
    return f.evaluate(1)


def euler_char_mon(f: HalfMotive) -> Fraction:
    """Evaluation at q = -1, the Euler characteristic of the square root of L."""
    return f.evaluate(-1)


# --- strata ----------------------------------------------------------------


@dataclass(frozen=True)
class Stratum:
    """A coordinate stratum of a torus model: each coordinate is zero, nonzero or free."""

    zero: frozenset[int]
    nonzero: frozenset[int]
    free: frozenset[int]
    rank: int

    def __post_init__(self) -> None:
        if (self.zero & self.nonzero) or (self.zero & self.free) or (self.nonzero & self.free):
            raise ValueError("zero, nonzero and free coordinate sets must be disjoint")

    @staticmethod
    def of(rank: int, zero: Iterable[int] = (), nonzero: Iterable[int] = (),
           free: Iterable[int] = ()) -> Stratum:
        return Stratum(frozenset(zero), frozenset(nonzero), frozenset(free), rank)

    @property
    def coords(self) -> tuple[int, ...]:
        return tuple(sorted(self.zero | self.nonzero | self.free))

    @property
    def point_motive(self) -> LaurentL:
        return L ** len(self.free) * (L - 1) ** len(self.nonzero) / (L - 1) ** self.rank

    def is_fine(self) -> bool:
        return not self.free

    def refine(self) -> Iterator[Stratum]:
        """The fine strata partitioning this one."""
        if not self.free:
            yield self
            return
        c = min(self.free)
        rest = self.free - {c}
        for s in (Stratum(self.zero | {c}, self.nonzero, rest, self.rank),
                  Stratum(self.zero, self.nonzero | {c}, rest, self.rank)):
            yield from s.refine()

    def state(self, c: int) -> str:
        if c in self.zero:
            return "0"
        if c in self.nonzero:
            return "g"
        if c in self.free:
            return "a"
        raise KeyError(c)

    @property
    def label(self) -> str:
        """One letter per coordinate: ``a`` free (a line), ``g`` nonzero, ``0`` zero."""
        return "[" + "".join(self.state(c) for c in self.coords) + "]"

    def sort_key(self) -> tuple:
        return (0, self.coords, self.label)

    def to_json(self) -> dict[str, list[int]]:
        return {"zero": sorted(self.zero), "nonzero": sorted(self.nonzero),
                "free": sorted(self.free)}


@dataclass(frozen=True)
class TableClass:
    """A declared basis stratum of a tabulated stack."""

    label: str
    motive: LaurentL = field(compare=False)

    @property
    def point_motive(self) -> LaurentL:
        return self.motive

    def refine(self) -> Iterator[TableClass]:
        yield self

    def sort_key(self) -> tuple:
        return (1, (), self.label)

    def to_json(self) -> str:
        return self.label


StratumClass = Union[Stratum, TableClass]


class StrataMotive:
    """A finite Q-linear combination of stratum classes.

    Terms are kept as entered (merged by identical class) for readability;
    comparison goes through :meth:`refined`, which expands every class into
    disjoint fine strata, so ``==`` is exact equality of motives.
    """

    __slots__ = ("_terms", "_refined")

    def __init__(self, terms: Mapping[StratumClass, object] | Iterable[tuple[StratumClass, object]] = ()) -> None:
        acc: dict[StratumClass, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for k, c in items:
            acc[k] = acc.get(k, Fraction(0)) + as_rational(c)
        self._terms = {k: v for k, v in acc.items() if v != 0}
        self._refined: dict[StratumClass, Fraction] | None = None

    @staticmethod
    def of(cls: StratumClass, coeff: object = 1) -> StrataMotive:
        return StrataMotive({cls: coeff})

    @staticmethod
    def zero() -> StrataMotive:
        return StrataMotive()

    @staticmethod
    def total(parts: Iterable[StrataMotive]) -> StrataMotive:
        acc: dict[StratumClass, Fraction] = {}
        for p in parts:
            for k, c in p._terms.items():
                acc[k] = acc.get(k, Fraction(0)) + c
        return StrataMotive(acc)

    @property
    def terms(self) -> dict[StratumClass, Fraction]:
        return dict(self._terms)

    def items(self) -> list[tuple[StratumClass, Fraction]]:
        return sorted(self._terms.items(), key=lambda kv: kv[0].sort_key())

    def __iter__(self):
        return iter(self.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._fine())

    def is_zero(self) -> bool:
        return not self._fine()

    def __add__(self, other: StrataMotive) -> StrataMotive:
        return StrataMotive.total([self, other])

    def __sub__(self, other: StrataMotive) -> StrataMotive:
        return StrataMotive.total([self, other.scale(-1)])

    def __neg__(self) -> StrataMotive:
        return self.scale(-1)

    def scale(self, c: object) -> StrataMotive:
        r = as_rational(c)
        return StrataMotive({k: v * r for k, v in self._terms.items()})

    def __mul__(self, c: object) -> StrataMotive:
        return self.scale(c)

    __rmul__ = __mul__

    def map_classes(self, f) -> StrataMotive:
        """Apply a linear map given on classes (``f(cls)`` returns a StrataMotive)."""
        return StrataMotive.total(f(k).scale(c) for k, c in self._terms.items())

    def _fine(self) -> dict[StratumClass, Fraction]:
        if self._refined is None:
            acc: dict[StratumClass, Fraction] = {}
            for k, c in self._terms.items():
                for s in k.refine():
                    acc[s] = acc.get(s, Fraction(0)) + c
            self._refined = {k: v for k, v in acc.items() if v != 0}
        return self._refined

    def refined(self) -> StrataMotive:
        return StrataMotive(self._fine())

    def simplified(self) -> StrataMotive:
        """A compact representative: fine strata merged back where coefficients agree."""
        cur = dict(self._fine())
        coords = sorted({c for k in cur if isinstance(k, Stratum) for c in k.coords})
        for c in coords:
            nxt: dict[StratumClass, Fraction] = {}
            used: set[StratumClass] = set()
            for k in sorted(cur, key=lambda s: s.sort_key()):
                if k in used:
                    continue
                if isinstance(k, Stratum) and c in k.zero:
                    partner = Stratum(k.zero - {c}, k.nonzero | {c}, k.free, k.rank)
                    if cur.get(partner) == cur[k] and partner not in used:
                        merged = Stratum(k.zero - {c}, k.nonzero, k.free | {c}, k.rank)
                        nxt[merged] = cur[k]
                        used.update((k, partner))
                        continue
                nxt[k] = cur[k]
                used.add(k)
            cur = nxt
        return StrataMotive(cur)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StrataMotive):
            return NotImplemented
        return self._fine() == other._fine()

    def __hash__(self) -> int:
        return hash(frozenset(self._fine().items()))

    def __str__(self) -> str:
        return format_terms(self.items())

    def __repr__(self) -> str:
        return f"StrataMotive({self})"

    def to_json(self) -> list[dict[str, object]]:
        return [{"class": k.to_json(), "coeff": str(c)} for k, c in self.items()]


def format_terms(items: Iterable[tuple[StratumClass, Fraction]]) -> str:
    out = ""
    for k, c in items:
        label = k.label if isinstance(k, Stratum) else f"[{k.label}]"
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = label if mag == 1 else f"{mag}*{label}"
        out += f" {sign} {body}" if out else ("-" if c < 0 else "") + body
    return out or "0"


def sch_realize(m: StrataMotive) -> LaurentL:
    """Sum of coefficient times point motive over the terms of ``m``."""
    acc = LaurentL(0)
    for k, c in m.items():
        acc = acc + k.point_motive * c
    return acc
