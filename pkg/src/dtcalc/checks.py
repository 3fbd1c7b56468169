"""The invariant suite run by ``dtcalc check`` and by the acceptance tests.

Every check returns :class:`CheckResult` records instead of raising, so one
broken measure in an instance shows up as named failures while the rest of
the suite still runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator

from .dtinv import dt_motivic, dt_numerical, is_adapted, semistable_reduction_check, theta_stratify
from .epsilon import epsilon_k, mobius_check, no_pole_check, pi_k, pi_motive, sum_rule_check
from .errors import DtcalcError, NotApplicable
from .instances import Instance
from .measures import (
    HallCategory,
    StabilityMeasure,
    convolve,
    delta,
    invert,
    partition_check,
    pullback_measure,
    to_prestability,
    trivial_measure,
)
from .motives import StrataMotive, euler_char_mon, sch_realize
from .stackmodel import LinearTorusStack, StackModel


@dataclass(frozen=True)
class CheckResult:
    instance: str
    check: str
    measure: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        where = f"{self.instance}[{self.measure}]" if self.measure else self.instance
        tail = f"  ({self.detail})" if self.detail else ""
        return f"{status} {where} {self.check}{tail}"

    def to_json(self) -> dict[str, object]:
        return {"instance": self.instance, "check": self.check, "measure": self.measure,
                "passed": self.passed, "detail": self.detail}


def _run(instance: str, check: str, measure: str, fn: Callable[[], tuple[bool, str] | bool]) -> CheckResult:
    try:
        out = fn()
    except NotApplicable as exc:
        return CheckResult(instance, check, measure, True, f"skipped: {exc}")
    except DtcalcError as exc:
        return CheckResult(instance, check, measure, False, f"{type(exc).__name__}: {exc}")
    ok, detail = out if isinstance(out, tuple) else (out, "")
    return CheckResult(instance, check, measure, bool(ok), detail)


def top_rank(x: StackModel) -> int:
    return x.rank if isinstance(x, LinearTorusStack) else x.face_rank


# --- individual identities ---------------------------------------------------------


def no_pole_all(x: StackModel, mu: StabilityMeasure) -> tuple[bool, str]:
    bad = [k for k in range(top_rank(x) + 1) if not no_pole_check(x, mu, k)]
    return not bad, f"failing k: {bad}" if bad else ""


def generators(x: StackModel) -> list[object]:
    if isinstance(x, LinearTorusStack):
        return x.coordinate_strata()
    return [None]


def pi_decomposition(x: StackModel) -> tuple[bool, str]:
    for gen in generators(x):
        total = StrataMotive.total(pi_k(x, k, gen) for k in range(top_rank(x) + 1))
        expected = x.whole() if gen is None else StrataMotive.of(gen)
        if total != expected:
            return False, f"generator {getattr(gen, 'label', 'X')}"
    return True, ""


def pi_idempotent(x: StackModel) -> tuple[bool, str]:
    """pi^(l) pi^(k) [X] realizes to pi^(k) [X] when l = k and to 0 otherwise."""
    if not isinstance(x, LinearTorusStack):
        raise NotApplicable("tabulated models only carry the whole-stack generator")
    ks = range(top_rank(x) + 1)
    for k in ks:
        pk = pi_k(x, k)
        for ell in ks:
            got = sch_realize(pi_motive(x, ell, pk))
            want = sch_realize(pk) if ell == k else sch_realize(StrataMotive.zero())
            if got != want:
                return False, f"pi^({ell}) pi^({k})"
    return True, ""


def trivial_degeneration(x: StackModel) -> tuple[bool, str]:
    mu = trivial_measure(x)
    for k in range(top_rank(x) + 1):
        if epsilon_k(x, mu, None, k) != pi_k(x, k):
            return False, f"k = {k}"
    return True, ""


def group_laws(x: StackModel, mu: StabilityMeasure) -> tuple[bool, str]:
    cat = HallCategory(x)
    p = to_prestability(mu, x, cat)
    inv = invert(p)
    d = delta(cat)
    if any(p(m) != 1 for m in cat.morphisms if m.is_identity):
        return False, "value on an identity is not 1"
    if convolve(p, inv) != d or convolve(inv, p) != d:
        return False, "not a two-sided inverse"
    if convolve(d, p) != p or convolve(p, d) != p:
        return False, "unit law"
    return True, ""


def composable_pairs(x: LinearTorusStack) -> Iterator[tuple]:
    """(sigma_1, sigma_2): sigma_1 special in X, sigma_2 special in X_span(sigma_1) containing that span."""
    for s1 in x.special_cones():
        beta = s1.carrier
        xb = x.grad_restrict(beta)
        for gamma in xb.special_faces:
            if not beta <= gamma:
                continue
            for s2 in xb.special_cones_in_face(gamma):
                if x.cone_contains_face(s2, beta):
                    yield s1, s2


def associativity(x: StackModel) -> tuple[bool, str]:
    """star_{s1} after star_{X_beta, s2} equals star_{s1 ^ s2}, after realization, on every stratum."""
    if not isinstance(x, LinearTorusStack):
        raise NotApplicable("tabulated models declare no induction between intermediate faces")
    count = 0
    for s1, s2 in composable_pairs(x):
        composite = x.hall_compose(s1, s2)
        xb = x.grad_restrict(s1.carrier)
        xg = x.grad_restrict(s2.carrier)
        for s in xg.coordinate_strata():
            m = StrataMotive.of(s)
            lhs = x.hall_induce(s1, xb.hall_induce(s2, m))
            rhs = x.hall_induce(composite, m)
            if sch_realize(lhs) != sch_realize(rhs):
                return False, f"{s1} ^ {s2} on {s.label}"
        count += 1
    return True, f"{count} pairs"


def pullback_square(x: StackModel) -> tuple[bool, str]:
    """alpha* after star_sigma equals star_sigma on X_alpha, for faces alpha inside sigma."""
    if not isinstance(x, LinearTorusStack):
        raise NotApplicable("tabulated models declare no induction between intermediate faces")
    for alpha in x.special_faces:
        xa = x.grad_restrict(alpha)
        for sigma in x.special_cones():
            if not x.cone_contains_face(sigma, alpha):
                continue
            xb = x.grad_restrict(sigma.carrier)
            for s in xb.coordinate_strata():
                m = StrataMotive.of(s)
                lhs = x.graded_pullback(alpha, x.hall_induce(sigma, m))
                rhs = xa.hall_induce(sigma, xb.graded_pullback(alpha, m))
                if sch_realize(lhs) != sch_realize(rhs):
                    return False, f"alpha {alpha}, sigma {sigma}"
    return True, ""


def open_restriction(x: StackModel, mu: StabilityMeasure) -> tuple[bool, str]:
    """Epsilon of the indicator of an open part equals epsilon computed on that open part.

    The open parts are those where one coordinate is invertible, with the
    pulled-back measure; both sides are pushed into the strata of X.
    """
    if not isinstance(x, LinearTorusStack):
        raise NotApplicable("open substacks are formed for torus models")
    free = [c for c in x.coords if c not in x.nonzero]
    if not free:
        raise NotApplicable("no coordinate can be made invertible")
    for c in free:
        u = x.open_substack([c])
        mu_u = pullback_measure(mu, u)
        for k in range(top_rank(x) + 1):
            glob = epsilon_k(x, mu, u.fine_strata(), k)
            loc = epsilon_k(u, mu_u, None, k)
            if glob != loc:
                return False, f"x{c} invertible, k = {k}"
    return True, ""


def additivity(x: StackModel, mu: StabilityMeasure) -> tuple[bool, str]:
    """Epsilon of the whole stack is the sum of epsilon over its fine strata."""
    if not isinstance(x, LinearTorusStack):
        raise NotApplicable("tabulated models carry only the whole-stack generator")
    for k in range(top_rank(x) + 1):
        whole = epsilon_k(x, mu, None, k)
        parts = StrataMotive.total(epsilon_k(x, mu, s, k) for s in x.fine_strata())
        if whole != parts:
            return False, f"k = {k}"
    return True, ""


def chi_compat(x: StackModel, mu: StabilityMeasure) -> tuple[bool, str]:
    for k in range(top_rank(x) + 1):
        if euler_char_mon(dt_motivic(x, mu, k)) != dt_numerical(x, mu, k):
            return False, f"k = {k}"
    return True, ""


def theta_reduction(inst: Instance, name: str, mu: StabilityMeasure) -> tuple[bool, str]:
    x = inst.model
    if inst.theta is None or not isinstance(x, LinearTorusStack):
        raise NotApplicable("the instance carries no stability data")
    strat = theta_stratify(x, inst.theta.linear_form, inst.theta.norm)
    if not strat.is_cover():
        return False, "strata do not cover the stack"
    if not is_adapted(strat, mu, x):
        raise NotApplicable(f"measure {name} is not adapted")
    return semistable_reduction_check(x, mu, strat), ""


# --- the suite ----------------------------------------------------------------------------


def run_instance(inst: Instance) -> list[CheckResult]:
    x = inst.model
    n = inst.name
    out: list[CheckResult] = []
    for name, mu in sorted(inst.measures.items()):
        out.append(_run(n, "partition", name, lambda mu=mu: partition_check(mu, x)))
        out.append(_run(n, "sum_rule", name, lambda mu=mu: sum_rule_check(x, mu)))
        out.append(_run(n, "no_pole", name, lambda mu=mu: no_pole_all(x, mu)))
        out.append(_run(n, "mobius", name, lambda mu=mu: mobius_check(x, mu)))
        out.append(_run(n, "group_laws", name, lambda mu=mu: group_laws(x, mu)))
        out.append(_run(n, "chi_compat", name, lambda mu=mu: chi_compat(x, mu)))
        if isinstance(x, LinearTorusStack):
            out.append(_run(n, "additivity", name, lambda mu=mu: additivity(x, mu)))
            out.append(_run(n, "open_restriction", name, lambda mu=mu: open_restriction(x, mu)))
        if inst.theta is not None:
            out.append(_run(n, "theta_reduction", name, lambda name=name, mu=mu: theta_reduction(inst, name, mu)))
    out.append(_run(n, "pi_decomposition", "", lambda: pi_decomposition(x)))
    out.append(_run(n, "trivial_degeneration", "", lambda: trivial_degeneration(x)))
    if isinstance(x, LinearTorusStack):
        out.append(_run(n, "pi_idempotent", "", lambda: pi_idempotent(x)))
        out.append(_run(n, "associativity", "", lambda: associativity(x)))
        out.append(_run(n, "pullback_square", "", lambda: pullback_square(x)))
    return out


def run_all(instances: list[Instance]) -> list[CheckResult]:
    return [r for inst in instances for r in run_instance(inst)]


__all__ = [
    "CheckResult",
    "run_instance",
    "run_all",
    "pi_decomposition",
    "pi_idempotent",
    "trivial_degeneration",
    "group_laws",
    "associativity",
    "pullback_square",
    "open_restriction",
    "additivity",
    "chi_compat",
    "theta_reduction",
    "composable_pairs",
    "no_pole_all",
]
