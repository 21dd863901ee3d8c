from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .terms import (App, Position, Term, Var, distinct_subterms, match, positions,
                    replace_at, show, substitute, variables)

DEFAULT_NORMALIZE_CAP = 100_000


class Indeterminate(Exception):
    """Raised when a bounded computation runs out of budget."""


@dataclass(frozen=True)
class Rule:
    lhs: Term
    rhs: Term
    stratum: int = 0

    def __str__(self) -> str:
        return f"{show(self.lhs)} -> {show(self.rhs)}"


@dataclass(frozen=True)
class RuleProblem:
    index: int
    message: str


def check_rule_wellformed(rule: Rule, index: int = 0) -> List[RuleProblem]:
    if rule.lhs.is_var:
        return [RuleProblem(index, "lhs is a variable")]
    if rule.lhs.is_param or rule.lhs.has_params or rule.rhs.has_params:
        return [RuleProblem(index, "rules may not mention parameters")]
    lhs_vars = set(variables(rule.lhs))
    return [RuleProblem(index, f"variable {v.name} not in lhs")
            for v in variables(rule.rhs) if v not in lhs_vars]


class RewriteSystem:
    """An ordered list of rules, normalized innermost-leftmost.

    Normal forms are memoized per system; the cache is an internal detail and
    never changes observable results.
    """

    def __init__(self, rules: Sequence[Rule] = (), cap: int = DEFAULT_NORMALIZE_CAP):
        self.rules: Tuple[Rule, ...] = tuple(rules)
        for prev, cur in zip(self.rules, self.rules[1:]):
            if cur.stratum < prev.stratum:
                raise ValueError("strata must be non-decreasing in listing order")
        problems = [p for i, r in enumerate(self.rules) for p in check_rule_wellformed(r, i)]
        if problems:
            raise ValueError("; ".join(f"rule {p.index}: {p.message}" for p in problems))
        self.cap = cap
        self._by_head: Dict[object, List[Rule]] = {}
        for r in self.rules:
            self._by_head.setdefault(r.lhs.symbol, []).append(r)
        self._nf: Dict[Term, Term] = {}

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    @property
    def strata(self) -> Tuple[int, ...]:
        return tuple(r.stratum for r in self.rules)

    def below(self, stratum: int) -> "RewriteSystem":
        return RewriteSystem([r for r in self.rules if r.stratum < stratum], self.cap)

    def symbols(self) -> set:
        out = set()
        for r in self.rules:
            for side in (r.lhs, r.rhs):
                out.update(u.symbol for u in distinct_subterms(side) if u.is_app)
        return out

    # -- rewriting ---------------------------------------------------------

    def _root_step(self, t: Term) -> Optional[Tuple[Term, Rule]]:
        if not t.is_app:
            return None
        for rule in self._by_head.get(t.symbol, ()):
            sigma = match(rule.lhs, t)
            if sigma is not None:
                return substitute(rule.rhs, sigma), rule
        return None

    def reduce_once(self, t: Term) -> Optional[Tuple[Term, Position, Rule]]:
        """One innermost-leftmost step, or None if t is in normal form."""
        found = self._innermost(t, ())
        if found is None:
            return None
        p, reduct, rule = found
        return replace_at(t, p, reduct), p, rule

    def _innermost(self, t: Term, p: Position):
        for i, a in enumerate(t.args):
            found = self._innermost(a, p + (i + 1,))
            if found is not None:
                return found
        step = self._root_step(t)
        if step is None:
            return None
        return p, step[0], step[1]

    def normalize(self, t: Term, cap: Optional[int] = None) -> Term:
        r = self._nf.get(t)
        if r is not None:
            return r
        budget = [self.cap if cap is None else cap]
        return self._normalize(t, budget)

    def _normalize(self, t: Term, budget: list) -> Term:
        r = self._nf.get(t)
        if r is not None:
            return r
        if t.is_app and t.args:
            args = tuple(self._normalize(a, budget) for a in t.args)
            u = t if all(x is y for x, y in zip(args, t.args)) else App(t.symbol, args)
            r = self._nf.get(u)
            if r is not None:
                self._nf[t] = r
                return r
        else:
            u = t
        step = self._root_step(u)
        if step is None:
            r = u
        else:
            budget[0] -= 1
            if budget[0] < 0:
                raise Indeterminate(f"normalization exceeded {self.cap} rewrite steps")
            r = self._normalize(step[0], budget)
        self._nf[t] = r
        self._nf[u] = r
        return r

    def is_normal(self, t: Term) -> bool:
        return all(self._root_step(u) is None for u in distinct_subterms(t))


# ---------------------------------------------------------------------------
# Convergence lint (advisory)


def unify(a: Term, b: Term) -> Optional[dict]:
    """Most general unifier of two plain terms, or None."""
    sigma: Dict[Term, Term] = {}

    def walk(t: Term) -> Term:
        while t.is_var and t in sigma:
            t = sigma[t]
        return t

    def occurs(v: Term, t: Term) -> bool:
        t = walk(t)
        if t is v:
            return True
        return any(occurs(v, x) for x in t.args)

    stack = [(a, b)]
    while stack:
        s, t = stack.pop()
        s, t = walk(s), walk(t)
        if s is t:
            continue
        if s.is_var:
            if occurs(s, t):
                return None
            sigma[s] = t
        elif t.is_var:
            if occurs(t, s):
                return None
            sigma[t] = s
        elif s.is_app and t.is_app and s.symbol == t.symbol:
            stack.extend(zip(s.args, t.args))
        else:
            return None

    def resolve(t: Term) -> Term:
        t = walk(t)
        if t.is_app and not t.ground:
            return App(t.symbol, [resolve(x) for x in t.args])
        return t

    return {v: resolve(v) for v in list(sigma)}


def _rename(rule: Rule, suffix: str) -> Rule:
    ren = {v: Var(v.name + suffix) for v in variables(rule.lhs)}
    return Rule(substitute(rule.lhs, ren), substitute(rule.rhs, ren), rule.stratum)


@dataclass
class CriticalPair:
    outer: int
    inner: int
    position: Position
    left: Term
    right: Term
    status: str  # joinable | not-joinable | inconclusive


@dataclass
class LintReport:
    verdict: str  # pass | warn | inconclusive
    pairs: List[CriticalPair] = field(default_factory=list)

    @property
    def problems(self) -> List[CriticalPair]:
        return [p for p in self.pairs if p.status != "joinable"]


def critical_pairs(R: RewriteSystem) -> List[Tuple[int, int, Position, Term, Term]]:
    out = []
    rules = R.rules
    for i, r1 in enumerate(rules):
        a = _rename(r1, "'1")
        for j, r2 in enumerate(rules):
            b = _rename(r2, "'2")
            for p, sub in positions(a.lhs):
                if sub.is_var or (not p and i == j):
                    continue
                mgu = unify(sub, b.lhs)
                if mgu is None:
                    continue
                peak = substitute(a.lhs, mgu)
                left = substitute(a.rhs, mgu)
                right = replace_at(peak, p, substitute(b.rhs, mgu))
                out.append((i, j, p, left, right))
    return out


def lint_convergence(R: RewriteSystem, budget: int = 10_000) -> LintReport:
    pairs = []
    for i, j, p, left, right in critical_pairs(R):
        try:
            joinable = R.normalize(left, budget) is R.normalize(right, budget)
            status = "joinable" if joinable else "not-joinable"
        except (Indeterminate, RecursionError):
            status = "inconclusive"
        pairs.append(CriticalPair(i, j, p, left, right, status))
    statuses = {c.status for c in pairs}
    if "not-joinable" in statuses:
        verdict = "warn"
    elif "inconclusive" in statuses:
        verdict = "inconclusive"
    else:
        verdict = "pass"
    return LintReport(verdict, pairs)
