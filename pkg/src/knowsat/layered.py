"""Classify rewrite systems as weakly subterm or layered convergent.

For every rule and decomposition we look for one of two certificates: the
right-hand side only uses variables of the core pieces, or the right-hand
side can be rebuilt from the slots by a public context, where each hole is
either filled literally or reached by one head step of a rule from a lower
stratum.  The search is bounded; running out of budget is reported as
inconclusive.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Tuple

from .decompose import Decomposition, enumerate_decompositions, improper_decomposition
from .rewriting import Indeterminate, Rule, RewriteSystem
from .terms import (FILLER, App, Term, Var, const, distinct_subterms, instantiate, match,
                    show, substitute, variables)

DEFAULT_SEARCH_BUDGET = 10_000


def is_weakly_subterm(R: RewriteSystem) -> bool:
    for rule in R:
        if rule.rhs in distinct_subterms(rule.lhs):
            continue
        if rule.rhs.ground and R.is_normal(rule.rhs):
            continue
        return False
    return True


@dataclass
class Evidence:
    rule_index: int
    decomposition: Decomposition
    condition: str  # "i", "ii" or "none"
    context: Optional[Term] = None
    note: str = ""

    def describe(self) -> str:
        head = f"rule {self.rule_index} [{self.decomposition.describe()}]"
        if self.condition == "i":
            return f"{head}: (i) rhs variables occur in the core pieces"
        if self.condition == "ii":
            return f"{head}: (ii) context {show(self.context)}"
        return f"{head}: {self.note}"


@dataclass
class LayeredReport:
    verdict: str  # layered | not-layered | inconclusive
    weakly_subterm: bool
    evidence: List[Evidence] = field(default_factory=list)

    @property
    def failures(self) -> List[Evidence]:
        return [e for e in self.evidence if e.condition == "none"]


class _Budget:
    def __init__(self, limit: int):
        self.left = limit

    def tick(self):
        self.left -= 1
        if self.left < 0:
            raise Indeterminate("context search budget exhausted")


class _Search:
    """Builds contexts over the slots of one decomposition."""

    def __init__(self, dec: Decomposition, lower: RewriteSystem, budget: _Budget):
        self.dec = dec
        self.lower = lower
        self.budget = budget
        self.slot_hole = dict(zip(dec.slots, dec.holes))
        self._fresh = 0

    def expressible(self, t: Term) -> Optional[Term]:
        """A context C over the slots with C[slots] = t literally."""
        self.budget.tick()
        hole = self.slot_hole.get(t)
        if hole is not None:
            return hole
        if t.is_app and t.symbol.public:
            parts = []
            for a in t.args:
                c = self.expressible(a)
                if c is None:
                    return None
                parts.append(c)
            return App(t.symbol, parts)
        return None

    def solve(self, pattern: Term, theta: dict) -> Iterator[Tuple[dict, Term]]:
        """Extensions of theta making ``pattern`` slot-expressible."""
        self.budget.tick()
        if pattern.is_var:
            if pattern in theta:
                c = self.expressible(theta[pattern])
                if c is not None:
                    yield theta, c
                return
            # an unconstrained variable: any slot works, as does a public constant
            for slot, hole in self.slot_hole.items():
                yield {**theta, pattern: slot}, hole
            filler = const(FILLER)
            yield {**theta, pattern: filler}, filler
            return
        for slot, hole in self.slot_hole.items():
            ext = match(pattern, slot, theta)
            if ext is not None:
                yield ext, hole
        if pattern.is_app and pattern.symbol.public:
            yield from self._solve_args(pattern, list(pattern.args), 0, theta, [])

    def _solve_args(self, pattern, args, i, theta, acc):
        if i == len(args):
            yield theta, App(pattern.symbol, acc)
            return
        for ext, c in self.solve(args[i], theta):
            yield from self._solve_args(pattern, args, i + 1, ext, acc + [c])

    def head_step(self, t: Term) -> Optional[Term]:
        """A context C with C[slots] -> t in one root step of a lower rule."""
        for rule in self.lower:
            self._fresh += 1
            ren = {v: Var(f"{v.name}'{self._fresh}") for v in variables(rule.lhs)}
            lhs, rhs = substitute(rule.lhs, ren), substitute(rule.rhs, ren)
            theta = match(rhs, t)
            if theta is None:
                continue
            for _, c in self.solve(lhs, theta):
                return c
        return None

    def realize(self, t: Term) -> Optional[Term]:
        """Context for t cut as C0[s1..sk], each s literal or one head step."""
        c = self.expressible(t)
        if c is not None:
            return c
        c = self.head_step(t)
        if c is not None:
            return c
        if t.is_app and t.symbol.public:
            parts = []
            for a in t.args:
                c = self.realize(a)
                if c is None:
                    return None
                parts.append(c)
            return App(t.symbol, parts)
        return None


def check_decomposition(rule_index: int, dec: Decomposition, lower: RewriteSystem,
                        budget: int = DEFAULT_SEARCH_BUDGET) -> Evidence:
    rule = dec.rule
    core_vars = set()
    for c in dec.cores:
        core_vars.update(variables(c))
    if set(variables(rule.rhs)) <= core_vars:
        return Evidence(rule_index, dec, "i")
    search = _Search(dec, lower, _Budget(budget))
    try:
        ctx = search.realize(rule.rhs)
    except Indeterminate:
        return Evidence(rule_index, dec, "inconclusive", note="search budget exhausted")
    if ctx is None:
        missing = [v.name for v in variables(rule.rhs)
                   if v not in core_vars and v not in dec.slots]
        note = "no context realizes the right-hand side"
        if missing:
            note += " (unreachable: " + ", ".join(missing) + ")"
        return Evidence(rule_index, dec, "none", note=note)
    # the certificate must rewrite to the rhs along the lower rules
    built = instantiate(ctx, dict(zip(dec.holes, dec.slots)))
    if lower.normalize(built) is not lower.normalize(rule.rhs):
        return Evidence(rule_index, dec, "none", note="context failed re-check by normalization")
    return Evidence(rule_index, dec, "ii", context=ctx)


def check_layered(R: RewriteSystem, budget: int = DEFAULT_SEARCH_BUDGET) -> LayeredReport:
    weak = is_weakly_subterm(R)
    rules = list(R.rules)
    if weak:
        # a weakly subterm system is layered with a single stratum
        rules = [Rule(r.lhs, r.rhs, 0) for r in rules]
    evidence = []
    for i, rule in enumerate(rules):
        lower = RewriteSystem([r for r in rules if r.stratum < rule.stratum])
        decs = (improper_decomposition(rule),) + enumerate_decompositions(rule)
        for dec in decs:
            evidence.append(check_decomposition(i, dec, lower, budget))
    conditions = {e.condition for e in evidence}
    if "none" in conditions:
        verdict = "not-layered"
    elif "inconclusive" in conditions:
        verdict = "inconclusive"
    else:
        verdict = "layered"
    if weak and verdict != "layered":
        raise AssertionError("weakly subterm system failed the layered check")
    return LayeredReport(verdict, weak, evidence)
