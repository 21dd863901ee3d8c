"""Termination bounds on saturated states, checked after the fact.

Each check returns the offending fact terms (empty when the bound holds).
"""
from __future__ import annotations

from typing import List, Set

from .rewriting import RewriteSystem
from .saturate import SaturationResult, frame_binding
from .terms import App, Term, distinct_subterms


def st_ext(t: Term, closed: bool = False) -> Set[Term]:
    """Extended subterms: plain subterms plus enc(t1,u) for every enc(<t1,t2>,u).

    With ``closed`` the added enc(t1,u) is itself expanded, so a nested pair
    contributes every left spine prefix; the plain definition stops after one.
    """
    out: Set[Term] = set()
    stack = [t]
    while stack:
        s = stack.pop()
        if s in out:
            continue
        out.add(s)
        stack.extend(s.args)
        if s.is_app and s.name == "enc" and len(s.args) == 2:
            body, key = s.args
            if body.is_app and body.name == "pair" and len(body.args) == 2:
                extra = App(s.symbol, [body.args[0], key])
                if closed:
                    stack.append(extra)
                else:
                    out.add(extra)
                    stack.extend(extra.args)
    return out


def init_terms(result: SaturationResult, R: RewriteSystem) -> List[Term]:
    return [R.normalize(t) for t in frame_binding(result.frame).values()]


def fact_count_violations(result: SaturationResult) -> List[str]:
    """B.2 only adds subterms of known terms, so it can never add more facts
    than there are distinct subterms in the final frame."""
    universe: Set[Term] = set()
    for f in result.facts:
        universe.update(distinct_subterms(f.term))
    problems = []
    if result.stats.b2_facts > len(universe):
        problems.append(f"{result.stats.b2_facts} B.2 facts exceed {len(universe)} subterms")
    if len(result.facts) > len(universe):
        problems.append(f"{len(result.facts)} facts exceed {len(universe)} subterms")
    return problems


def _outside(result: SaturationResult, allowed: Set[Term]) -> List[Term]:
    return [f.term for f in result.facts if f.term not in allowed]


def subterm_violations(result: SaturationResult, R: RewriteSystem) -> List[Term]:
    """Fact terms outside the subterms of the initial frame and the ground rhs."""
    allowed: Set[Term] = set()
    for t in init_terms(result, R):
        allowed.update(distinct_subterms(t))
    allowed.update(rule.rhs for rule in R.rules if rule.rhs.ground)
    return _outside(result, allowed)


def st_ext_violations(result: SaturationResult, R: RewriteSystem,
                      closed: bool = False) -> List[Term]:
    allowed: Set[Term] = set()
    for t in init_terms(result, R):
        allowed |= st_ext(t, closed)
    return _outside(result, allowed)

