"""Cutting a rule's left-hand side into a public context and its slots.

A decomposition writes ``lhs = D[l1..ln, y1..yp, z1..zq]`` where ``D`` is a
public context over parameters, the ``l`` pieces are distinct non-variable
terms, the ``y`` are variables that also occur inside some ``l`` and the
``z`` are the remaining variables.  Equal pieces share a parameter.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Dict, Iterator, List, Tuple

from .rewriting import Rule
from .terms import App, Param, Position, Term, instantiate, show, variables


@lru_cache(maxsize=None)
def _holes(k: int) -> Tuple[Term, ...]:
    return tuple(Param(f"w{i + 1}") for i in range(k))


@dataclass(frozen=True)
class Decomposition:
    rule: Rule
    context: Term
    cores: Tuple[Term, ...]
    ys: Tuple[Term, ...]
    zs: Tuple[Term, ...]

    @property
    def n(self) -> int:
        return len(self.cores)

    @property
    def p(self) -> int:
        return len(self.ys)

    @property
    def q(self) -> int:
        return len(self.zs)

    @property
    def slots(self) -> Tuple[Term, ...]:
        return self.cores + self.ys + self.zs

    @property
    def holes(self) -> Tuple[Term, ...]:
        return _holes(len(self.cores) + len(self.ys) + len(self.zs))

    @property
    def proper(self) -> bool:
        return not self.context.is_param

    def plug(self, fillers) -> Term:
        """D with its holes replaced, in slot order, by ``fillers``."""
        return instantiate(self.context, dict(zip(self.holes, fillers)))

    def reconstruct(self) -> Term:
        return self.plug(self.slots)

    def describe(self) -> str:
        parts = [show(self.context)]
        for i, l in enumerate(self.cores):
            parts.append(f"l{i + 1}={show(l)}")
        if self.ys:
            parts.append("y=" + ",".join(v.name for v in self.ys))
        if self.zs:
            parts.append("z=" + ",".join(v.name for v in self.zs))
        return " ".join(parts)


def cut_points(lhs: Term) -> Iterator[Tuple[Position, ...]]:
    """Frontiers of public contexts at the top of ``lhs``, root cut excluded.

    A node is either cut (it becomes a slot) or expanded into the context;
    variables are always cut and private heads cannot be expanded.
    """
    def frontiers(t: Term, p: Position, allow_cut: bool):
        options = []
        if allow_cut:
            options.append((p,))
        if t.is_app and t.symbol.public:
            per_child = [list(frontiers(a, p + (i + 1,), True)) for i, a in enumerate(t.args)]
            for combo in product(*per_child):
                options.append(tuple(q for part in combo for q in part))
        return options

    if lhs.is_var:
        return iter(())
    return iter(frontiers(lhs, (), False))


def _build(rule: Rule, frontier: Tuple[Position, ...]) -> Decomposition:
    lhs = rule.lhs
    cut = set(frontier)

    pieces: List[Term] = []

    def walk(t: Term, p: Position):
        if p in cut:
            pieces.append(t)
        else:
            for i, a in enumerate(t.args):
                walk(a, p + (i + 1,))

    walk(lhs, ())
    cores: Dict[Term, None] = {}
    for t in pieces:
        if not t.is_var:
            cores.setdefault(t, None)
    core_vars = set()
    for c in cores:
        core_vars.update(variables(c))
    ys: Dict[Term, None] = {}
    zs: Dict[Term, None] = {}
    for t in pieces:
        if t.is_var:
            (ys if t in core_vars else zs).setdefault(t, None)
    slots = list(cores) + list(ys) + list(zs)
    index = {t: Param(f"w{i + 1}") for i, t in enumerate(slots)}

    def ctx(t: Term, p: Position) -> Term:
        if p in cut:
            return index[t]
        return App(t.symbol, [ctx(a, p + (i + 1,)) for i, a in enumerate(t.args)])

    return Decomposition(rule, ctx(lhs, ()), tuple(cores), tuple(ys), tuple(zs))


@lru_cache(maxsize=None)
def enumerate_decompositions(rule: Rule) -> Tuple[Decomposition, ...]:
    """All proper decompositions of the rule, each exactly once."""
    out: Dict[tuple, Decomposition] = {}
    for frontier in cut_points(rule.lhs):
        d = _build(rule, frontier)
        out.setdefault((d.context, d.cores, d.ys, d.zs), d)
    return tuple(out.values())


def improper_decomposition(rule: Rule) -> Decomposition:
    return Decomposition(rule, Param("w1"), (rule.lhs,), (), ())
