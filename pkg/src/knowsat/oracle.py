"""Brute-force ground truth for deducibility and static equivalence.

Recipes are enumerated level by level (depth, then term order) over the
frame's parameters, the public constants of the signature and a small pool
of fresh public constants.  Recipes with the same value on every frame are
interchangeable, so only the first one per value is kept; this keeps the
search exact up to the depth bound while pruning duplicates.  Answers are
one-sided: "not found" only means "not found within the budget".
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .rewriting import RewriteSystem
from .saturate import Frame
from .terms import App, Symbol, Term, const, instantiate, reserved_constant, show, sort_key


@dataclass(frozen=True)
class RecipeBudget:
    depth: int = 3
    pool: int = 2
    cap: int = 20_000

    def __post_init__(self):
        if self.depth < 0 or self.cap <= 0 or self.pool < 0:
            raise ValueError("invalid recipe budget")


@dataclass
class OracleResult:
    found: Optional[object]
    inconclusive: bool
    depth_reached: int
    explored: int

    def __bool__(self) -> bool:
        return self.found is not None


POOL = [reserved_constant(f"n{i + 1}") for i in range(8)]


class _Enumerator:
    def __init__(self, R: RewriteSystem, frames: Sequence[Frame], symbols: Iterable[Symbol],
                 budget: RecipeBudget):
        self.R = R
        self.bindings = [dict(f) for f in frames]
        self.budget = budget
        syms = {s for s in symbols if s.public}
        self.functions = sorted((s for s in syms if s.arity > 0), key=lambda s: (s.name, s.arity))
        consts = sorted((s for s in syms if s.arity == 0), key=lambda s: s.name)
        consts += POOL[:budget.pool]
        params = sorted({w for b in self.bindings for w in b}, key=sort_key)
        self.leaves = list(params) + [const(c) for c in consts]
        self.explored = 0
        self.inconclusive = False
        self.values: Dict[tuple, Term] = {}
        self.layers: List[List[Tuple[Term, tuple]]] = []

    def value_of_leaf(self, leaf: Term) -> tuple:
        if leaf.is_param:
            return tuple(self.R.normalize(b[leaf]) for b in self.bindings)
        return tuple(leaf for _ in self.bindings)

    def levels(self):
        """Yield, per depth, the newly reached (recipe, value) pairs in order."""
        first = []
        for leaf in sorted(self.leaves, key=sort_key):
            self.explored += 1
            v = self.value_of_leaf(leaf)
            if v not in self.values:
                self.values[v] = leaf
                first.append((leaf, v))
        self.layers.append(first)
        yield 0, first
        for depth in range(1, self.budget.depth + 1):
            cands = []
            old = [item for layer in self.layers[:-1] for item in layer]
            new = self.layers[-1]
            everything = old + new
            stop = False
            for f in self.functions:
                for i in range(f.arity):
                    pools = [old] * i + [new] + [everything] * (f.arity - i - 1)
                    for combo in product(*pools):
                        self.explored += 1
                        if self.explored > self.budget.cap:
                            stop = True
                            break
                        recipe = App(f, [c[0] for c in combo])
                        value = tuple(
                            self.R.normalize(App(f, [c[1][k] for c in combo]))
                            for k in range(len(self.bindings)))
                        cands.append((recipe, value))
                    if stop:
                        break
                if stop:
                    break
            cands.sort(key=lambda c: sort_key(c[0]))
            layer = []
            for recipe, value in cands:
                if value not in self.values:
                    self.values[value] = recipe
                    layer.append((recipe, value))
            self.layers.append(layer)
            yield depth, layer
            if stop:
                self.inconclusive = True
                return


def _check(recipe: Term, frame: Frame, R: RewriteSystem) -> Term:
    return R.normalize(instantiate(recipe, dict(frame)))


def oracle_values(R: RewriteSystem, frame: Frame, symbols: Iterable[Symbol],
                  budget: RecipeBudget = RecipeBudget()) -> Tuple[Dict[Term, Term], bool]:
    """Every value reachable within the budget, with its first recipe."""
    e = _Enumerator(R, [frame], symbols, budget)
    for _ in e.levels():
        pass
    return {v[0]: r for v, r in e.values.items()}, e.inconclusive


def oracle_deducible(R: RewriteSystem, frame: Frame, t: Term, symbols: Iterable[Symbol],
                     budget: RecipeBudget = RecipeBudget()) -> OracleResult:
    target = R.normalize(t)
    e = _Enumerator(R, [frame], symbols, budget)
    depth = 0
    for depth, layer in e.levels():
        for recipe, value in layer:
            if value[0] is target:
                assert _check(recipe, frame, R) is target
                return OracleResult(recipe, False, depth, e.explored)
    return OracleResult(None, e.inconclusive, depth, e.explored)


def oracle_distinguish(R: RewriteSystem, frame1: Frame, frame2: Frame, symbols: Iterable[Symbol],
                       budget: RecipeBudget = RecipeBudget()) -> OracleResult:
    """First pair of recipes equal on one frame and different on the other."""
    if sorted(w.name for w, _ in frame1) != sorted(w.name for w, _ in frame2):
        raise ValueError("frames have different domains")
    e = _Enumerator(R, [frame1, frame2], symbols, budget)
    by_first: Dict[Term, Tuple[Term, Term]] = {}
    by_second: Dict[Term, Tuple[Term, Term]] = {}
    depth = 0
    for depth, layer in e.levels():
        for recipe, (a, b) in layer:
            for index, key, other in ((by_first, a, b), (by_second, b, a)):
                prev = index.get(key)
                if prev is None:
                    index[key] = (other, recipe)
                elif prev[0] is not other:
                    pair = (prev[1], recipe)
                    _verify(R, frame1, frame2, pair)
                    return OracleResult(pair, False, depth, e.explored)
    return OracleResult(None, e.inconclusive, depth, e.explored)


def _verify(R, frame1, frame2, pair):
    m, n = pair
    eq1 = _check(m, frame1, R) is _check(n, frame1, R)
    eq2 = _check(m, frame2, R) is _check(n, frame2, R)
    if eq1 == eq2:
        raise AssertionError(f"oracle pair {show(m)}, {show(n)} does not distinguish")
