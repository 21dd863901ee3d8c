"""Frames whose saturation produces exponentially large recipes.

``t(i, 0) = c_i`` and ``t(i, n+1) = <enc(t(i, n), k(i, n)), k(i, n)>`` with a fresh
private key per level.  The frames for variants 0 and 1 differ only in the
innermost constant, which is reachable only through n nested decryptions.
"""
from __future__ import annotations

from typing import Dict, List, Tuple

from .rewriting import Rule, RewriteSystem
from .terms import PRIVATE, PUBLIC, App, Param, Symbol, Term, Var, const

SYMBOLS: Dict[str, Symbol] = {
    name: Symbol(name, arity, PUBLIC)
    for name, arity in [("dec", 2), ("enc", 2), ("pair", 2), ("proj1", 1), ("proj2", 1),
                        ("c0", 0), ("c1", 0)]
}


def enc_rules() -> RewriteSystem:
    s = SYMBOLS
    x, y = Var("x"), Var("y")
    return RewriteSystem([
        Rule(App(s["dec"], [App(s["enc"], [x, y]), y]), x),
        Rule(App(s["proj1"], [App(s["pair"], [x, y])]), x),
        Rule(App(s["proj2"], [App(s["pair"], [x, y])]), y),
    ])


def key(variant: int, level: int) -> Term:
    return const(Symbol(f"k{variant}_{level}", 0, PRIVATE))


def nested(variant: int, n: int) -> Term:
    enc, pair = SYMBOLS["enc"], SYMBOLS["pair"]
    t = const(SYMBOLS[f"c{variant}"])
    for j in range(n):
        k = key(variant, j)
        t = App(pair, [App(enc, [t, k]), k])
    return t


def gen_benchmark(n: int, variant: int) -> List[Tuple[Term, Term]]:
    if n < 0 or variant not in (0, 1):
        raise ValueError("need n >= 0 and variant 0 or 1")
    return [(Param("w1"), nested(variant, n)),
            (Param("w2"), const(SYMBOLS["c0"])),
            (Param("w3"), const(SYMBOLS["c1"]))]


def benchmark_symbols(n: int) -> List[Symbol]:
    return list(SYMBOLS.values()) + [key(v, j).symbol for v in (0, 1) for j in range(n)]
