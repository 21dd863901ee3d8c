"""First-order terms with public/private symbols, variables and parameters.

Terms are hash-consed: building the same term twice returns the same object,
so equality is structural and costs one identity check.  Recipes produced by
saturation can have exponential tree size while staying small as DAGs, so
every traversal here memoizes on node identity.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Tuple

PUBLIC = "public"
PRIVATE = "private"

DECLARED = "declared"
IMPLICIT = "implicit-public-constant"
RESERVED = "reserved"

Position = Tuple[int, ...]


@dataclass(frozen=True)
class Symbol:
    name: str
    arity: int
    visibility: str = PUBLIC
    origin: str = DECLARED

    @property
    def public(self) -> bool:
        return self.visibility == PUBLIC

    def __repr__(self) -> str:
        return f"{self.name}/{self.arity}"


def reserved_constant(name: str) -> Symbol:
    """A public constant whose name cannot be written in a theory file."""
    return Symbol("#" + name, 0, PUBLIC, RESERVED)


# The fixed public constant used to fill free slots of new deduction facts.
FILLER = reserved_constant("a")


_VAR, _PARAM, _APP = 0, 1, 2
# strong table: interned terms live as long as the process
_table: Dict[tuple, "Term"] = {}


class Term:
    __slots__ = ("kind", "name", "symbol", "args", "size", "depth", "ground",
                 "has_params", "public", "_key")

    kind: int
    name: str
    symbol: Optional[Symbol]
    args: Tuple["Term", ...]
    size: int
    depth: int
    ground: bool
    has_params: bool
    public: bool

    def __setattr__(self, key, value):
        raise AttributeError("terms are immutable")

    def __reduce__(self):
        if self.kind == _VAR:
            return (Var, (self.name,))
        if self.kind == _PARAM:
            return (Param, (self.name,))
        return (App, (self.symbol, self.args))

    @property
    def is_var(self) -> bool:
        return self.kind == _VAR

    @property
    def is_param(self) -> bool:
        return self.kind == _PARAM

    @property
    def is_app(self) -> bool:
        return self.kind == _APP

    def __repr__(self) -> str:
        return show(self)

    def __lt__(self, other: "Term") -> bool:
        return compare(self, other) < 0


def _make(key: tuple, kind: int, name: str, symbol, args) -> Term:
    t = _table.get(key)
    if t is not None:
        return t
    t = object.__new__(Term)
    put = object.__setattr__
    put(t, "kind", kind)
    put(t, "name", name)
    put(t, "symbol", symbol)
    put(t, "args", args)
    if kind == _APP:
        size, depth, ground, params, public = 1, 0, True, False, symbol.public
        for a in args:
            size += a.size
            if a.depth >= depth:
                depth = a.depth + 1
            ground = ground and a.ground
            params = params or a.has_params
            public = public and a.public
        put(t, "size", size)
        put(t, "depth", depth)
        put(t, "ground", ground)
        put(t, "has_params", params)
        put(t, "public", public)
    else:
        put(t, "size", 1)
        put(t, "depth", 0)
        put(t, "ground", kind != _VAR)
        put(t, "has_params", kind == _PARAM)
        put(t, "public", True)
    put(t, "_key", None)
    # a racing thread may have interned the same key meanwhile; keep the first
    return _table.setdefault(key, t)


def Var(name: str) -> Term:
    return _make((_VAR, name), _VAR, name, None, ())


def Param(name: str) -> Term:
    return _make((_PARAM, name), _PARAM, name, None, ())


def App(symbol: Symbol, args: Iterable[Term] = ()) -> Term:
    args = tuple(args)
    if len(args) != symbol.arity:
        raise ValueError(f"{symbol.name} expects {symbol.arity} arguments, got {len(args)}")
    return _make((_APP, symbol, args), _APP, symbol.name, symbol, args)


def const(symbol: Symbol) -> Term:
    return App(symbol, ())


# ---------------------------------------------------------------------------
# Traversals


def positions(t: Term) -> Iterator[Tuple[Position, Term]]:
    """Every (position, subterm) pair in pre-order.  Tree-sized output."""
    stack: List[Tuple[Position, Term]] = [((), t)]
    while stack:
        p, u = stack.pop()
        yield p, u
        for i in range(len(u.args) - 1, -1, -1):
            stack.append((p + (i + 1,), u.args[i]))


def subterms(t: Term) -> set:
    return set(positions(t))


def distinct_subterms(t: Term, acc: Optional[dict] = None) -> dict:
    """Distinct subterms of t, children before parents (insertion ordered)."""
    out: dict = {} if acc is None else acc
    stack = [(t, False)]
    while stack:
        u, expanded = stack.pop()
        if u in out:
            continue
        if expanded or not u.args:
            out[u] = None
            continue
        stack.append((u, True))
        for a in reversed(u.args):
            if a not in out:
                stack.append((a, False))
    return out


def subterm_at(t: Term, p: Position) -> Term:
    for i in p:
        if not 1 <= i <= len(t.args):
            raise IndexError(f"invalid position {p}")
        t = t.args[i - 1]
    return t


def replace_at(t: Term, p: Position, u: Term) -> Term:
    if not p:
        return u
    i = p[0]
    if not 1 <= i <= len(t.args):
        raise IndexError(f"invalid position {p}")
    args = list(t.args)
    args[i - 1] = replace_at(args[i - 1], p[1:], u)
    return App(t.symbol, args)


def variables(t: Term) -> List[Term]:
    """Variables of t in order of first (leftmost) occurrence."""
    seen: dict = {}
    visited = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if u.ground or u in visited:
            continue
        visited.add(u)
        if u.kind == _VAR:
            seen.setdefault(u, None)
        else:
            stack.extend(reversed(u.args))
    return list(seen)


def params(t: Term) -> List[Term]:
    seen: dict = {}
    visited = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if not u.has_params or u in visited:
            continue
        visited.add(u)
        if u.kind == _PARAM:
            seen.setdefault(u, None)
        else:
            stack.extend(reversed(u.args))
    return list(seen)


def symbols_of(t: Term) -> set:
    return {u.symbol for u in distinct_subterms(t) if u.kind == _APP}


def is_recipe(t: Term) -> bool:
    return t.public


def is_plain(t: Term) -> bool:
    return not t.has_params


def _rebuild(t: Term, leaf: Callable[[Term], Optional[Term]], skip: Callable[[Term], bool],
             memo: Dict[Term, Term]) -> Term:
    if skip(t):
        return t
    r = memo.get(t)
    if r is not None:
        return r
    if t.kind == _APP:
        args = tuple(_rebuild(a, leaf, skip, memo) for a in t.args)
        r = t if all(x is y for x, y in zip(args, t.args)) else App(t.symbol, args)
    else:
        r = leaf(t)
        if r is None:
            r = t
    memo[t] = r
    return r


def substitute(t: Term, sigma: Mapping[Term, Term], memo: Optional[dict] = None) -> Term:
    """Simultaneously replace variables (keys of sigma) in t."""
    if not sigma:
        return t
    return _rebuild(t, sigma.get, lambda u: u.ground, {} if memo is None else memo)


def instantiate(t: Term, binding: Mapping[Term, Term], memo: Optional[dict] = None) -> Term:
    """Simultaneously replace parameters (keys of binding) in t."""
    if not binding:
        return t
    return _rebuild(t, binding.get, lambda u: not u.has_params, {} if memo is None else memo)


def match(pattern: Term, subject: Term, sigma: Optional[dict] = None) -> Optional[dict]:
    """Syntactic matching; variables of the subject are ordinary leaves."""
    sigma = {} if sigma is None else dict(sigma)
    stack = [(pattern, subject)]
    while stack:
        p, s = stack.pop()
        if p.kind == _VAR:
            bound = sigma.get(p)
            if bound is None:
                sigma[p] = s
            elif bound is not s:
                return None
        elif p.kind == _PARAM:
            if p is not s:
                return None
        else:
            if p.ground:
                if p is not s:
                    return None
                continue
            if s.kind != _APP or s.symbol != p.symbol:
                return None
            stack.extend(zip(p.args, s.args))
    return sigma


# ---------------------------------------------------------------------------
# Ordering


def _natural(name: str) -> tuple:
    return tuple((0, int(part), "") if part.isdigit() else (1, 0, part)
                 for part in re.findall(r"\d+|\D+", name))


def sort_key(t: Term) -> tuple:
    """Key of the total term order: size, then kind, name, then arguments."""
    k = t._key
    if k is not None:
        return k
    # iterative post-order so that deep terms do not hit the recursion limit
    stack = [t]
    while stack:
        u = stack[-1]
        pending = [a for a in u.args if a._key is None]
        if pending:
            stack.extend(pending)
            continue
        stack.pop()
        if u._key is None:
            rank = (0, 2, 1)[u.kind]
            object.__setattr__(u, "_key", (u.size, rank, _natural(u.name),
                                           tuple(a._key for a in u.args)))
    return t._key


def compare(a: Term, b: Term) -> int:
    if a is b:
        return 0
    ka, kb = sort_key(a), sort_key(b)
    return -1 if ka < kb else 1


def sorted_terms(ts: Iterable[Term]) -> List[Term]:
    return sorted(ts, key=sort_key)


# ---------------------------------------------------------------------------
# Printing


def show(t: Term) -> str:
    """Surface syntax, with <a,b> for the binary symbol named pair."""
    out: List[str] = []
    # explicit stack of pending terms and literal separators
    stack: list = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, str):
            out.append(u)
        elif not u.args:
            out.append(u.name)
        elif u.name == "pair" and len(u.args) == 2:
            out.append("<")
            stack += [">", u.args[1], ",", u.args[0]]
        else:
            out.append(u.name + "(")
            stack.append(")")
            for i in range(len(u.args) - 1, -1, -1):
                stack.append(u.args[i])
                if i:
                    stack.append(",")
    return "".join(out)
