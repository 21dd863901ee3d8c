"""Theory files: declarations, oriented rules, frames and queries.

Grammar (statements end with ``;`` except the stratum separator)::

    public dec/2, enc/2;          private k/0;        variables x, y;
    rule dec(enc(x,y),y) -> x;
    ---                           # later rules go to the next stratum
    frame phi0 = { w1 -> enc(c0,k), w2 -> k };
    query deducible phi0 : <k,k>;
    query equivalent phi0 phi1;
    query saturate phi0;
    query classify;

``<a,b>`` abbreviates ``pair(a,b)`` and needs a declared ``pair/2``.
Undeclared nullary names in frames and queries become public constants
(with a warning); everything else must be declared.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

from .rewriting import Rule, RewriteSystem, check_rule_wellformed
from .terms import DECLARED, IMPLICIT, PRIVATE, PUBLIC, App, Param, Symbol, Term, Var

PARAM_NAME = re.compile(r"w\d+\Z")


@dataclass(frozen=True)
class Span:
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


@dataclass(frozen=True)
class Diagnostic:
    level: str  # error | warning
    span: Span
    message: str

    def __str__(self) -> str:
        return f"{self.span}: {self.level}: {self.message}"


class TheoryError(Exception):
    def __init__(self, diagnostics: List[Diagnostic]):
        self.diagnostics = diagnostics
        super().__init__("\n".join(str(d) for d in diagnostics))


# ---------------------------------------------------------------------------
# Syntax tree.  Spans are excluded from equality so that render/parse
# round trips compare on content.


@dataclass(frozen=True)
class TermAst:
    name: str
    args: Optional[Tuple["TermAst", ...]] = None  # None for a bare identifier
    sugar: bool = False  # written as <a,b>
    span: Span = field(default=Span(0, 0), compare=False)


@dataclass(frozen=True)
class SymbolDecl:
    visibility: str
    entries: Tuple[Tuple[str, int], ...]
    span: Span = field(default=Span(0, 0), compare=False)


@dataclass(frozen=True)
class VariableDecl:
    names: Tuple[str, ...]
    span: Span = field(default=Span(0, 0), compare=False)


@dataclass(frozen=True)
class RuleDecl:
    lhs: TermAst
    rhs: TermAst
    span: Span = field(default=Span(0, 0), compare=False)


@dataclass(frozen=True)
class Separator:
    span: Span = field(default=Span(0, 0), compare=False)


@dataclass(frozen=True)
class FrameDecl:
    name: str
    entries: Tuple[Tuple[str, TermAst], ...]
    span: Span = field(default=Span(0, 0), compare=False)


@dataclass(frozen=True)
class QueryDecl:
    kind: str  # deducible | equivalent | saturate | classify
    frames: Tuple[str, ...]
    term: Optional[TermAst] = None
    span: Span = field(default=Span(0, 0), compare=False)


Item = Union[SymbolDecl, VariableDecl, RuleDecl, Separator, FrameDecl, QueryDecl]


@dataclass(frozen=True)
class TheoryFile:
    items: Tuple[Item, ...]


# ---------------------------------------------------------------------------
# Lexer

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<sep>---)
  | (?P<arrow>->)
  | (?P<int>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<punct>[(),;{}<>/=:])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: Span


def tokenize(text: str, diags: List[Diagnostic]) -> List[Token]:
    out: List[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        span = Span(line, pos - line_start + 1)
        if m is None:
            diags.append(Diagnostic("error", span, f"unexpected character {text[pos]!r}"))
            pos += 1
            continue
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "punct":
            out.append(Token(m.group(), m.group(), span))
        elif kind not in ("ws", "comment"):
            out.append(Token(kind, m.group(), span))
        pos = m.end()
    out.append(Token("eof", "", Span(line, pos - line_start + 1)))
    return out


# ---------------------------------------------------------------------------
# Parser


class _Syntax(Exception):
    def __init__(self, token: Token, message: str):
        self.token = token
        self.message = message


class _Parser:
    def __init__(self, tokens: List[Token], diags: List[Diagnostic]):
        self.toks = tokens
        self.i = 0
        self.diags = diags

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def expect(self, kind: str, what: Optional[str] = None) -> Token:
        if self.tok.kind != kind:
            found = self.tok.text or "end of file"
            raise _Syntax(self.tok, f"expected {what or kind!r}, found {found!r}")
        return self.advance()

    def recover(self):
        while self.tok.kind not in (";", "eof", "sep"):
            self.advance()
        if self.tok.kind == ";":
            self.advance()

    def file(self) -> TheoryFile:
        items: List[Item] = []
        while self.tok.kind != "eof":
            start = self.i
            try:
                items.append(self.item())
            except _Syntax as e:
                self.diags.append(Diagnostic("error", e.token.span, e.message))
                if self.i == start and self.tok.kind != "eof":
                    self.advance()
                self.recover()
        return TheoryFile(tuple(items))

    def item(self) -> Item:
        t = self.tok
        if t.kind == "sep":
            self.advance()
            return Separator(t.span)
        if t.kind != "ident":
            raise _Syntax(t, f"expected a declaration, found {t.text or 'end of file'!r}")
        word = t.text
        if word in ("public", "private"):
            self.advance()
            entries = [self.symbol_entry()]
            while self.tok.kind == ",":
                self.advance()
                entries.append(self.symbol_entry())
            self.expect(";")
            return SymbolDecl(word, tuple(entries), t.span)
        if word == "variables":
            self.advance()
            names = [self.expect("ident", "variable name").text]
            while self.tok.kind == ",":
                self.advance()
                names.append(self.expect("ident", "variable name").text)
            self.expect(";")
            return VariableDecl(tuple(names), t.span)
        if word == "rule":
            self.advance()
            lhs = self.term()
            self.expect("arrow", "->")
            rhs = self.term()
            self.expect(";")
            return RuleDecl(lhs, rhs, t.span)
        if word == "frame":
            self.advance()
            name = self.expect("ident", "frame name").text
            self.expect("=")
            self.expect("{")
            entries = []
            if self.tok.kind != "}":
                entries.append(self.frame_entry())
                while self.tok.kind == ",":
                    self.advance()
                    entries.append(self.frame_entry())
            self.expect("}")
            self.expect(";")
            return FrameDecl(name, tuple(entries), t.span)
        if word == "query":
            self.advance()
            kind = self.expect("ident", "query kind")
            if kind.text == "deducible":
                name = self.expect("ident", "frame name").text
                self.expect(":")
                term = self.term()
                self.expect(";")
                return QueryDecl("deducible", (name,), term, t.span)
            if kind.text == "equivalent":
                a = self.expect("ident", "frame name").text
                b = self.expect("ident", "frame name").text
                self.expect(";")
                return QueryDecl("equivalent", (a, b), None, t.span)
            if kind.text == "saturate":
                a = self.expect("ident", "frame name").text
                self.expect(";")
                return QueryDecl("saturate", (a,), None, t.span)
            if kind.text == "classify":
                self.expect(";")
                return QueryDecl("classify", (), None, t.span)
            raise _Syntax(kind, f"unknown query kind {kind.text!r}")
        raise _Syntax(t, f"unknown declaration {word!r}")

    def symbol_entry(self) -> Tuple[str, int]:
        name = self.expect("ident", "symbol name").text
        self.expect("/")
        arity = self.expect("int", "arity").text
        return name, int(arity)

    def frame_entry(self) -> Tuple[str, TermAst]:
        w = self.expect("ident", "parameter")
        self.expect("arrow", "->")
        return w.text, self.term()

    def term(self, depth: int = 0) -> TermAst:
        if depth > 500:
            raise _Syntax(self.tok, "term nested too deeply")
        t = self.tok
        if t.kind == "<":
            self.advance()
            a = self.term(depth + 1)
            self.expect(",")
            b = self.term(depth + 1)
            self.expect(">")
            return TermAst("pair", (a, b), True, t.span)
        name = self.expect("ident", "term").text
        if self.tok.kind != "(":
            return TermAst(name, None, False, t.span)
        self.advance()
        args = [self.term(depth + 1)]
        while self.tok.kind == ",":
            self.advance()
            args.append(self.term(depth + 1))
        self.expect(")")
        return TermAst(name, tuple(args), False, t.span)


def parse(text: str) -> Tuple[TheoryFile, List[Diagnostic]]:
    """Parse ``text``; the diagnostics list is empty on success."""
    diags: List[Diagnostic] = []
    toks = tokenize(text, diags)
    tf = _Parser(toks, diags).file()
    return tf, diags


# ---------------------------------------------------------------------------
# Rendering


def render_term(t: TermAst) -> str:
    if t.sugar:
        return f"<{render_term(t.args[0])},{render_term(t.args[1])}>"
    if t.args is None:
        return t.name
    return t.name + "(" + ",".join(render_term(a) for a in t.args) + ")"


def render(tf: TheoryFile) -> str:
    lines = []
    for it in tf.items:
        if isinstance(it, SymbolDecl):
            lines.append(f"{it.visibility} " + ", ".join(f"{n}/{a}" for n, a in it.entries) + ";")
        elif isinstance(it, VariableDecl):
            lines.append("variables " + ", ".join(it.names) + ";")
        elif isinstance(it, RuleDecl):
            lines.append(f"rule {render_term(it.lhs)} -> {render_term(it.rhs)};")
        elif isinstance(it, Separator):
            lines.append("---")
        elif isinstance(it, FrameDecl):
            body = ", ".join(f"{w} -> {render_term(t)}" for w, t in it.entries)
            lines.append(f"frame {it.name} = {{ {body} }};")
        elif it.kind == "deducible":
            lines.append(f"query deducible {it.frames[0]} : {render_term(it.term)};")
        else:
            lines.append(" ".join(("query", it.kind) + it.frames) + ";")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Elaboration


@dataclass
class Query:
    kind: str
    frames: Tuple[str, ...]
    term: Optional[Term]
    span: Span


@dataclass
class Theory:
    symbols: Dict[str, Symbol]
    rules: RewriteSystem
    frames: Dict[str, List[Tuple[Term, Term]]]
    queries: List[Query]
    warnings: List[Diagnostic]

    def symbol(self, name: str) -> Symbol:
        return self.symbols[name]


class _Elaborator:
    def __init__(self, diags: List[Diagnostic]):
        self.diags = diags
        self.symbols: Dict[str, Symbol] = {}
        self.variables: Dict[str, Span] = {}

    def error(self, span: Span, msg: str):
        self.diags.append(Diagnostic("error", span, msg))

    def declare(self, decl: SymbolDecl):
        for name, arity in decl.entries:
            if PARAM_NAME.match(name):
                self.error(decl.span, f"{name} is reserved for frame parameters")
            elif name in self.symbols:
                self.error(decl.span, f"symbol {name} declared twice")
            else:
                vis = PUBLIC if decl.visibility == "public" else PRIVATE
                self.symbols[name] = Symbol(name, arity, vis, DECLARED)

    def term(self, t: TermAst, ground: bool) -> Optional[Term]:
        if t.sugar:
            sym = self.symbols.get("pair")
            if sym is None or sym.arity != 2:
                self.error(t.span, "<a,b> needs a declared binary symbol pair")
                return None
        if t.args is None:
            if t.name in self.variables:
                if ground:
                    self.error(t.span, f"frame term not ground: variable {t.name}")
                    return None
                return Var(t.name)
            sym = self.symbols.get(t.name)
            if sym is None:
                if not ground:
                    self.error(t.span, f"undeclared identifier {t.name} in rule")
                    return None
                if PARAM_NAME.match(t.name):
                    self.error(t.span, f"parameter {t.name} cannot appear inside a term")
                    return None
                sym = Symbol(t.name, 0, PUBLIC, IMPLICIT)
                self.symbols[t.name] = sym
                self.diags.append(Diagnostic(
                    "warning", t.span, f"{t.name} is not declared; treated as a public constant"))
            if sym.arity != 0:
                self.error(t.span, f"{t.name} expects {sym.arity} arguments")
                return None
            return App(sym, ())
        sym = self.symbols.get(t.name)
        if sym is None:
            self.error(t.span, f"unknown symbol of arity {len(t.args)}: {t.name}")
            return None
        if sym.arity != len(t.args):
            self.error(t.span, f"{t.name} expects {sym.arity} arguments, got {len(t.args)}")
            return None
        args = [self.term(a, ground) for a in t.args]
        if any(a is None for a in args):
            return None
        return App(sym, args)

    def run(self, tf: TheoryFile) -> Optional[Theory]:
        for it in tf.items:
            if isinstance(it, SymbolDecl):
                self.declare(it)
        for it in tf.items:
            if isinstance(it, VariableDecl):
                for name in it.names:
                    if name in self.symbols:
                        self.error(it.span, f"{name} is declared both as a symbol and a variable")
                    elif name in self.variables:
                        self.error(it.span, f"variable {name} declared twice")
                    else:
                        self.variables[name] = it.span
        rules: List[Rule] = []
        frames: Dict[str, List[Tuple[Term, Term]]] = {}
        queries: List[Query] = []
        stratum = 0
        for it in tf.items:
            if isinstance(it, Separator):
                stratum += 1
            elif isinstance(it, RuleDecl):
                lhs, rhs = self.term(it.lhs, False), self.term(it.rhs, False)
                if lhs is None or rhs is None:
                    continue
                rule = Rule(lhs, rhs, stratum)
                problems = check_rule_wellformed(rule, len(rules))
                for p in problems:
                    self.error(it.span, p.message)
                if not problems:
                    rules.append(rule)
            elif isinstance(it, FrameDecl):
                if it.name in frames:
                    self.error(it.span, f"frame {it.name} defined twice")
                    continue
                entries = []
                seen = set()
                for w, t in it.entries:
                    if not PARAM_NAME.match(w):
                        self.error(it.span, f"frame keys must be parameters like w1, got {w}")
                        continue
                    if w in seen:
                        self.error(it.span, f"parameter {w} bound twice in frame {it.name}")
                        continue
                    seen.add(w)
                    term = self.term(t, True)
                    if term is not None:
                        entries.append((Param(w), term))
                frames[it.name] = entries
        for it in tf.items:
            if not isinstance(it, QueryDecl):
                continue
            missing = [f for f in it.frames if f not in frames]
            for f in missing:
                self.error(it.span, f"unknown frame {f}")
            if missing:
                continue
            term = None
            if it.kind == "deducible":
                term = self.term(it.term, True)
                if term is None:
                    continue
            if it.kind == "equivalent":
                doms = [sorted(w.name for w, _ in frames[f]) for f in it.frames]
                if doms[0] != doms[1]:
                    self.error(it.span, f"frames {it.frames[0]} and {it.frames[1]} have different domains")
                    continue
            queries.append(Query(it.kind, it.frames, term, it.span))
        if any(d.level == "error" for d in self.diags):
            return None
        return Theory(dict(self.symbols), RewriteSystem(rules), frames, queries,
                      [d for d in self.diags if d.level == "warning"])


def elaborate(tf: TheoryFile) -> Tuple[Optional[Theory], List[Diagnostic]]:
    diags: List[Diagnostic] = []
    th = _Elaborator(diags).run(tf)
    return th, diags


def load_text(text: str) -> Theory:
    """Parse and elaborate, raising TheoryError on any error."""
    tf, diags = parse(text)
    if diags:
        raise TheoryError(diags)
    th, diags = elaborate(tf)
    if th is None:
        raise TheoryError([d for d in diags if d.level == "error"])
    return th


def load(path) -> Theory:
    with open(path, encoding="utf-8") as fh:
        return load_text(fh.read())


def parse_term(text: str, symbols: Dict[str, Symbol], variables=()) -> Term:
    """Read one term over ``symbols``.

    Names in ``variables`` become variables and bare ``w<n>`` names become
    parameters, so both rule sides and recipes can be written directly.
    """
    diags: List[Diagnostic] = []
    p = _Parser(tokenize(text, diags), diags)
    try:
        ast = p.term()
        p.expect("eof", "end of term")
    except _Syntax as exc:
        diags.append(Diagnostic("error", exc.token.span, exc.message))
    if diags:
        raise TheoryError(diags)
    names = set(variables)

    def conv(t: TermAst) -> Term:
        name = "pair" if t.sugar else t.name
        if t.args is None:
            if name in names:
                return Var(name)
            if PARAM_NAME.match(name) and name not in symbols:
                return Param(name)
        sym = symbols.get(name)
        arity = len(t.args or ())
        if sym is None or sym.arity != arity:
            raise TheoryError([Diagnostic("error", t.span, f"unknown symbol of arity {arity}: {name}")])
        return App(sym, [conv(a) for a in t.args or ()])

    return conv(ast)
