"""Saturation of a frame into deduction facts and quantified equations.

The state is a one-to-one set of facts ``M |> t`` (recipe ``M`` computes the
reduced term ``t``) together with equations between recipes that hold in the
frame.  Two families of rules grow it:

* syntactic rules (B) look at subterms of known terms whose arguments are
  already known and either record a new fact or an equation;
* context-reduction rules (A) instantiate a decomposition of a rewrite rule
  on known facts and add whatever the reduct teaches us.

B rules always run to a fixpoint before the next A instance is taken from a
FIFO worklist.  A instances whose reduct is neither deducible nor ground are
parked and retried whenever the frame grows; if nothing else is left to do
while some are parked, saturation fails.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Deque, Dict, Iterable, List, Optional, Sequence, Tuple

from .decompose import Decomposition, enumerate_decompositions
from .rewriting import Indeterminate, RewriteSystem
from .terms import (FILLER, App, Term, Var, const, instantiate,
                    match, reserved_constant, show, sort_key, substitute, variables)

DEFAULT_MAX_STEPS = 50_000

SATURATED = "saturated"
FAILED = "failed"
INDETERMINATE = "indeterminate"


class SoundnessError(AssertionError):
    pass


class FrameError(ValueError):
    """Malformed input frame."""


Frame = Sequence[Tuple[Term, Term]]  # (parameter, ground term) pairs, in order


@dataclass(frozen=True)
class Fact:
    recipe: Term
    term: Term

    def __str__(self) -> str:
        return f"{show(self.recipe)} |> {show(self.term)}"


@dataclass(frozen=True)
class Equation:
    """A canonical quantified equation ``forall zs. left ~ right``."""

    variables: Tuple[Term, ...]
    left: Term
    right: Term

    @staticmethod
    def make(a: Term, b: Term) -> "Equation":
        # larger side first; ties broken by the term order
        if (-a.size, sort_key(a)) > (-b.size, sort_key(b)):
            a, b = b, a
        vs = variables(a)
        seen = set(vs)
        vs += [v for v in variables(b) if v not in seen]
        ren = {v: Var(f"z{i + 1}") for i, v in enumerate(vs)}
        memo: dict = {}
        return Equation(tuple(ren.values()), substitute(a, ren, memo), substitute(b, ren, memo))

    @property
    def is_tautology(self) -> bool:
        return self.left is self.right

    @property
    def mentions_frame(self) -> bool:
        return self.left.has_params or self.right.has_params

    def key(self):
        return (sort_key(self.left), sort_key(self.right))

    def __str__(self) -> str:
        body = f"{show(self.left)} ~ {show(self.right)}"
        if self.variables:
            return "forall " + ",".join(v.name for v in self.variables) + ". " + body
        return body


@dataclass
class AInstance:
    rule_index: int
    dec_index: int
    decomposition: Decomposition
    cores: Tuple[Term, ...]  # fact terms matched by the core pieces
    sigma: dict

    def key(self):
        return (self.rule_index, self.dec_index, self.cores)


@dataclass
class SaturationStats:
    steps: int = 0
    a_instances: int = 0
    b2_facts: int = 0
    registered_subterms: int = 0
    deferred_retries: int = 0


@dataclass
class SaturationResult:
    status: str
    frame: List[Tuple[Term, Term]]
    facts: List[Fact]
    equations: List[Equation]  # equations mentioning the frame
    theory_equations: List[Equation]  # parameter-free, valid in every frame
    stats: SaturationStats
    diagnostic: str = ""
    fact_log: List[Fact] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status == SATURATED

    def recipe_of(self, t: Term) -> Optional[Term]:
        for f in self.facts:
            if f.term is t:
                return f.recipe
        return None


def check_frame(frame: Frame) -> None:
    seen = set()
    for w, t in frame:
        if not w.is_param:
            raise FrameError(f"{show(w)} is not a parameter")
        if w in seen:
            raise FrameError(f"parameter {show(w)} bound twice")
        seen.add(w)
        if not t.ground or t.has_params:
            raise FrameError(f"frame term not ground: {show(t)}")


def frame_binding(frame: Frame) -> Dict[Term, Term]:
    return dict(frame)


def fresh_constants(count: int, prefix: str = "c") -> List[Term]:
    return [const(reserved_constant(f"{prefix}{i + 1}")) for i in range(count)]


def syntactic_deduce(facts: Dict[Term, Term], t: Term,
                     extra: Optional[Dict[Term, Term]] = None) -> Optional[Term]:
    """Recipe building ``t`` from the facts with public symbols only.

    ``facts`` maps terms to recipes.  A direct fact wins at every node; public
    constants and ``extra`` entries (variables standing for themselves) are
    always available.
    """
    memo: Dict[Term, Optional[Term]] = {}
    # explicit stack: only nodes that are neither known nor private get expanded
    stack = [(t, False)]
    while stack:
        u, expanded = stack.pop()
        if u in memo:
            continue
        r = facts.get(u)
        if r is None and extra:
            r = extra.get(u)
        if r is not None or not (u.is_app and u.symbol.public):
            memo[u] = r
        elif not expanded:
            stack.append((u, True))
            stack.extend((a, False) for a in reversed(u.args) if a not in memo)
        else:
            parts = [memo[a] for a in u.args]
            memo[u] = App(u.symbol, parts) if all(p is not None for p in parts) else None
    return memo[t]


class Saturation:
    """Mutable saturation state for one frame.  Not shared between runs."""

    def __init__(self, R: RewriteSystem, frame: Frame, max_steps: int = DEFAULT_MAX_STEPS,
                 trace: Optional[Callable[[dict], None]] = None, check_soundness: bool = False):
        check_frame(frame)
        self.R = R
        self.frame = list(frame)
        self.binding = frame_binding(frame)
        self.max_steps = max_steps
        self.trace = trace
        self.check_soundness = check_soundness
        self.stats = SaturationStats()
        self._inst_memo: dict = {}  # shared by all soundness checks of this run
        self.filler = const(FILLER)

        self.facts: Dict[Term, Term] = {}  # term -> recipe
        self.fact_log: List[Fact] = []
        self.by_head: Dict[object, List[Term]] = {}
        self.equations: Dict[tuple, Equation] = {}

        self.decs: List[Tuple[int, int, Decomposition]] = []
        self.decs_by_core_head: Dict[object, List[Tuple[int, int, Decomposition]]] = {}
        for ri, rule in enumerate(R.rules):
            for di, d in enumerate(enumerate_decompositions(rule)):
                self.decs.append((ri, di, d))
                for head in {c.symbol for c in d.cores}:
                    self.decs_by_core_head.setdefault(head, []).append((ri, di, d))

        # syntactic rules
        self.b_seen: set = set()  # every subterm of a known term visited so far
        self.b_state: Dict[Term, int] = {}  # subterm -> number of unknown children
        self.b_waiting: Dict[Term, List[Term]] = {}
        self.b_ready: Deque[Term] = deque()
        self.b_done: set = set()

        # context-reduction rules
        self.worklist: Deque[AInstance] = deque()
        self.seen_instances: set = set()
        self.y_waiting: Dict[Term, List[AInstance]] = {}
        self.deferred: List[AInstance] = []
        self.processed: set = set()

    # -- knowledge ---------------------------------------------------------

    def carried(self, t: Term) -> Optional[Term]:
        r = self.facts.get(t)
        if r is None and t.is_app and not t.args and t.symbol.public:
            return t  # public constants are always at hand
        return r

    def _emit(self, event: dict):
        if self.trace is not None:
            self.trace(event)

    def _step(self):
        self.stats.steps += 1
        if self.stats.steps > self.max_steps:
            raise Indeterminate(f"step budget of {self.max_steps} exhausted")

    def add_equation(self, a: Term, b: Term, origin: str, count: bool = True) -> bool:
        if a is b:
            return False
        eq = Equation.make(a, b)
        k = (eq.left, eq.right)
        if k in self.equations:
            return False
        if count:
            self._step()
        if self.check_soundness:
            self._assert_equation(eq)
        self.equations[k] = eq
        if self.trace is not None:
            self._emit({"rule": origin, "equation": str(eq)})
        return True

    def add_fact(self, recipe: Term, term: Term, origin: str, count: bool = True):
        assert term not in self.facts
        if count:
            self._step()
        if self.check_soundness:
            self._assert_fact(recipe, term)
        self.facts[term] = recipe
        self.fact_log.append(Fact(recipe, term))
        self.by_head.setdefault(term.symbol, []).append(term)
        if self.trace is not None:
            self._emit({"rule": origin, "fact": str(Fact(recipe, term))})
        if not term.args and term.symbol.public:
            self.b_ready.append(term)
        self._register_subterms(term)
        self._became_known(term)
        self._discover(term)
        if self.deferred:
            self.stats.deferred_retries += len(self.deferred)
            self.worklist.extend(self.deferred)
            self.deferred = []

    # -- soundness checks ---------------------------------------------------

    def _value(self, recipe: Term, ground_vars: dict) -> Term:
        t = instantiate(recipe, self.binding, self._inst_memo)
        t = substitute(t, ground_vars)
        return self.R.normalize(t)

    def _assert_fact(self, recipe: Term, term: Term):
        if not recipe.public:
            raise SoundnessError(f"recipe {show(recipe)} uses a private symbol")
        if self._value(recipe, {}) is not term:
            raise SoundnessError(f"unsound fact {show(recipe)} |> {show(term)}")

    def _assert_equation(self, eq: Equation):
        ground = dict(zip(eq.variables, fresh_constants(len(eq.variables), "z")))
        if self._value(eq.left, ground) is not self._value(eq.right, ground):
            raise SoundnessError(f"unsound equation {eq}")

    # -- B rules -----------------------------------------------------------

    def _register_subterms(self, t: Term):
        stack = [t]
        while stack:
            u = stack.pop()
            if u in self.b_seen:
                continue
            self.b_seen.add(u)
            stack.extend(reversed(u.args))
            if not u.is_app or not u.args or not u.symbol.public:
                continue
            unknown = {a for a in u.args if self.carried(a) is None}
            self.b_state[u] = len(unknown)
            self.stats.registered_subterms += 1
            if unknown:
                for a in unknown:
                    self.b_waiting.setdefault(a, []).append(u)
            else:
                self.b_ready.append(u)

    def _became_known(self, t: Term):
        for parent in self.b_waiting.pop(t, ()):
            self.b_state[parent] -= 1
            if self.b_state[parent] == 0:
                self.b_ready.append(parent)
        for inst in self.y_waiting.pop(t, ()):
            self._offer(inst)

    def apply_b_fixpoint(self):
        while self.b_ready:
            t = self.b_ready.popleft()
            if t in self.b_done:
                continue
            self.b_done.add(t)
            built = App(t.symbol, [self.carried(a) for a in t.args])
            known = self.facts.get(t)
            if known is not None:
                self.add_equation(built, known, "B.1")
            else:
                self.stats.b2_facts += 1
                self.add_fact(built, t, "B.2")

    # -- A rules -----------------------------------------------------------

    def _discover(self, t: Term):
        for ri, di, d in self.decs_by_core_head.get(t.symbol, ()):
            for i, core in enumerate(d.cores):
                if core.symbol != t.symbol:
                    continue
                sigma = match(core, t, {})
                if sigma is None:
                    continue
                assigned: List[Optional[Term]] = [None] * d.n
                assigned[i] = t
                self._extend(ri, di, d, assigned, sigma, 0)

    def _extend(self, ri, di, d: Decomposition, assigned, sigma, j):
        if j == d.n:
            inst = AInstance(ri, di, d, tuple(assigned), sigma)
            if inst.key() in self.seen_instances:
                return
            self.seen_instances.add(inst.key())
            self._offer(inst)
            return
        if assigned[j] is not None:
            self._extend(ri, di, d, assigned, sigma, j + 1)
            return
        core = d.cores[j]
        for cand in list(self.by_head.get(core.symbol, ())):
            ext = match(core, cand, sigma)
            if ext is None:
                continue
            assigned[j] = cand
            self._extend(ri, di, d, assigned, ext, j + 1)
        assigned[j] = None

    def _offer(self, inst: AInstance):
        """Queue the instance once every y-slot is known, else wait for it."""
        for y in inst.decomposition.ys:
            value = inst.sigma[y]
            if self.carried(value) is None:
                self.y_waiting.setdefault(value, []).append(inst)
                return
        self.worklist.append(inst)

    def apply_a_instance(self, inst: AInstance) -> str:
        d = inst.decomposition
        rule = d.rule
        recipes = [self.facts[t] for t in inst.cores]
        recipes += [self.carried(inst.sigma[y]) for y in d.ys]
        if self.trace is not None:
            self._emit({"rule": "A", "rewrite_rule": str(rule),
                        "decomposition": show(d.context),
                        "facts": [str(Fact(m, t)) for m, t in
                                  zip(recipes, list(inst.cores) + [inst.sigma[y] for y in d.ys])]})
        reduct = self.R.normalize(substitute(rule.rhs, inst.sigma))
        own = {z: z for z in d.zs}
        found = syntactic_deduce(self.facts, reduct, own)
        lhs = d.plug(recipes + list(d.zs))
        if found is not None:
            self.add_equation(lhs, found, "A.1")
            outcome = "A.1"
        elif reduct.ground:
            filled = d.plug(recipes + [self.filler] * d.q)
            existing = self.facts.get(reduct)
            if existing is None:
                self.add_fact(filled, reduct, "A.2")
                self.add_equation(lhs, filled, "A.2", count=False)
            else:
                self.add_equation(lhs, existing, "A.2")
            outcome = "A.2"
        else:
            if self.trace is not None:
                self._emit({"rule": "A.3", "deferred": show(reduct)})
            return "A.3"
        self.processed.add(inst.key())
        self.stats.a_instances += 1
        return outcome

    # -- driver ------------------------------------------------------------

    def init(self):
        """Normalize the frame; later duplicates become equations."""
        for w, t in self.frame:
            u = self.R.normalize(t)
            known = self.facts.get(u)
            if known is None:
                self.add_fact(w, u, "init", count=False)
            else:
                self.add_equation(w, known, "init", count=False)
        for ri, di, d in self.decs:
            if d.n == 0:
                self._extend(ri, di, d, [], {}, 0)

    def run(self) -> SaturationResult:
        status, diagnostic = SATURATED, ""
        try:
            self.init()
            while True:
                self.apply_b_fixpoint()
                if not self.worklist:
                    break
                inst = self.worklist.popleft()
                if inst.key() in self.processed:
                    continue
                if self.apply_a_instance(inst) == "A.3":
                    self.deferred.append(inst)
            if self.deferred:
                status = FAILED
                diagnostic = "no rule applies except A.3 on " + describe_instance(
                    self.deferred[0], self.facts)
        except Indeterminate as exc:
            status, diagnostic = INDETERMINATE, str(exc)
        return self.result(status, diagnostic)

    def result(self, status: str, diagnostic: str = "") -> SaturationResult:
        facts = sorted((Fact(r, t) for t, r in self.facts.items()),
                       key=lambda f: sort_key(f.recipe))
        eqs = sorted(self.equations.values(), key=Equation.key)
        return SaturationResult(
            status=status, frame=self.frame, facts=facts,
            equations=[e for e in eqs if e.mentions_frame],
            theory_equations=[e for e in eqs if not e.mentions_frame],
            stats=self.stats, diagnostic=diagnostic, fact_log=list(self.fact_log))


def describe_instance(inst: AInstance, facts: Dict[Term, Term]) -> str:
    d = inst.decomposition
    used = [f"{show(facts[t])} |> {show(t)}" for t in inst.cores]
    reduct = substitute(d.rule.rhs, inst.sigma)
    return (f"rule {d.rule} with decomposition {show(d.context)}"
            + (f" on facts {', '.join(used)}" if used else "")
            + f": reduct {show(reduct)} is neither deducible nor ground")


def saturate(R: RewriteSystem, frame: Frame, max_steps: int = DEFAULT_MAX_STEPS,
             trace: Optional[Callable[[dict], None]] = None,
             check_soundness: bool = False) -> SaturationResult:
    return Saturation(R, frame, max_steps, trace, check_soundness).run()


def init_state(R: RewriteSystem, frame: Frame) -> Tuple[List[Fact], List[Equation]]:
    """The state produced by normalizing the frame, before any rule fires."""
    s = Saturation(R, frame)
    for w, t in s.frame:
        u = R.normalize(t)
        known = s.facts.get(u)
        if known is None:
            s.facts[u] = w
        else:
            eq = Equation.make(w, known)
            s.equations[(eq.left, eq.right)] = eq
    res = s.result(SATURATED)
    return res.facts, res.equations


def ctx(facts: Dict[Term, Term], t: Term, R: RewriteSystem,
        own: Iterable[Term] = ()) -> Optional[Term]:
    """Recipe for the normal form of ``t``, with ``own`` variables standing for themselves."""
    return syntactic_deduce(facts, R.normalize(t), {v: v for v in own})
