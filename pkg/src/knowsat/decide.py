from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

from .rewriting import RewriteSystem
from .saturate import (DEFAULT_MAX_STEPS, FAILED, INDETERMINATE, SATURATED, Equation, Frame,
                       FrameError, SaturationResult, fresh_constants, saturate, syntactic_deduce)
from .terms import Term, instantiate, show, substitute

YES, NO = "yes", "no"
EQUIVALENT, INEQUIVALENT = "equivalent", "inequivalent"


@dataclass
class DeductionVerdict:
    answer: str  # yes | no | failed | indeterminate
    recipe: Optional[Term]
    target: Term
    saturation: SaturationResult


@dataclass
class Witness:
    equation: Equation
    side: int  # index (0 or 1) of the frame whose saturation produced the equation
    left: Term  # ground instance of the equation
    right: Term

    def __str__(self) -> str:
        return f"{show(self.left)} ~ {show(self.right)}"


@dataclass
class EquivalenceVerdict:
    answer: str  # equivalent | inequivalent | failed | indeterminate
    witness: Optional[Witness]
    saturations: Tuple[SaturationResult, SaturationResult]
    diagnostic: str = ""


def evaluate(recipe: Term, frame: Frame, R: RewriteSystem) -> Term:
    return R.normalize(instantiate(recipe, dict(frame)))


def check_equation_on_frame(eq: Equation, frame: Frame, R: RewriteSystem) -> bool:
    binding = dict(frame)
    memo: dict = {}
    left = R.normalize(instantiate(eq.left, binding, memo))
    right = R.normalize(instantiate(eq.right, binding, memo))
    return left is right


def deducible(R: RewriteSystem, frame: Frame, t: Term, max_steps: int = DEFAULT_MAX_STEPS,
              check_soundness: bool = False,
              saturation: Optional[SaturationResult] = None) -> DeductionVerdict:
    """Decide frame |- t.  A saturation of the same frame may be passed in to
    answer many queries from one run."""
    if not t.ground or t.has_params:
        raise FrameError(f"query term must be ground: {show(t)}")
    sat = saturation or saturate(R, frame, max_steps, check_soundness=check_soundness)
    target = R.normalize(t)
    if sat.status != SATURATED:
        return DeductionVerdict(sat.status, None, target, sat)
    facts = {f.term: f.recipe for f in sat.facts}
    recipe = syntactic_deduce(facts, target)
    if recipe is None:
        return DeductionVerdict(NO, None, target, sat)
    if evaluate(recipe, frame, R) is not target:
        raise AssertionError(f"deduction witness {show(recipe)} does not compute {show(target)}")
    return DeductionVerdict(YES, recipe, target, sat)


def _ground(eq: Equation) -> Tuple[Term, Term]:
    # distinct fresh constants keep the instance distinguishing
    sub = dict(zip(eq.variables, fresh_constants(len(eq.variables), "a")))
    return substitute(eq.left, sub), substitute(eq.right, sub)


def statically_equivalent(R: RewriteSystem, frame1: Frame, frame2: Frame,
                          max_steps: int = DEFAULT_MAX_STEPS,
                          check_soundness: bool = False) -> EquivalenceVerdict:
    dom1 = sorted(w.name for w, _ in frame1)
    dom2 = sorted(w.name for w, _ in frame2)
    if dom1 != dom2:
        raise FrameError("frames have different domains")
    sats = (saturate(R, frame1, max_steps, check_soundness=check_soundness),
            saturate(R, frame2, max_steps, check_soundness=check_soundness))
    for status in (FAILED, INDETERMINATE):
        for s in sats:
            if s.status == status:
                return EquivalenceVerdict(status, None, sats, s.diagnostic)
    frames = (frame1, frame2)
    for side in (0, 1):
        other = frames[1 - side]
        sat = sats[side]
        for eq in sat.equations + sat.theory_equations:
            if check_equation_on_frame(eq, other, R):
                continue
            left, right = _ground(eq)
            own = frames[side]
            if evaluate(left, own, R) is not evaluate(right, own, R) or \
                    evaluate(left, other, R) is evaluate(right, other, R):
                raise AssertionError(f"invalid witness {eq}")
            return EquivalenceVerdict(INEQUIVALENT, Witness(eq, side, left, right), sats)
    return EquivalenceVerdict(EQUIVALENT, None, sats)
