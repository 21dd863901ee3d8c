"""Property tests over randomly generated terms and frames."""
from hypothesis import HealthCheck, assume, given, settings, strategies as st

from knowsat.bounds import fact_count_violations, st_ext_violations, subterm_violations
from knowsat.decide import EQUIVALENT, INEQUIVALENT, evaluate, statically_equivalent
from knowsat.saturate import SATURATED, saturate
from knowsat.terms import (App, Param, Var, compare, match, positions, replace_at, sort_key,
                           substitute, subterm_at, variables)

from conftest import theory

ENC = theory("e_enc_ex34")
PREF = theory("e_pref")
BLIND = theory("e_blind")
R = ENC.rules

CONSTS = [ENC.symbols[n] for n in ("c0", "c1", "k", "s")]
FUNCS = [ENC.symbols[n] for n in ("enc", "dec", "pair", "proj1", "proj2")]
VARS = [Var("x"), Var("y"), Var("z")]

settings.register_profile("default", deadline=None, max_examples=150,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def terms(leaves, max_leaves=12):
    def extend(children):
        return st.one_of([st.tuples(*[children] * f.arity).map(lambda a, f=f: App(f, a))
                          for f in FUNCS])
    return st.recursive(leaves, extend, max_leaves=max_leaves)


ground = terms(st.sampled_from([App(c, []) for c in CONSTS]))
open_terms = terms(st.sampled_from([App(c, []) for c in CONSTS] + VARS))
substitutions = st.fixed_dictionaries({v: ground for v in VARS})


@given(open_terms, substitutions)
def test_substitution_idempotent_on_ground_images(t, sigma):
    once = substitute(t, sigma)
    assert substitute(once, sigma) is once


@given(open_terms, substitutions)
def test_match_recovers_substitution(p, sigma):
    got = match(p, substitute(p, sigma))
    assert got == {v: sigma[v] for v in variables(p)}


@given(open_terms, st.data())
def test_replace_with_own_subterm_is_identity(t, data):
    ps = [p for p, _ in positions(t)]
    p = data.draw(st.sampled_from(ps))
    assert replace_at(t, p, subterm_at(t, p)) is t


@given(open_terms, open_terms, open_terms)
def test_order_is_total_and_transitive(a, b, c):
    assert (compare(a, b) == 0) == (a is b)
    assert compare(a, b) == -compare(b, a)
    if compare(a, b) < 0 and compare(b, c) < 0:
        assert compare(a, c) < 0
    assert (sort_key(a) == sort_key(b)) == (a is b)


@given(open_terms)
def test_normalize_idempotent_and_irreducible(t):
    n = R.normalize(t)
    assert R.normalize(n) is n
    assert R.reduce_once(n) is None


def frames(th, consts, funcs, max_facts=3):
    leaves = st.sampled_from([App(c, []) for c in consts])

    def extend(children):
        return st.one_of([st.tuples(*[children] * f.arity).map(lambda a, f=f: App(f, a))
                          for f in funcs])
    t = st.recursive(leaves, extend, max_leaves=6)
    return st.lists(t, min_size=1, max_size=max_facts).map(
        lambda ts: [(Param(f"w{i + 1}"), u) for i, u in enumerate(ts)])


enc_frames = frames(ENC, CONSTS, FUNCS)
PREF_FUNCS = FUNCS + [PREF.symbols["pref"]]
pref_frames = frames(PREF, [PREF.symbols[n] for n in ("c0", "c1", "k", "s")],
                     [PREF.symbols[s.name] for s in PREF_FUNCS])
blind_frames = frames(BLIND, [BLIND.symbols[n] for n in ("ok", "m", "r", "sk")],
                      [s for s in BLIND.symbols.values() if s.arity > 0])


@given(enc_frames)
def test_saturation_is_sound_and_bounded(frame):
    r = saturate(R, frame, check_soundness=True)
    assert r.status == SATURATED
    assert fact_count_violations(r) == []
    assert subterm_violations(r, R) == []


@given(pref_frames)
def test_prefix_stays_in_extended_subterms(frame):
    r = saturate(PREF.rules, frame, check_soundness=True)
    assert r.status == SATURATED
    assert fact_count_violations(r) == []
    assert st_ext_violations(r, PREF.rules, closed=True) == []


@given(blind_frames)
def test_blind_saturates_soundly(frame):
    r = saturate(BLIND.rules, frame, check_soundness=True)
    assert r.status == SATURATED and fact_count_violations(r) == []


@given(st.data())
def test_equivalence_symmetric_with_valid_witness(data):
    f1 = data.draw(enc_frames)
    f2 = data.draw(frames(ENC, CONSTS, FUNCS, len(f1)).filter(lambda f: len(f) == len(f1)))
    ab = statically_equivalent(R, f1, f2)
    ba = statically_equivalent(R, f2, f1)
    assert ab.answer == ba.answer and ab.answer in (EQUIVALENT, INEQUIVALENT)
    if ab.witness is not None:
        w = ab.witness
        own, other = (f1, f2)[w.side], (f1, f2)[1 - w.side]
        assert evaluate(w.left, own, R) is evaluate(w.right, own, R)
        assert evaluate(w.left, other, R) is not evaluate(w.right, other, R)


@given(enc_frames)
def test_frame_is_equivalent_to_itself(frame):
    assume(frame)
    assert statically_equivalent(R, frame, frame).answer == EQUIVALENT
