import pytest

from knowsat.oracle import RecipeBudget, oracle_deducible, oracle_distinguish, oracle_values
from knowsat.terms import Param, show

from conftest import term


def syms(th):
    return list(th.symbols.values())


def test_finds_constant(enc):
    r = oracle_deducible(enc.rules, enc.frames["phi0"], term(enc, "c0"), syms(enc))
    assert r.found is term(enc, "c0") and r.depth_reached == 0


def test_finds_decryption(enc):
    r = oracle_deducible(enc.rules, enc.frames["phi0"], term(enc, "<c0,k>"), syms(enc))
    assert r and show(r.found) == "<c0,w2>"


def test_secret_not_found(enc):
    r = oracle_deducible(enc.rules, enc.frames["secret"], term(enc, "s"), syms(enc),
                         RecipeBudget(depth=4, cap=20_000))
    assert r.found is None and r.explored > 0


def test_empty_frame_private_constant(enc):
    r = oracle_deducible(enc.rules, [], term(enc, "k"), syms(enc), RecipeBudget(depth=2))
    assert r.found is None and not r.inconclusive


def test_distinguishes_example_frames(enc):
    r = oracle_distinguish(enc.rules, enc.frames["phi0"], enc.frames["phi1"], syms(enc))
    assert r.found is not None
    a, b = r.found
    assert {show(a), show(b)} in ({"enc(c0,w2)", "w1"}, {"c0", "dec(w1,w2)"})


def test_first_test_in_enumeration_order(enc):
    r = oracle_distinguish(enc.rules, enc.frames["phi0"], enc.frames["phi1"], syms(enc))
    assert (show(r.found[0]), show(r.found[1])) == ("c0", "dec(w1,w2)")


def test_reflexive_pair_is_never_distinguished(enc):
    r = oracle_distinguish(enc.rules, enc.frames["phi0"], enc.frames["phi0"], syms(enc))
    assert r.found is None


def test_secret_key_frames_not_distinguished(enc):
    r = oracle_distinguish(enc.rules, enc.frames["psi0"], enc.frames["psi1"], syms(enc),
                           RecipeBudget(depth=4, cap=30_000))
    assert r.found is None


def test_cap_reports_inconclusive(enc):
    r = oracle_deducible(enc.rules, enc.frames["secret"], term(enc, "s"), syms(enc),
                         RecipeBudget(depth=5, cap=100))
    assert r.found is None and r.inconclusive


def test_values_are_deduplicated(enc):
    values, _ = oracle_values(enc.rules, enc.frames["phi0"], syms(enc), RecipeBudget(depth=1))
    assert values[term(enc, "c0")] is term(enc, "c0")
    assert values[term(enc, "k")] is Param("w2")


def test_domain_mismatch(enc):
    with pytest.raises(ValueError):
        oracle_distinguish(enc.rules, enc.frames["phi0"], enc.frames["psi0"], syms(enc))


def test_budget_validation():
    with pytest.raises(ValueError):
        RecipeBudget(depth=-1)
