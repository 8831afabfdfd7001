import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from itlnl import automata as au
from itlnl import parse
from itlnl import syntax as S
from itlnl.automata import Nba
from itlnl.compile import itl_to_dfa
from itlnl.generators import random_separated_formula, rng_from
from itlnl.omega import (ImplicationInvalid, NotImplicitlyDefined, beth_define, check_valid,
                         decide_separated, exists_elim, exists_elim_introspective, fin_formula,
                         finitely_many_prefixes, interpolate, reactivity_normal_form,
                         strongest_consequence)
from itlnl.semantics import LassoEvaluator, Window, enumerate_lassos, eval_context, letter_code
from oracles import context_difference, context_mismatch, lasso_codes, naive_holds, words
from strategies import dfas, introspective, nbas

V = ("p",)
VQ = ("p", "q")
LASSOS = list(enumerate_lassos(V, 3, 3))


def equiv(a, b, vocab=VQ) -> bool:
    return au.dfa_equivalent(itl_to_dfa(a, vocab), itl_to_dfa(b, vocab))


def naive_finitely_many(X, L) -> bool:
    """Prefix lengths past the preperiod of (state, loop position) cover a
    full period; finitely many iff none of them is accepted."""
    u, v = lasso_codes(L, X.vocab)
    T = len(u) + X.n_states * len(v)
    word = u + v * (X.n_states + X.n_states + 2)
    q = X.initial
    hits = []
    for n, a in enumerate(word[:T + X.n_states * len(v)], start=1):
        q = int(X.delta[q, a])
        if n > T:
            hits.append(bool(X.accepting[q]))
    return not any(hits)


# ------------------------------------------------------------ Fin

def test_fin_of_empty_language_is_true():
    F = fin_formula(au.dfa_const(V, False))
    ev = LassoEvaluator(F, V)
    assert all(ev(L) for L in LASSOS)


def test_fin_of_all_words_is_false():
    F = fin_formula(au.dfa_const(V, True))
    ev = LassoEvaluator(F, V)
    assert not any(ev(L) for L in LASSOS)


def test_fin_of_first_letter_p_is_not_p():
    X = au.dfa_first_letter(V, lambda c: c & 1)
    ev = LassoEvaluator(fin_formula(X), V)
    for L in LASSOS:
        first = (L.stem + L.loop)[0]
        assert ev(L) == ("p" not in first)


@given(dfas(VQ, 3))
def test_loop_analysis_matches_naive_count(X):
    for L in enumerate_lassos(VQ, 2, 2):
        assert finitely_many_prefixes(X, L) == naive_finitely_many(X, L)


@settings(max_examples=30)
@given(dfas(V, 3), st.sampled_from(["future", "past"]))
def test_fin_soundness(X, direction):
    F = fin_formula(X, direction)
    assert S.classify(F) in ("future", "introspective", "state", "past")
    if direction == "future":
        ev = LassoEvaluator(F, V)
        for L in LASSOS:
            assert ev(L) == finitely_many_prefixes(X, L)
    else:
        # read leftwards: the mirror formula of the reversed language
        ev = LassoEvaluator(S.time_reverse(F), V)
        for L in LASSOS:
            assert ev(L) == finitely_many_prefixes(X, L)


# ------------------------------------------------------------ reactivity

INF_P = Nba(V, [[1, 2], [1, 2]], 1, 2)


def test_reactivity_infinitely_many_p():
    ev = LassoEvaluator(reactivity_normal_form(INF_P).formula(), V)
    for L in LASSOS:
        assert ev(L) == au.nba_lasso_accepts(INF_P, *lasso_codes(L, V))
    assert ev(parse_lasso("", "{p}"))
    assert not ev(parse_lasso("{p}", "{}"))


def parse_lasso(stem, loop):
    from itlnl.formats import parse_lasso as pl
    return pl(f"stem: {stem}\nloop: {loop}")


def test_reactivity_trivial_languages():
    assert reactivity_normal_form(au.nba_universal(V)).formula() == S.TRUE_F
    f = reactivity_normal_form(au.nba_empty(V)).formula()
    ev = LassoEvaluator(f, V)
    assert not any(ev(L) for L in LASSOS)


@settings(max_examples=30)
@given(nbas(V, 3))
def test_reactivity_soundness(n):
    R = reactivity_normal_form(n)
    F = R.formula()
    ev = LassoEvaluator(F, V)
    for L in LASSOS:
        assert ev(L) == au.nba_lasso_accepts(n, *lasso_codes(L, V))


# ------------------------------------------------------------ quantifier elimination

def test_exists_introspective_examples():
    assert equiv(exists_elim_introspective("p", parse("p")), S.TRUE_F)
    assert equiv(exists_elim_introspective("p", parse("p & next ~p")), parse("next true"))
    assert exists_elim_introspective("p", parse("q")) == parse("q")


@settings(max_examples=40)
@given(introspective())
def test_exists_introspective_is_relabel_closure(A):
    R = exists_elim_introspective("p", A, VQ)
    assert "p" not in S.free_vars(R)
    closure = au.determinize_minimize(au.relabel_dont_care(itl_to_dfa(A, VQ), "p"))
    assert au.dfa_equivalent(itl_to_dfa(R, VQ), closure)
    E = S.Exists("p", A)
    for w in words(("q",), 4):
        n = len(w)
        assert naive_holds(w, 0, n - 1, E) == naive_holds(w, 0, n - 1, R)


def test_exists_of_absent_variable_is_identity():
    A = parse("<r>(skip ; q)")
    assert exists_elim("p", A) == A


@pytest.mark.parametrize("seed", range(4))
def test_exists_separated_against_brute_force(seed):
    rng = rng_from(seed)
    A = random_separated_formula(rng, VQ, n_future=1 + seed % 2, n_past=seed % 2, intro_depth=2)
    R = exists_elim("p", A, VQ)
    assert "p" not in S.free_vars(R)
    assert S.EXISTS not in S.kinds(R)
    assert context_mismatch(("p",), A, R, VQ, max_len=4, context=3) is None


def test_exists_pipeline_symmetry():
    A = parse("q & <r>(skip ; (p & <r>(skip ; ~p & q)))")
    fwd = exists_elim("p", A, VQ)
    back = exists_elim("p", S.time_reverse(A), VQ)
    assert context_difference(back, S.time_reverse(fwd), ("q",), max_len=3, context=3) is None


def test_exists_idempotent():
    A = parse("q & <r>(skip ; (p & <r>(skip ; q)))")
    once = exists_elim("p", A, VQ)
    assert exists_elim("p", once, VQ) == once
    B = parse("box (p -> q) & dia p")
    r = exists_elim("p", B, VQ)
    assert equiv(exists_elim("p", r, VQ), r)


# ------------------------------------------------------------ consequences and interpolants

def test_strongest_consequence_examples():
    assert equiv(strongest_consequence(parse("p & q"), {"p"}), parse("q"))
    assert equiv(strongest_consequence(parse("box p & box (p -> q)"), {"p"}), parse("box q"))
    A = parse("p & q")
    assert strongest_consequence(A, set()) == A


def test_interpolation_examples():
    qr = ("q", "r")
    ip = interpolate(parse("p & q"), parse("q | r"))
    assert ip.exact and equiv(ip.formula, parse("q"), qr)
    ip = interpolate(parse("box p & box (p -> q)"), parse("box q | r"))
    assert ip.exact and equiv(ip.formula, parse("box q"), qr)
    with pytest.raises(ImplicationInvalid) as e:
        interpolate(parse("p"), parse("q"))
    assert e.value.witness == Window((frozenset({"p"}),), 0, 0)


def test_separated_interpolant():
    A = parse("q & <r>(skip ; (p & <r>(p & r)))")
    B = parse("<r>(skip ; <r> r) | s")
    ip = interpolate(A, B)
    assert ip.exact
    assert S.free_vars(ip.formula) <= S.free_vars(A) & S.free_vars(B)
    assert check_valid(S.Imp(A, ip.formula)).valid
    assert check_valid(S.Imp(ip.formula, B)).valid


def test_beth_examples():
    assert equiv(beth_define(parse("p <-> q"), "p").formula, parse("q"), ("q",))
    d = beth_define(parse("p <-> (q ; r)"), "p")
    assert "p" not in S.free_vars(d.formula)
    assert equiv(d.formula, parse("q ; r"), ("q", "r"))
    with pytest.raises(NotImplicitlyDefined) as e:
        beth_define(parse("p | q"), "p")
    first, second = e.value.first, e.value.second
    assert ("p" in first.states[first.i]) != ("p" in second.states[second.i])


def test_beth_separated():
    d = beth_define(parse("p <-> <r>(skip ; q)"), "p")
    assert d.exact and d.formula == parse("<r>(skip ; q)")


# ------------------------------------------------------------ decision procedure

def test_decide_examples():
    assert not decide_separated("sat", parse("p & ~p")).value
    assert decide_separated("valid", parse("dia p | box ~p")).value
    assert not decide_separated("sat", parse("empty & skip")).value


def test_decide_witnesses_are_genuine():
    A = parse("q & <r>(skip ; p) & ~<l>(p ; skip)")
    d = decide_separated("sat", A)
    assert d.value and eval_context(d.witness, A)
    B = parse("<r>(skip ; p) -> <r>(skip ; skip ; p)")
    v = decide_separated("valid", B)
    assert not v.value and not eval_context(v.witness, B)


def test_check_valid_falls_back_to_windows():
    rep = check_valid(parse("dia_a p -> dia_a (p | q)"))
    assert rep.valid and not rep.exact
