import numpy as np
import pytest
from hypothesis import given, settings

from itlnl import automata as au
from itlnl import parse
from itlnl import syntax as S
from itlnl.compile import (NotFutureFormula, NotIntrospective, dfa_to_formula, future_to_nba,
                           itl_to_dfa, letters_of)
from itlnl.semantics import all_words, enumerate_lassos, eval_lasso, tables_for_length
from oracles import lasso_codes
from strategies import dfas, future_formulas, introspective

V = ("p",)


def test_variable_compiles_to_three_states():
    d = itl_to_dfa(parse("p"), V)
    assert d.n_states == 3
    assert d.accepts([1]) and d.accepts([1, 0, 0]) and not d.accepts([0, 1])


def test_empty_accepts_exactly_single_letters():
    d = itl_to_dfa(parse("empty"), V)
    assert d.accepts([0]) and d.accepts([1])
    assert not d.accepts([0, 0]) and not d.accepts([1, 1, 1])


def test_letters_of():
    assert letters_of(parse("p | q"), ("p", "q")) == frozenset({1, 2, 3})
    assert letters_of(parse("p & ~p"), V) == frozenset()


def test_rejects_non_introspective():
    with pytest.raises(NotIntrospective):
        itl_to_dfa(parse("<r> p"), V)


def test_vocabulary_mismatch():
    with pytest.raises(au.VocabularyMismatch):
        itl_to_dfa(parse("q"), V)


def agrees_on_windows(A, vocab, max_len=4):
    d = itl_to_dfa(A, vocab)
    m = 2 ** len(vocab)
    for n in range(1, max_len + 1):
        words = all_words(m, n)
        want = tables_for_length(A, vocab, n)[:, 0, n - 1]
        assert np.array_equal(d.accepts_batch(words), want), S.render(A)


@given(introspective())
def test_compiled_dfa_matches_window_semantics(A):
    agrees_on_windows(A, ("p", "q"))


def test_compile_projection():
    agrees_on_windows(parse("p proj (skip ; skip)"), ("p", "q"))
    agrees_on_windows(parse("(p | q) proj box p"), ("p", "q"))


@given(dfas(("p", "q")))
def test_dfa_formula_round_trip(d):
    F = dfa_to_formula(d)
    assert S.classify(F) in ("state", "introspective")
    assert au.dfa_equivalent(itl_to_dfa(F, d.vocab), d)


def test_round_trip_of_trivial_languages():
    for val in (True, False):
        d = au.dfa_const(V, val)
        assert au.dfa_equivalent(itl_to_dfa(dfa_to_formula(d), V), d)


@pytest.mark.parametrize("text", [
    "true",
    "<r>(box p & ~empty)",
    "~<r>(skip ; p)",
    "<r>(skip ; <r>(skip ; p))",
    "[r](dia p)",
    "<r>(p ; <r>(skip ; ~p))",
    "p & ~<r>(skip ; box ~p)",
])
def test_future_nba_matches_lasso_semantics(text):
    F = parse(text)
    n = future_to_nba(F, V)
    for L in enumerate_lassos(V, 3, 3):
        assert au.nba_lasso_accepts(n, *lasso_codes(L, V)) == eval_lasso(L, F, V), L


@settings(max_examples=25)
@given(future_formulas())
def test_future_nba_property(F):
    vocab = ("p", "q")
    n = future_to_nba(F, vocab)
    for L in enumerate_lassos(vocab, 2, 2):
        assert au.nba_lasso_accepts(n, *lasso_codes(L, vocab)) == eval_lasso(L, F, vocab)


def test_rejects_past_formula():
    with pytest.raises(NotFutureFormula):
        future_to_nba(parse("<l> p"), V)
