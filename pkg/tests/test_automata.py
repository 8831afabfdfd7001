import numpy as np
from hypothesis import given

from itlnl import automata as au
from itlnl import parse
from itlnl.automata import Dfa, Nba, Nfa
from itlnl.semantics import all_words, enumerate_lassos, letter_code, tables_for_length
from strategies import dfas, nbas

V = ("p",)
FIRST_P = au.dfa_first_letter(V, lambda c: c & 1)
SOME_P = Dfa(V, [[0, 1], [1, 1]], 0, [1])
ENDS_P = Dfa(V, [[0, 1], [0, 1]], 0, [1])
STARTS_P_LEN2 = Dfa(V, [[3, 1], [2, 2], [3, 3], [3, 3]], 0, [2])

INF_P = Nba(V, [[1, 2], [1, 2]], 1, 2)
FIN_P = Nba(V, [[3, 1], [2, 0]], 1, 2)
EMPTY = au.nba_empty(V)


def codes(L, vocab=V):
    return [letter_code(s, vocab) for s in L.stem], [letter_code(s, vocab) for s in L.loop]


def test_first_letter_nfa_determinizes_to_three_states():
    n = Nfa(V, [[0, 2], [2, 2], [2, 2]], 1, 2 | 4)
    d = au.determinize_minimize(n)
    assert d.n_states == 3
    assert au.dfa_equivalent(d, FIRST_P)


def test_empty_nfa():
    d = au.determinize_minimize(Nfa(V, [[0, 0]], 1, 0))
    assert d.n_states == 1 and au.is_empty(d)


def test_determinize_minimize_is_idempotent():
    n = au.fusion_concat(ENDS_P, STARTS_P_LEN2)
    d = au.determinize_minimize(n)
    dd = au.determinize_minimize(au.dfa_to_nfa(d))
    assert d.n_states == dd.n_states and au.dfa_equivalent(d, dd)


def test_boolean_operations():
    assert au.dfa_equivalent(au.complement(au.complement(SOME_P)), SOME_P)
    assert au.is_empty(au.intersection(SOME_P, au.complement(SOME_P)))
    assert au.is_universal(au.union(FIRST_P, au.complement(FIRST_P)))
    assert au.dfa_equivalent(au.combine("difference", SOME_P, FIRST_P),
                             au.intersection(SOME_P, au.complement(FIRST_P)))
    assert au.dfa_equivalent(SOME_P, au.minimize(SOME_P))


def test_counterexample_word():
    assert au.dfa_counterexample(FIRST_P, SOME_P) == [0, 1]
    assert au.dfa_counterexample(au.dfa_const(V, False), au.dfa_const(V, False)) is None


def test_fusion():
    f = au.fusion_concat(ENDS_P, STARTS_P_LEN2)
    assert f.accepts([1, 1])
    assert not f.accepts([0, 1])


@given(dfas(("p", "q")))
def test_fusion_star_accepts_single_letters(d):
    s = au.fusion_star(d)
    assert all(s.accepts([c]) for c in range(4))


@given(dfas(("p", "q"), 3))
def test_fusion_with_everything_is_di(d):
    vocab = d.vocab
    A = au.determinize_minimize(au.fusion_concat(d, au.dfa_const(vocab, True)))
    from itlnl.compile import dfa_to_formula
    F = parse("(" + str(dfa_to_formula(d)) + ") ; true")
    for n in range(1, 5):
        words = all_words(4, n)
        assert np.array_equal(A.accepts_batch(words), tables_for_length(F, vocab, n)[:, 0, n - 1])


def test_prefix_dfa_of_successor():
    q = int(FIRST_P.delta[FIRST_P.initial, 1])
    pre = au.prefix_dfa(FIRST_P, q)
    assert au.dfa_equivalent(pre, FIRST_P)


def test_prefix_dfa_of_unreachable_state_is_empty():
    d = Dfa(V, [[0, 0], [1, 1]], 0, [0])
    assert au.is_empty(au.prefix_dfa(d, 1))


@given(dfas(("p", "q")))
def test_prefix_languages_partition_all_words(d):
    parts = [au.prefix_dfa(d, q) for q in range(d.n_states)]
    for a in range(len(parts)):
        for b in range(a + 1, len(parts)):
            assert au.is_empty(au.intersection(parts[a], parts[b]))
    acc = parts[0]
    for x in parts[1:]:
        acc = au.union(acc, x)
    assert au.is_universal(acc)


def test_relabel_dont_care():
    closed = au.determinize_minimize(au.relabel_dont_care(FIRST_P, "p"))
    assert au.is_universal(closed)
    d = au.dfa_first_letter(("p", "q"), lambda c: c & 2)
    once = au.determinize_minimize(au.relabel_dont_care(d, "p"))
    assert au.dfa_equivalent(once, d)
    twice = au.determinize_minimize(au.relabel_dont_care(once, "p"))
    assert au.dfa_equivalent(once, twice)


def lasso_agreement(n, d):
    comp, as_nba = au.dpa_complement_nba(d)
    for L in enumerate_lassos(n.vocab, 3, 3):
        u, v = codes(L, n.vocab)
        a = au.nba_lasso_accepts(n, u, v)
        assert au.dpa_lasso_accepts(d, u, v) == a
        assert au.nba_lasso_accepts(as_nba, u, v) == a
        assert au.dpa_lasso_accepts(comp, u, v) != a


def test_determinize_infinitely_many_p():
    lasso_agreement(INF_P, au.nba_determinize(INF_P))


def test_determinize_finitely_many_p():
    d = au.nba_determinize(FIN_P)
    assert au.dpa_lasso_accepts(d, [1], [0])
    assert not au.dpa_lasso_accepts(d, [], [1])
    lasso_agreement(FIN_P, d)


def test_determinize_empty():
    d = au.nba_determinize(EMPTY)
    assert not any(au.dpa_lasso_accepts(d, *codes(L)) for L in enumerate_lassos(V, 2, 2))


def test_complement_twice_and_disjointness():
    d = au.nba_determinize(FIN_P)
    cc = au.dpa_complement(au.dpa_complement(d))
    for L in enumerate_lassos(V, 3, 3):
        assert au.dpa_lasso_accepts(cc, *codes(L)) == au.dpa_lasso_accepts(d, *codes(L))
    comp = au.dpa_to_nba(au.dpa_complement(d))
    assert au.nba_is_empty(au.nba_intersection(FIN_P, comp))


def test_nba_check():
    empty, witness = au.nba_check(INF_P, "emptiness")
    assert not empty
    u, v = witness
    assert au.nba_lasso_accepts(INF_P, u, v)
    assert witness == ([], [1])
    assert not au.nba_check(INF_P, "lasso", ([], [0]))
    assert au.nba_check(EMPTY, "emptiness") == (True, None)


@given(nbas(("p", "q"), 3))
def test_determinization_soundness(n):
    d = au.nba_determinize(n)
    lasso_agreement(n, d)
    comp = au.dpa_to_nba(au.dpa_complement(d))
    assert au.nba_is_empty(au.nba_intersection(n, comp))


def test_priority_normalization_keeps_cycle_minima():
    rng = np.random.default_rng(3)
    for _ in range(50):
        n = int(rng.integers(1, 7))
        delta = rng.integers(0, n, size=(n, 2))
        prio = rng.integers(0, 5, size=n)
        d = au.Dpa(V, delta, 0, prio)
        r = au.dpa_reduce(d)
        for L in enumerate_lassos(V, 3, 3):
            assert au.dpa_lasso_accepts(d, *codes(L)) == au.dpa_lasso_accepts(r, *codes(L))


def test_guard():
    import pytest
    # a guessed chain into a {}-loop: nothing to trim, nondeterministic at 0
    k = 6
    succ = [[1 | 2, 1 | 2]] + [[1 << (x + 1)] * 2 for x in range(1, k)] + [[1 << k, 0]]
    n = Nba(V, succ, 1, 1 << k)
    assert n.n_states == k + 1
    with pytest.raises(au.GuardExceeded):
        au.nba_determinize(n, guard=4)
    assert au.nba_determinize(au.nba_universal(V)).n_states == 1
