import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from itlnl import automata as au
from itlnl import normal_forms as nf
from itlnl import parse
from itlnl import syntax as S
from itlnl.compile import itl_to_dfa, letters_of
from strategies import introspective, state_formulas

V = ("p",)
VQ = ("p", "q")


def equiv(a, b, vocab=VQ) -> bool:
    return au.dfa_equivalent(itl_to_dfa(a, vocab), itl_to_dfa(b, vocab))


def assert_full_system(formulas, vocab):
    ds = [itl_to_dfa(f, vocab) for f in formulas]
    for a in range(len(ds)):
        for b in range(a + 1, len(ds)):
            assert au.is_empty(au.intersection(ds[a], ds[b]))
    acc = au.dfa_const(vocab, False)
    for d in ds:
        acc = au.union(acc, d)
    assert au.is_universal(acc)


def assert_letter_partition(guards, vocab):
    seen = set()
    for g in guards:
        ls = letters_of(g, vocab)
        assert not ls & seen
        seen |= ls
    assert seen == set(range(2 ** len(vocab)))


# ------------------------------------------------------------ guarded forms

def test_gnf_of_next():
    g = nf.gnf(parse("next p"), "future", V)
    assert g.empty_part == S.FALSE_F or letters_of(g.empty_part, V) == frozenset()
    assert len(g.branches) == 1
    guard, cont = g.branches[0]
    assert letters_of(guard, V) == {0, 1}
    assert equiv(cont, parse("p"), V)


def test_gnf_of_variable():
    g = nf.gnf(parse("p"), "future", V)
    assert letters_of(g.empty_part, V) == {1}
    got = {frozenset(letters_of(guard, V)): cont for guard, cont in g.branches}
    assert equiv(got[frozenset({1})], S.TRUE_F, V)
    assert equiv(got[frozenset({0})], S.FALSE_F, V)


def test_past_gnf_guards_last_state():
    A = parse("prev (fin p)")
    g = nf.gnf(A, "past", V)
    assert g.direction == "past"
    assert equiv(g.formula(), A, V) and equiv(g.universal(), A, V)


@given(introspective(), st.sampled_from(["future", "past"]))
def test_gnf_properties(A, direction):
    g = nf.gnf(A, direction, VQ)
    assert equiv(g.formula(), A) and equiv(g.universal(), A)
    assert_letter_partition([guard for guard, _ in g.branches], VQ)
    conts = [itl_to_dfa(c, VQ) for _, c in g.branches]
    for a in range(len(conts)):
        for b in range(a + 1, len(conts)):
            assert not au.dfa_equivalent(conts[a], conts[b])


def test_gnf_rejects_non_introspective():
    with pytest.raises(ValueError):
        nf.gnf(parse("<r> p"), "future", V)


# ------------------------------------------------------------ chop decompositions

def test_box_decomposition():
    A = parse("box p")
    dec = nf.full_system_chop(A, "nonstrict", V)
    assert equiv(dec.disjunctive(), A, V) and equiv(dec.conjunctive(), A, V)
    # the continuation starts on the shared state, so pairs are compared glued
    glued = [S.Chop(a, b) for a, b in dec.pairs]
    assert len(glued) == 2
    assert any(equiv(g, parse("box p ; box p"), V) for g in glued)
    assert any(equiv(a, S.Not(A), V) and equiv(b, S.FALSE_F, V) for a, b in dec.pairs)


def test_strict_decomposition_of_empty():
    dec = nf.full_system_chop(S.EMPTY_F, "strict", V)
    assert letters_of(dec.empty_part, V) == {0, 1}
    assert all(au.is_empty(itl_to_dfa(b, V)) for _, b in dec.pairs)


@settings(max_examples=30)
@given(introspective(), st.sampled_from(nf.FLAVORS))
def test_decomposition_properties(A, flavor):
    dec = nf.full_system_chop(A, flavor, VQ)
    assert equiv(dec.disjunctive(), A) and equiv(dec.conjunctive(), A)
    assert_full_system(dec.guards(), VQ)


def test_strictify_box():
    A = parse("box p")
    dec = nf.strictify_syntactic(A, nf.full_system_chop(A, "nonstrict", V), V)
    auto = nf.full_system_chop(A, "strict", V)
    assert equiv(dec.disjunctive(), auto.disjunctive(), V)
    assert_full_system(dec.guards(), V)


def test_strictify_empty_keeps_only_empty_part():
    dec = nf.strictify_syntactic(S.EMPTY_F, nf.full_system_chop(S.EMPTY_F, "nonstrict", V), V)
    assert letters_of(dec.empty_part, V) == {0, 1}
    assert all(au.is_empty(itl_to_dfa(S.strict_seq(a, b), V)) for a, b in dec.pairs)


@settings(max_examples=25)
@given(introspective(max_leaves=4))
def test_strictify_properties(A):
    dec = nf.strictify_syntactic(A, nf.full_system_chop(A, "nonstrict", VQ), VQ)
    assert equiv(dec.disjunctive(), A) and equiv(dec.conjunctive(), A)
    assert_full_system(dec.guards(), VQ)


def test_elementary_conjunctions_partition():
    fs = [parse("p"), parse("box q"), parse("p ; q")]
    cells = nf.elementary_conjunctions(fs, VQ)
    assert_full_system([c for _, c in cells], VQ)


# ------------------------------------------------------------ equations

P, Q, R = parse("p"), parse("q"), parse("skip")


def test_single_self_loop():
    sol = nf.solve_equations(nf.EquationSystem.from_formulas({"X": (P, [(Q, "X")])}))
    assert equiv(sol["X"], parse("q* ; p"))


def test_closed_equation():
    sol = nf.solve_equations(nf.EquationSystem.from_formulas({"X": (P, [])}))
    assert equiv(sol["X"], P)


def test_two_unknown_chain():
    sol = nf.solve_equations(nf.EquationSystem.from_formulas(
        {"X": (P, [(Q, "Y")]), "Y": (R, [])}))
    assert equiv(sol["X"], parse("p | (q ; skip)"))
    assert equiv(sol["Y"], R)


def test_mutual_recursion():
    # X = p | q;Y, Y = skip | p;X
    sol = nf.solve_equations(nf.EquationSystem.from_formulas(
        {"X": (P, [(Q, "Y")]), "Y": (R, [(P, "X")])}))
    assert equiv(sol["X"], parse("(q ; p)* ; (p | (q ; skip))"))


def test_unknown_without_equation():
    with pytest.raises(ValueError):
        nf.EquationSystem.from_formulas({"X": (P, [(Q, "Z")])})


# ------------------------------------------------------------ w-closures

def test_closure_of_box():
    s = nf.w_closure_system(parse("box p"), P, V)
    assert len([k for k in s.members if k[1] and not au.is_empty(itl_to_dfa(s.lhs(k), V))]) == 1
    eq = s.equations[(s.initial, True)]
    assert eq.homogeneous is not None and eq.transitions == ()


def test_closure_of_true():
    s = nf.w_closure_system(S.TRUE_F, P, V)
    for pos in (True, False):
        eq = s.equations[(s.initial, pos)]
        assert eq.homogeneous is not None
        assert [t.target[1] for t in eq.transitions] == [not pos]


@settings(max_examples=30)
@given(introspective(), state_formulas())
def test_closure_properties(A, w):
    s = nf.w_closure_system(A, w, VQ)
    assert len(s.members) <= 2 * s.dfa_states
    for key, eq in s.equations.items():
        assert equiv(s.rhs(key), s.lhs(key)) and equiv(s.rhs_conjunctive(key), s.lhs(key))
        for t in eq.transitions:
            assert not au.is_empty(itl_to_dfa(s.block(t.block, key[1]), VQ))
            assert t.target[1] != key[1] and t.target in s.members


def test_wnf_box():
    f = nf.w_block_form(parse("box p"), P, V)
    assert equiv(f.formula, parse("box p"), V)
    live = {k for k, g in f.signatures.items() if not au.is_empty(itl_to_dfa(g, V))}
    assert live == {(True, True)}


def test_wnf_true():
    f = nf.w_block_form(S.TRUE_F, P, V)
    assert equiv(f.formula, S.TRUE_F, V)
    live = {k for k, g in f.signatures.items() if not au.is_empty(itl_to_dfa(g, V))}
    assert live == {(True, True), (True, False), (False, True), (False, False)}


@settings(max_examples=25)
@given(introspective(max_leaves=4), state_formulas())
def test_wnf_properties(A, w):
    f = nf.w_block_normal_form(A, w, VQ)
    assert equiv(f, A)
    nf.check_block_form(f, w)
    wl = letters_of(w, VQ)
    other = frozenset(range(4)) - wl
    for H in nf.block_leaves(f, w):
        d = itl_to_dfa(H, VQ)
        assert not au.is_empty(d)
        letters = wl if nf._block_phase(H, w) else other
        assert au.dfa_equivalent(au.restrict_letters(d, letters), d)


def test_grammar_checker_rejects_foreign_shapes():
    with pytest.raises(nf.GrammarError):
        nf.check_block_form(parse("p ; q"), P)
