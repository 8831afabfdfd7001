import pytest
from hypothesis import given

from itlnl import automata as au
from itlnl.automata import Dfa, Dpa, Nba
from itlnl.formats import (FormatError, format_automaton, format_lasso, format_window, kind_of,
                           parse_automaton, parse_lasso, parse_letter, parse_window, to_dot)
from itlnl.semantics import Lasso, Window, enumerate_lassos
from strategies import dfas, lassos, nbas, windows


def test_letters():
    assert parse_letter("{}") == frozenset()
    assert parse_letter("{p, q}") == frozenset({"p", "q"})
    with pytest.raises(FormatError):
        parse_letter("p")
    with pytest.raises(FormatError):
        parse_letter("{1x}")


def test_window_reference_forms():
    W = parse_window("{p} {}\n# ref 0 1")
    assert W == Window((frozenset({"p"}), frozenset()), 0, 1)
    assert parse_window("{p} {} # ref 1 1").i == 1
    assert parse_window("{p} {q} {}").j == 2
    with pytest.raises(FormatError):
        parse_window("{p} # ref 0 3")
    with pytest.raises(FormatError):
        parse_window("# ref 0 0")


@given(windows())
def test_window_round_trip(W):
    assert parse_window(format_window(W)) == W


@given(lassos())
def test_lasso_round_trip(L):
    assert parse_lasso(format_lasso(L)) == L


def test_lasso_needs_loop():
    with pytest.raises(FormatError):
        parse_lasso("stem: {p}")
    with pytest.raises(FormatError):
        parse_lasso("stem: {p}\nloop:")


NBA_TEXT = """nba
vocab: p
states: 2
initial: 0
0 --{}--> 0
0 --{p}--> 1
1 --{}--> 0
1 --{p}--> 1
accepting: 1
"""


def test_nba_file():
    n = parse_automaton(NBA_TEXT)
    assert kind_of(n) == "nba" and n.vocab == ("p",)
    assert au.nba_lasso_accepts(n, [], [1]) and not au.nba_lasso_accepts(n, [1], [0])


def test_partial_dfa_gets_sink():
    d = parse_automaton("dfa\nvocab: p\nstates: 1\ninitial: 0\n0 --{p}--> 0\naccepting: 0")
    assert d.n_states == 2
    assert d.accepts([1, 1]) and not d.accepts([1, 0])


def test_partial_dpa_sink_rejects():
    d = parse_automaton("dpa\nvocab: p\nstates: 1\ninitial: 0\n0 --{p}--> 0\npriority 0 = 0")
    assert au.dpa_lasso_accepts(d, [], [1]) and not au.dpa_lasso_accepts(d, [], [0])


@pytest.mark.parametrize("text", [
    "",
    "automaton\nstates: 1\ninitial: 0",
    "dfa\nvocab: p\nstates: 1\ninitial: 0\n0 --{p}--> 3",
    "dfa\nvocab: p\nstates: 2\ninitial: 0 1",
    "dfa\nvocab: p\nstates: 1\ninitial: 0\n0 --{q}--> 0",
    "nba\nvocab: p\nstates: 1\ninitial: 0\npriority 0 = 1",
    "dpa\nvocab: p\nstates: 2\ninitial: 0\npriority 0 = 1",
    "dfa\nvocab: p\nstates: 1\ninitial: 0\ncolour: red",
])
def test_malformed_automata(text):
    with pytest.raises(FormatError):
        parse_automaton(text)


@given(dfas())
def test_dfa_round_trip(d):
    back = parse_automaton(format_automaton(d))
    assert isinstance(back, Dfa) and au.dfa_equivalent(back, d)
    assert format_automaton(back) == format_automaton(d)


@given(nbas(("p", "q")))
def test_nba_round_trip(n):
    back = parse_automaton(format_automaton(n))
    assert isinstance(back, Nba)
    assert format_automaton(back) == format_automaton(n)


def test_dpa_round_trip():
    d = au.nba_determinize(parse_automaton(NBA_TEXT))
    back = parse_automaton(format_automaton(d))
    assert isinstance(back, Dpa)
    for L in enumerate_lassos(("p",), 2, 2):
        u = [1 if "p" in s else 0 for s in L.stem]
        v = [1 if "p" in s else 0 for s in L.loop]
        assert au.dpa_lasso_accepts(back, u, v) == au.dpa_lasso_accepts(d, u, v)


def test_dot_merges_parallel_edges():
    dot = to_dot(parse_automaton(NBA_TEXT))
    assert dot.startswith("digraph")
    assert "1 [shape=doublecircle]" in dot
    loop = to_dot(parse_automaton("nba\nvocab: p\nstates: 1\ninitial: 0\n"
                                  "0 --{}--> 0\n0 --{p}--> 0\naccepting: 0"))
    assert '  0 -> 0 [label="{} {p}"];' in loop.splitlines()
