"""Finite intervals: automata, normal forms and inverse projection.

Run: python3 demos/finite_words.py
"""
from itlnl import parse, render
from itlnl import automata as au
from itlnl import normal_forms as nf
from itlnl.compile import dfa_to_formula, itl_to_dfa
from itlnl.projection import pi_inverse_dfa, pi_inverse_eliminate
from itlnl.semantics import Window, eval_window

V = ("p", "q")


def section(title):
    print(f"\n== {title}")


section("evaluation on a window")
W = Window((frozenset({"p"}), frozenset({"p"}), frozenset()), 0, 1)
for text in ("box p", "bi p", "p ; ~p", "<r> ~p"):
    value, exact = eval_window(W, parse(text))
    print(f"{text:12} {value!s:5} ({'exact' if exact else 'bounded'}) on {W}")

section("compile and back")
A = parse("box (p -> next q)")
d = itl_to_dfa(A, V)
back = dfa_to_formula(d)
print(render(A), "->", d.n_states, "states ->", render(back))
print("round trip equal:", au.dfa_equivalent(itl_to_dfa(back, V), d))

section("guarded normal form of box p")
g = nf.gnf(parse("box p"), "future", ("p",))
print("empty part:", render(g.empty_part))
for guard, cont in g.branches:
    print(f"  {render(guard)} & next ({render(cont)})")

section("strict chop decomposition of p ; q")
dec = nf.full_system_chop(parse("p ; q"), "strict", V)
print("empty part:", render(dec.empty_part))
for a, b in dec.pairs:
    print(f"  ({render(a)}) ; skip ; ({render(b)})")

section("w-block normal form of true over w = p")
print(render(nf.w_block_normal_form(parse("true"), parse("p"), ("p",))))

section("inverse projection")
for w, body in (("p", "skip"), ("p", "box ~p & q"), ("p", "~p ; skip ; p")):
    f = pi_inverse_eliminate(parse(w), parse(body), V)
    size = pi_inverse_dfa(parse(w), parse(body), V).n_states
    print(f"{w} projinv ({body}) == {render(f)}   [oracle DFA: {size} states]")
