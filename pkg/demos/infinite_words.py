"""Omega-words: Fin, reactivity, quantifier elimination, interpolation.

Run: python3 demos/infinite_words.py
"""
from itlnl import parse, render
from itlnl import automata as au
from itlnl.automata import Nba
from itlnl.omega import (beth_define, decide_separated, exists_elim, fin_formula, interpolate,
                         reactivity_normal_form, strongest_consequence)
from itlnl.semantics import LassoEvaluator, enumerate_lassos, format_letter

V = ("p",)


def section(title):
    print(f"\n== {title}")


section("Fin of 'first letter has p'")
X = au.dfa_first_letter(V, lambda c: c & 1)
F = fin_formula(X)
print(render(F))
ev = LassoEvaluator(F, V)
for L in enumerate_lassos(V, 1, 1):
    stem = " ".join(format_letter(s) for s in L.stem) or "-"
    loop = " ".join(format_letter(s) for s in L.loop)
    print(f"  stem {stem:4} loop {loop:4} -> {ev(L)}")

section("reactivity form of 'infinitely many p'")
inf_p = Nba(V, [[1, 2], [1, 2]], 1, 2)
R = reactivity_normal_form(inf_p)
print(render(R.formula()))
print("parity automaton:", R.dpa.n_states, "states,", len(R.pairs), "Streett pair(s)")

section("quantifier elimination")
for text in ("p & q", "box (p -> q) & dia p", "q & <r>(skip ; (p & <r>(skip ; ~p & q)))"):
    print(f"exists p. {text}\n  == {render(exists_elim('p', parse(text)))}")

section("strongest consequence and interpolation")
A = parse("box p & box (p -> q)")
print("sc:", render(strongest_consequence(A, {"p"})))
ip = interpolate(A, parse("box q | r"))
print("interpolant:", render(ip.formula), "(exact)" if ip.exact else "(bounded)")

section("explicit definitions")
for text in ("p <-> q", "p <-> (q ; r)", "p <-> <r>(skip ; q)"):
    print(f"{text}: p == {render(beth_define(parse(text), 'p').formula)}")

section("decision procedure")
for q, text in (("valid", "dia p | box ~p"), ("sat", "empty & skip"),
                ("sat", "q & <r>(skip ; p) & ~<l>(p ; skip)")):
    d = decide_separated(q, parse(text))
    print(f"{q} {text}: {d.value}" + (f"  witness {d.witness}" if d.witness else ""))
