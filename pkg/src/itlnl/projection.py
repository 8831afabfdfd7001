"""Inverse projection ``w projinv A``.

An interval satisfies ``w projinv A`` when it arises from some model of
``A`` by deleting its ``~w`` states. Two independent routes are provided:

* :func:`pi_inverse_dfa`, an automaton construction that closes every DFA
  state under reading ``~w`` letters;
* :func:`pi_inverse_eliminate`, which rewrites the block equations of ``A``
  and solves them, producing a ``projinv``-free formula made of
  ``B & box w`` blocks.
"""
from __future__ import annotations

from typing import Sequence

from . import automata as au
from . import syntax as S
from .automata import Dfa, Nfa
from .compile import itl_to_dfa, letters_of
from .normal_forms import (Equation, EquationSystem, VerificationError, _check_equal,
                           _require_introspective, _require_state, _vocab, check_reg_pos,
                           solve_system, w_closure_system)
from .syntax import Formula


def _closure(d: Dfa, start: int, letters) -> int:
    """Bitmask of states reachable from ``start`` by words over ``letters``
    (the empty word included)."""
    seen = 1 << start
    stack = [start]
    while stack:
        q = stack.pop()
        for c in letters:
            r = int(d.delta[q, c])
            if not seen >> r & 1:
                seen |= 1 << r
                stack.append(r)
    return seen


def pi_inverse_dfa(w: Formula, A: Formula, vocab: Sequence[str] | None = None) -> Dfa:
    """Minimal DFA of ``w projinv A`` over the given vocabulary."""
    _require_state(w)
    vocab = _vocab([w, A], vocab)
    d = itl_to_dfa(A, vocab)
    keep = sorted(letters_of(w, vocab))
    drop = sorted(set(range(d.n_letters)) - set(keep))
    closures = [_closure(d, q, drop) for q in range(d.n_states)]
    acc_mask = 0
    for q in range(d.n_states):
        if d.accepting[q]:
            acc_mask |= 1 << q
    succ = []
    accepting = 0
    for q in range(d.n_states):
        row = [0] * d.n_letters
        for c in keep:
            for r in au._bits(closures[q]):
                row[c] |= 1 << int(d.delta[r, c])
        succ.append(row)
        if closures[q] & acc_mask:
            accepting |= 1 << q
    return au.determinize_minimize(Nfa(vocab, succ, 1 << d.initial, accepting))


def pi_inverse_system(w: Formula, A: Formula, vocab=None):
    """Equations for the unknowns ``P(q) = w projinv (B_q & w)``.

    Returns ``(system, roots)`` with ``w projinv A`` the disjunction of the
    solutions of ``roots``. The unknowns ``w projinv (B & ~w)`` are
    substituted away on the spot: each is a disjunction of ``P`` unknowns.
    """
    blocks = w_closure_system(A, w, vocab)
    vocab = blocks.vocab
    others = frozenset(range(2 ** len(vocab))) - letters_of(w, vocab)

    def negative_run(key) -> bool:
        """Does the member admit an interval made of ``~w`` states only?"""
        d = itl_to_dfa(blocks.members[key], vocab)
        return bool(others) and not au.is_empty(au.restrict_letters(d, others))

    def continuations(key) -> list[tuple]:
        return [t.target for t in blocks.equations[key].transitions]

    eqs: dict = {}
    todo = [(blocks.initial, True)] + continuations((blocks.initial, False))
    roots = list(dict.fromkeys(todo))
    while todo:
        key = todo.pop(0)
        if key in eqs:
            continue
        eq = blocks.equations[key]
        e = Equation()
        if eq.homogeneous is not None:
            e.add_closed(blocks.block(eq.homogeneous, True), bare=True)
        for t in eq.transitions:
            blk = blocks.block(t.block, True)
            if negative_run(t.target):
                # the deleted states run to the end of the model
                e.add_closed(blk, bare=True)
            coeff = S.Chop(blk, S.SKIP_F)
            for nxt in continuations(t.target):
                e.add_term(nxt, coeff)
                if nxt not in eqs:
                    todo.append(nxt)
        eqs[key] = e
    return EquationSystem(eqs, list(eqs)), roots


def pi_inverse_eliminate(w: Formula, A: Formula, vocab=None, verify: bool = True) -> Formula:
    """``projinv``-free equivalent of ``w projinv A`` built from ``B & box w``
    blocks, checked against :func:`pi_inverse_dfa`."""
    _require_introspective(A)
    _require_state(w)
    vocab = _vocab([w, A], vocab)
    system, roots = pi_inverse_system(w, A, vocab)
    solved = solve_system(system)
    out = Equation()
    for key in roots:
        for H, (bare, prefix) in solved[key].closed.items():
            out.add_closed(H, bare=bare, prefix=prefix)
    result = out.closed_formula()
    if verify:
        _check_equal(result, pi_inverse_dfa(w, A, vocab), "inverse projection elimination")
        check_reg_pos(result, w)
    return result


__all__ = ["pi_inverse_dfa", "pi_inverse_eliminate", "pi_inverse_system", "VerificationError"]
