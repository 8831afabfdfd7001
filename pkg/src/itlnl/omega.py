"""Constructions on infinite words and the quantifier-elimination chain.

* ``Fin(X)``: a future formula stating that only finitely many prefixes of
  the ω-word lie in the regular language ``X``;
* the reactivity normal form ``AND_n Fin(M_n'') -> Fin(M_n')`` of an
  ω-regular language given by a Büchi automaton;
* elimination of ``exists p`` for introspective and separated formulas,
  and on top of it strongest consequences, uniform interpolants and
  explicit Beth definitions;
* a decision procedure for Boolean combinations of strictly past,
  introspective and strictly future formulas.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import automata as au
from . import syntax as S
from .automata import Dfa, Dpa, Nba
from .compile import (DEFAULT_OMEGA_GUARD, OmegaCompiler, dfa_to_formula, itl_to_dfa,
                      register_point_automata)
from .normal_forms import VerificationError, full_system_chop
from .semantics import (ContextEvaluator, ContextWord, Lasso, Window, bounded_valid,
                        letter_code, letter_set, normalize_future)
from .syntax import Formula

DIRECTIONS = ("future", "past")


class ImplicationInvalid(ValueError):
    """``A -> B`` is not valid; ``witness`` falsifies it."""

    def __init__(self, witness, exact: bool):
        super().__init__(f"implication invalid, counterexample: {witness}")
        self.witness = witness
        self.exact = exact


class NotImplicitlyDefined(ValueError):
    """Two interpretations of the variable agree with the formula on
    ``window`` but differ at its reference interval."""

    def __init__(self, window: Window, first: Window, second: Window):
        super().__init__(f"not implicitly defined, window: {window}")
        self.window = window
        self.first = first
        self.second = second


# ================================================================== Fin

def finitely_many_prefixes(X: Dfa, lasso: Lasso) -> bool:
    """Exact loop analysis: do only finitely many non-empty prefixes of the
    lasso word lie in ``L(X)``?"""
    stem = [letter_code(s, X.vocab) for s in lasso.stem]
    loop = [letter_code(s, X.vocab) for s in lasso.loop]
    q = X.initial
    for a in stem:
        q = int(X.delta[q, a])
    # iterate whole loops until the state at a loop boundary repeats
    seen: dict[int, int] = {}
    visits: list[int] = []
    k = 0
    while q not in seen:
        seen[q] = k
        for a in loop:
            q = int(X.delta[q, a])
            visits.append(q)
        k += 1
    cycle = visits[seen[q] * len(loop):]
    return not any(X.accepting[r] for r in cycle)


def fin_formula(X: Dfa, direction: str = "future") -> Formula:
    """``Fin(X) = <r> OR_k (C_k & [r] ~C_k')`` over a nonstrict full-system
    chop decomposition ``X == OR_k C_k ; C_k'``.

    With ``direction="past"`` the mirror image is built: finitely many
    intervals ending at the anchor whose reversal lies in ``X``.
    """
    if direction not in DIRECTIONS:
        raise ValueError(f"unknown direction {direction!r}")
    if au.is_empty(X):
        return S.TRUE_F
    if au.is_universal(X):
        return S.FALSE_F
    if direction == "future":
        dec = full_system_chop(dfa_to_formula(X), "nonstrict", X.vocab)
        box, dia = S.BoxR, S.DiamondR
    else:
        dec = full_system_chop(dfa_to_formula(au.reverse_dfa(X)), "mirror", X.vocab)
        box, dia = S.BoxL, S.DiamondL
    parts = []
    for guard, rest in dec.pairs:
        if rest.kind == S.TRUE:
            continue
        tail = S.TRUE_F if rest.kind == S.FALSE else box(S.neg(rest))
        parts.append(S.conj(guard, tail))
    body = S.disj(*parts)
    if body.kind == S.FALSE:
        return S.FALSE_F
    out = dia(body)
    _register(out, direction, au.nba_from_dfa_cobuchi(X), au.nba_from_dfa_buchi(X))
    return out


def _register(F: Formula, direction: str, pos: Nba, neg: Nba) -> None:
    """Hand the automata of an emitted formula to the ω-compiler; past
    formulas are registered through their time reversal."""
    register_point_automata(S.time_reverse(F) if direction == "past" else F, pos, neg)


# ========================================================== reactivity

def _violable(d: Dpa, k: int, reach: set[int]) -> bool:
    """Is there a reachable cycle through a priority-``k`` state staying in
    priorities ``>= k``? Otherwise the pair for ``k`` holds on every run."""
    prio = d.priority
    inside = [q for q in reach if prio[q] >= k]
    allowed = set(inside)
    for s in inside:
        if prio[s] != k:
            continue
        stack = [int(r) for r in d.delta[s] if int(r) in allowed]
        seen = set()
        while stack:
            q = stack.pop()
            if q == s:
                return True
            if q in seen:
                continue
            seen.add(q)
            stack.extend(int(r) for r in d.delta[q] if int(r) in allowed)
    return False


def streett_pairs(d: Dpa) -> list[tuple[frozenset, frozenset]]:
    """One pair per odd priority ``k`` of a min-even parity automaton:
    states of priority ``k`` (visited finitely often unless rescued) and
    states of priority below ``k`` (the rescue). Pairs no run can violate
    are left out."""
    prio = [int(x) for x in d.priority]
    reach = {int(q) for q in np.flatnonzero(au.reachable_states(d.delta, d.initial))}
    pairs = []
    for k in sorted({x for x in prio if x % 2 == 1}):
        if not _violable(d, k, reach):
            continue
        forbid = frozenset(q for q, x in enumerate(prio) if x == k)
        rescue = frozenset(q for q, x in enumerate(prio) if x < k)
        pairs.append((forbid, rescue))
    return pairs


@dataclass
class ReactivityForm:
    """``AND_n Fin(M_n'') -> Fin(M_n')`` with ``pairs = ((M_n', M_n''), ...)``.

    ``M_n'`` collects the prefixes ending in a priority-``k`` state and
    ``M_n''`` those ending below ``k``; the conjunct says that visiting
    priority ``k`` infinitely often needs something smaller infinitely
    often.
    """

    pairs: tuple[tuple[Dfa, Dfa], ...]
    dpa: Dpa
    direction: str = "future"
    _formula: Formula | None = field(default=None, repr=False)

    def formula(self) -> Formula:
        if self._formula is None:
            conjuncts = []
            for forbid, rescue in self.pairs:
                conjuncts.append(S.simplify_bool(S.Imp(fin_formula(rescue, self.direction),
                                                       fin_formula(forbid, self.direction))))
            self._formula = S.conj(*conjuncts)
            if self._formula.kind not in (S.TRUE, S.FALSE):
                _register(self._formula, self.direction, *self.automata())
        return self._formula

    def automata(self) -> tuple[Nba, Nba]:
        """Büchi automata for the language and its complement."""
        return au.dpa_to_nba(self.dpa), au.dpa_to_nba(au.dpa_complement(self.dpa))


def reactivity_normal_form(N: Nba, guard: int = au.DEFAULT_NBA_GUARD,
                           direction: str = "future") -> ReactivityForm:
    """Determinize ``N`` to a parity automaton and read off one
    ``Fin(M'') -> Fin(M')`` conjunct per odd priority.

    ``direction="past"`` renders the mirror image, for languages of
    leftward-read words.
    """
    d = au.nba_determinize(N, guard)
    pairs = []
    for forbid, rescue in streett_pairs(d):
        pairs.append((au.dpa_prefix_dfa(d, forbid), au.dpa_prefix_dfa(d, rescue)))
    return ReactivityForm(tuple(pairs), d, direction)


# ================================================= ∃ over intervals

def exists_elim_introspective(p: str, A: Formula, vocab: Sequence[str] | None = None) -> Formula:
    """``exists p. A`` for introspective ``A``: relabeling closure of the
    DFA, back to a formula without ``p``."""
    return _exists_introspective((p,), A, vocab)


def _names(ps) -> tuple[str, ...]:
    return (ps,) if isinstance(ps, str) else tuple(sorted(set(ps)))


def _exists_introspective(ps: Sequence[str], A: Formula, vocab=None) -> Formula:
    if not S.is_introspective(A):
        raise S.UnsupportedFormula(f"not introspective: {S.render(A)}")
    hide = [p for p in ps if p in S.free_vars(A)]
    if not hide:
        return A
    vocab = tuple(sorted(set(vocab or ()) | S.free_vars(A)))
    n = au.dfa_to_nfa(itl_to_dfa(A, vocab))
    for p in hide:
        n = au.relabel_dont_care(n, p)
    d = au.determinize_minimize(n)
    for p in hide:
        d = au.drop_var(d, p)
    return dfa_to_formula(d)


def _literals(F: Formula) -> list[tuple[Formula, bool]]:
    """Split a conjunction of possibly negated atoms."""
    if F.kind == S.TRUE:
        return []
    if F.kind == S.AND:
        return _literals(F.args[0]) + _literals(F.args[1])
    if F.kind == S.NOT:
        return [(F.args[0], False)]
    return [(F, True)]


def component_nba(F: Formula, vocab: Sequence[str], comp: OmegaCompiler | None = None) -> Nba:
    """ω-words starting right after the reference interval on which the
    conjunction ``F`` of strictly future literals holds."""
    comp = comp or OmegaCompiler(vocab)
    out = au.nba_universal(vocab)
    for atom, positive in _literals(F):
        if not S.is_strictly_future(atom):
            raise S.NotSeparated(atom, "expected a strictly future literal")
        G = normalize_future(S.DiamondR(atom.args[0].args[1]))
        out = au.nba_intersection(out, comp.diamond(G.args[0], positive))
    return au.nba_trim(out)


def _anchor_future(H: Formula) -> Formula:
    """``<r>(skip ; (empty & H))``: ``H`` read at the state after the
    reference interval."""
    if H.kind in (S.TRUE, S.FALSE):
        return H
    return S.DiamondR(S.Chop(S.SKIP_F, S.And(S.EMPTY_F, H)))


def _anchor_past(H: Formula) -> Formula:
    if H.kind in (S.TRUE, S.FALSE):
        return H
    return S.DiamondL(S.Chop(S.And(S.EMPTY_F, H), S.SKIP_F))


def _exists_future(ps, F: Formula, vocab, direction: str, guard: int) -> Formula:
    hide = [p for p in ps if p in S.free_vars(F)]
    if not hide:
        return F
    src = S.time_reverse(F) if direction == "past" else F
    n = component_nba(src, vocab, OmegaCompiler(vocab, guard))
    for p in hide:
        n = au.nba_drop_var(au.relabel_dont_care(n, p), p)
    form = reactivity_normal_form(n, guard, direction)
    H = form.formula()
    out = _anchor_past(H) if direction == "past" else _anchor_future(H)
    if out.kind not in (S.TRUE, S.FALSE):
        pos, neg = form.automata()
        _register(out, direction, au.nba_after_letter(pos), au.nba_after_letter(neg))
    return out


def exists_elim(p, A: Formula, vocab: Sequence[str] | None = None,
                guard: int = DEFAULT_OMEGA_GUARD) -> Formula:
    """An ``exists``-free equivalent of ``exists p. A`` for separated ``A``.

    ``p`` may also be a collection of variables, eliminated together.
    Each disjunct ``P & C & F`` of the separated normal form is treated
    part by part, since the three parts read disjoint stretches of the
    trace.
    """
    ps = _names(p)
    if not set(ps) & S.free_vars(A):
        return A
    if S.is_introspective(A):
        return _exists_introspective(ps, A, vocab)
    vocab = tuple(sorted(set(vocab or ()) | S.free_vars(A)))
    parts = []
    for dj in S.separated_dnf(A):
        past = _exists_future(ps, dj.past, vocab, "past", guard)
        intro = _exists_introspective(ps, dj.introspective, vocab)
        fut = _exists_future(ps, dj.future, vocab, "future", guard)
        parts.append(S.conj(past, intro, fut))
    return S.disj(*parts)


# ================================================== decision procedure

@dataclass
class Decision:
    """Answer of :func:`decide_separated`. For ``sat`` the witness is a
    model, for ``valid`` a counterexample (both ``None`` otherwise)."""

    query: str
    value: bool
    witness: ContextWord | None = None


def _lasso_from_codes(stem, loop, vocab) -> Lasso:
    return Lasso(tuple(letter_set(c, vocab) for c in stem),
                 tuple(letter_set(c, vocab) for c in loop))


def _satisfying_context(A: Formula, vocab: Sequence[str], guard: int) -> ContextWord | None:
    comp = OmegaCompiler(vocab, guard)
    for dj in S.separated_dnf(A):
        d = itl_to_dfa(dj.introspective, vocab)
        center = au.shortest_word(d)
        if center is None:
            continue
        right = au.nba_find_lasso(component_nba(dj.future, vocab, comp))
        if right is None:
            continue
        left = au.nba_find_lasso(component_nba(S.time_reverse(dj.past), vocab, comp))
        if left is None:
            continue
        return ContextWord(_lasso_from_codes(*left, vocab),
                           tuple(letter_set(c, vocab) for c in center),
                           _lasso_from_codes(*right, vocab))
    return None


def decide_separated(query: str, A: Formula, vocab: Sequence[str] | None = None,
                     guard: int = DEFAULT_OMEGA_GUARD) -> Decision:
    """Satisfiability or validity of a Boolean combination of strictly
    past, introspective and strictly future formulas.

    A disjunct of the separated normal form is satisfiable iff each of its
    three parts is, checked by DFA and Büchi emptiness. Witnesses are
    re-evaluated with :class:`ContextEvaluator` before being returned.
    """
    if query not in ("sat", "valid"):
        raise ValueError(f"unknown query {query!r}")
    vocab = tuple(sorted(set(vocab or ()) | S.free_vars(A))) or ("p",)
    target = A if query == "sat" else S.Not(A)
    cw = _satisfying_context(target, vocab, guard)
    if cw is not None and not ContextEvaluator(target, vocab)(cw):
        raise VerificationError(f"witness {cw} does not satisfy {S.render(target)}")
    if query == "sat":
        return Decision(query, cw is not None, cw)
    return Decision(query, cw is None, cw)


# ============================================ validity dispatch

@dataclass
class ValidityReport:
    valid: bool
    exact: bool
    witness: object = None


def check_valid(A: Formula, vocab: Sequence[str] | None = None, max_len: int = 4,
                guard: int = DEFAULT_OMEGA_GUARD) -> ValidityReport:
    """Exact for introspective and separated formulas, bounded window
    falsification otherwise."""
    vocab = tuple(sorted(set(vocab or ()) | S.free_vars(A))) or ("p",)
    if S.is_introspective(A) and not S.has_input_only(A):
        d = itl_to_dfa(A, vocab)
        bad = au.shortest_word(au.complement(d))
        if bad is None:
            return ValidityReport(True, True)
        W = Window(tuple(letter_set(c, vocab) for c in bad), 0, len(bad) - 1)
        return ValidityReport(False, True, W)
    try:
        S.separated_dnf(A)
    except (S.NotSeparated, ValueError):
        cex = bounded_valid(A, vocab, max_len)
        return ValidityReport(cex is None, False, None if cex is None else cex.window)
    dec = decide_separated("valid", A, vocab, guard)
    return ValidityReport(dec.value, True, dec.witness)


# ====================================== consequences and interpolants

def strongest_consequence(A: Formula, hide: Iterable[str], vocab: Sequence[str] | None = None,
                          check: bool = True) -> Formula:
    """The strongest consequence of ``A`` over ``vars(A) - hide``: all
    hidden variables are eliminated in one pass."""
    hide = _names(hide)
    if not set(hide) & S.free_vars(A):
        return A
    C = exists_elim(hide, A, vocab)
    if S.free_vars(C) & set(hide):
        raise VerificationError("eliminated variable still occurs in the result")
    if check:
        rep = check_valid(S.Imp(A, C), vocab)
        if not rep.valid:
            raise VerificationError(f"A does not imply its consequence at {rep.witness}")
    return C


@dataclass
class Interpolant:
    """``formula`` over the shared variables with ``A -> formula`` and
    ``formula -> B``; ``exact`` is false when either implication was only
    checked on bounded windows."""

    formula: Formula
    exact: bool

    @property
    def unverified(self) -> bool:
        return not self.exact


def interpolate(A: Formula, B: Formula, vocab: Sequence[str] | None = None,
                max_len: int = 4) -> Interpolant:
    """A uniform interpolant: the strongest consequence of ``A`` over the
    variables it shares with ``B``."""
    vocab = tuple(sorted(set(vocab or ()) | S.free_vars(A) | S.free_vars(B))) or ("p",)
    pre = check_valid(S.Imp(A, B), vocab, max_len)
    if not pre.valid:
        raise ImplicationInvalid(pre.witness, pre.exact)
    C = strongest_consequence(A, S.free_vars(A) - S.free_vars(B), vocab)
    post = check_valid(S.Imp(C, B), vocab, max_len)
    if not post.valid:
        raise VerificationError(f"interpolant does not imply B at {post.witness}")
    return Interpolant(C, pre.exact and post.exact)


@dataclass
class Definition:
    """Explicit definition ``C`` of a variable; ``exact`` as for
    :class:`Interpolant`."""

    formula: Formula
    exact: bool


def _split_window(W: Window, p: str, q: str) -> tuple[Window, Window, Window]:
    """The common part of a two-copy window and its two readings of ``p``."""
    base = tuple(s - {p, q} for s in W.states)
    first = tuple(s - {q} for s in W.states)
    second = tuple((s - {p, q}) | ({p} if q in s else set()) for s in W.states)
    return Window(base, W.i, W.j), Window(first, W.i, W.j), Window(second, W.i, W.j)


def beth_define(A: Formula, p: str, vocab: Sequence[str] | None = None,
                max_len: int = 4) -> Definition:
    """An explicit definition of ``p`` implicitly defined by ``A``.

    Definability is checked in the local form
    ``A & A[p'/p] -> (p <-> p')`` (exact for introspective and separated
    ``A``). The definition is the interpolant of ``A & p`` and
    ``A[p'/p] -> p'``, verified by ``A -> (p <-> C)``. When the local
    check fails, the two-copy premise under ``box_a`` is searched for a
    counterexample on bounded windows.
    """
    if p not in S.free_vars(A):
        raise ValueError(f"{p} does not occur in {S.render(A)}")
    vocab = tuple(sorted(set(vocab or ()) | S.free_vars(A)))
    q = S.fresh_var(set(vocab) | S.all_vars(A), p)
    A2 = S.substitute_var(A, p, q)
    vq = tuple(sorted(set(vocab) | {q}))
    P, Q = S.Var(p), S.Var(q)
    local = check_valid(S.Imp(S.And(A, A2), S.Iff(P, Q)), vq, max_len)
    if not local.valid:
        premise = S.Imp(S.And(S.BoxA(A), S.BoxA(A2)), S.Iff(P, Q))
        cex = bounded_valid(premise, vq, max_len)
        if cex is not None:
            raise NotImplicitlyDefined(*_split_window(cex.window, p, q))
        raise S.UnsupportedFormula(
            f"{p} is not locally defined by the formula and no bounded counterexample exists")
    if not local.exact:
        raise S.UnsupportedFormula("definability could only be checked on bounded windows")
    C = interpolate(S.And(A, P), S.Imp(A2, Q), vq, max_len).formula
    post = check_valid(S.Imp(A, S.Iff(P, C)), vocab, max_len)
    if not post.valid:
        raise VerificationError(f"definition fails at {post.witness}")
    return Definition(C, post.exact)


__all__ = [
    "Decision", "Definition", "ImplicationInvalid", "Interpolant", "NotImplicitlyDefined",
    "ReactivityForm", "ValidityReport", "beth_define", "check_valid", "component_nba",
    "decide_separated", "exists_elim", "exists_elim_introspective", "fin_formula",
    "finitely_many_prefixes", "interpolate", "reactivity_normal_form", "streett_pairs",
    "strongest_consequence",
]
