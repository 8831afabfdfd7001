"""Normal forms of introspective formulas.

Everything here is read off minimal DFAs and then checked by recompiling
the produced formulas, so a returned normal form is always exactly
equivalent to its source.

* guarded normal forms (future and past);
* full-system chop decompositions, plain and strict, with their mirror
  images, plus the syntactic strictification through guarded forms;
* w-closure equation systems, an Arden-style solver and the w-block
  normal form, with checkers for the block grammars.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np

from . import automata as au
from . import syntax as S
from .automata import Dfa
from .compile import (NotIntrospective, dfa_to_formula, itl_to_dfa, letter_set_formula,
                      letters_of)
from .syntax import Formula


class VerificationError(AssertionError):
    """A constructed normal form failed its exact equivalence check.

    This always indicates a bug; results are never returned unverified.
    """


class GrammarError(ValueError):
    pass


def _vocab(formulas: Sequence[Formula], vocab) -> tuple[str, ...]:
    if vocab is not None:
        return tuple(vocab)
    names: set[str] = set()
    for f in formulas:
        names |= S.free_vars(f)
    return tuple(sorted(names)) or ("p",)


def _require_introspective(A: Formula) -> None:
    if not S.is_introspective(A) or S.has_input_only(A):
        raise NotIntrospective(f"expected an introspective formula: {S.render(A)}")


def _require_state(w: Formula) -> None:
    if not S.is_state_formula(w):
        raise ValueError(f"expected a state formula: {S.render(w)}")


def _check_equal(f: Formula, d: Dfa, what: str) -> None:
    got = itl_to_dfa(f, d.vocab)
    cex = au.dfa_counterexample(got, d)
    if cex is not None:
        word = " ".join(au.format_code(c, d.vocab) for c in cex)
        raise VerificationError(f"{what} differs on the word {word}")


def _check_full_system(dfas: Sequence[Dfa], what: str) -> None:
    """Pairwise disjoint and jointly covering all non-empty words."""
    if not dfas:
        raise VerificationError(f"{what}: empty system")
    acc = dfas[0]
    for d in dfas[1:]:
        if not au.is_empty(au.intersection(acc, d)):
            raise VerificationError(f"{what}: members overlap")
        acc = au.union(acc, d)
    if not au.is_universal(acc):
        raise VerificationError(f"{what}: members do not cover every interval")


# ================================================================ GNF

@dataclass(frozen=True)
class GuardedNormalForm:
    """``A_e & empty | OR_k A_k & next A_k'`` (future) or
    ``A_e & empty | OR_k prev A_k' & fin A_k`` (past)."""

    empty_part: Formula
    branches: tuple[tuple[Formula, Formula], ...]
    direction: str

    def formula(self) -> Formula:
        parts = [S.conj(self.empty_part, S.EMPTY_F)]
        for guard, cont in self.branches:
            if self.direction == "future":
                parts.append(S.conj(guard, S.Next(cont)))
            else:
                parts.append(S.conj(S.Prev(cont), S.Fin(guard)))
        return S.disj(*parts)

    def universal(self) -> Formula:
        """``(empty -> A_e) & AND_k (A_k & ~empty -> next A_k')``."""
        parts = [S.Imp(S.EMPTY_F, self.empty_part)]
        for guard, cont in self.branches:
            if self.direction == "future":
                parts.append(S.Imp(S.conj(guard, S.Not(S.EMPTY_F)), S.Next(cont)))
            else:
                parts.append(S.Imp(S.conj(S.Fin(guard), S.Not(S.EMPTY_F)), S.Prev(cont)))
        return S.conj(*parts)


def _gnf_parts(d: Dfa) -> tuple[frozenset, list[tuple[frozenset, Dfa]]]:
    """One-letter acceptance and coarsest letter classes with their
    derivative automata."""
    first = d.delta[d.initial]
    one = frozenset(c for c in range(d.n_letters) if d.accepting[first[c]])
    groups: dict[tuple, list] = {}
    for c in range(d.n_letters):
        der = au.reroot(d, int(first[c]))
        groups.setdefault(au.dfa_key(der), [set(), der])[0].add(c)
    return one, [(frozenset(g), der) for g, der in groups.values()]


def gnf(A: Formula, direction: str = "future", vocab=None) -> GuardedNormalForm:
    """Coarsest guarded normal form of introspective ``A``.

    ``direction="past"`` guards the last state instead; it is computed on
    the mirror-image automaton.
    """
    _require_introspective(A)
    if direction not in ("future", "past"):
        raise ValueError(f"unknown direction {direction!r}")
    vocab = _vocab([A], vocab)
    d = itl_to_dfa(A, vocab)
    src = d if direction == "future" else au.reverse_dfa(d)
    one, groups = _gnf_parts(src)
    branches = []
    for letters, der in sorted(groups, key=lambda g: min(g[0])):
        if direction == "past":
            der = au.reverse_dfa(der)
        branches.append((letter_set_formula(letters, vocab), dfa_to_formula(der)))
    out = GuardedNormalForm(letter_set_formula(one, vocab), tuple(branches), direction)
    _check_equal(out.formula(), d, "guarded normal form")
    _check_equal(out.universal(), d, "universal guarded form")
    return out


# ================================================================ full-system chop

FLAVORS = ("nonstrict", "strict", "mirror", "mirror-strict")


@dataclass(frozen=True)
class FullSystemDecomposition:
    """The pairs ``(A_k, A_k')`` with ``A_1..A_K`` a full system.

    ``nonstrict``: ``A == OR A_k ; A_k'``;
    ``strict``: ``A == A_e & empty | OR A_k ; skip ; A_k'``;
    the mirror flavors read ``A_k' ; A_k`` with the full system on the
    right-hand side.
    """

    empty_part: Formula
    pairs: tuple[tuple[Formula, Formula], ...]
    flavor: str

    @property
    def strict(self) -> bool:
        return self.flavor.endswith("strict") and self.flavor != "nonstrict"

    @property
    def mirrored(self) -> bool:
        return self.flavor.startswith("mirror")

    def _glue(self, guard: Formula, other: Formula) -> Formula:
        left, right = (other, guard) if self.mirrored else (guard, other)
        if self.strict:
            return S.strict_seq(left, right)
        return S.seq(left, right)

    def disjunctive(self) -> Formula:
        parts = [S.conj(self.empty_part, S.EMPTY_F)] if self.strict else []
        parts += [self._glue(g, o) for g, o in self.pairs]
        return S.disj(*parts)

    def conjunctive(self) -> Formula:
        parts = [S.Imp(S.EMPTY_F, self.empty_part)] if self.strict else []
        parts += [S.Not(self._glue(g, S.neg(o))) for g, o in self.pairs]
        return S.conj(*parts)

    def guards(self) -> list[Formula]:
        return [g for g, _ in self.pairs]


def _verify_decomposition(dec: FullSystemDecomposition, d: Dfa) -> None:
    _check_equal(dec.disjunctive(), d, f"{dec.flavor} disjunctive form")
    _check_equal(dec.conjunctive(), d, f"{dec.flavor} conjunctive form")
    _check_full_system([itl_to_dfa(g, d.vocab) for g in dec.guards()], f"{dec.flavor} guards")


def _decompose_dfa(d: Dfa, strict: bool) -> tuple[frozenset, list[tuple[Dfa, Dfa]]]:
    one = frozenset(c for c in range(d.n_letters) if d.accepting[d.delta[d.initial, c]])
    pairs = []
    for q in range(d.n_states):
        pre = au.prefix_dfa(d, q)
        if au.is_empty(pre):
            continue
        post = au.reroot(d, q) if strict else au.reroot_shared(d, q)
        pairs.append((pre, post))
    return one, pairs


def full_system_chop(A: Formula, flavor: str = "nonstrict", vocab=None) -> FullSystemDecomposition:
    """Chop decomposition of introspective ``A`` over the prefix classes of
    its minimal DFA (the mirror flavors use the reversed automaton)."""
    _require_introspective(A)
    if flavor not in FLAVORS:
        raise ValueError(f"unknown flavor {flavor!r}")
    vocab = _vocab([A], vocab)
    d = itl_to_dfa(A, vocab)
    mirrored = flavor.startswith("mirror")
    strict = flavor in ("strict", "mirror-strict")
    src = au.reverse_dfa(d) if mirrored else d
    one, pairs = _decompose_dfa(src, strict)
    out = []
    for pre, post in pairs:
        if mirrored:
            pre, post = au.reverse_dfa(pre), au.reverse_dfa(post)
        out.append((dfa_to_formula(pre), dfa_to_formula(post)))
    dec = FullSystemDecomposition(letter_set_formula(one, vocab), tuple(out), flavor)
    _verify_decomposition(dec, d)
    return dec


def elementary_conjunctions(formulas: Sequence[Formula], vocab) -> list[tuple[frozenset, Formula]]:
    """The satisfiable elementary conjunctions ``AND_{n in Z} X_n & AND_{n not in Z} ~X_n``.

    Returned as ``(Z, formula)``; cells are split one formula at a time and
    empty cells are dropped (checked by DFA emptiness).
    """
    vocab = tuple(vocab)
    cells: list[tuple[frozenset, list[Formula], Dfa]] = [(frozenset(), [], au.dfa_const(vocab, True))]
    for n, X in enumerate(formulas):
        dx = itl_to_dfa(X, vocab)
        nxt = []
        for Z, lits, cell in cells:
            yes = au.intersection(cell, dx)
            no = au.difference(cell, dx)
            if not au.is_empty(yes):
                nxt.append((Z | {n}, lits + [X], yes))
            if not au.is_empty(no):
                nxt.append((Z, lits + [S.neg(X)], no))
        cells = nxt
    return [(Z, S.conj(*lits)) for Z, lits, _ in cells]


def strictify_syntactic(A: Formula, dec: FullSystemDecomposition, vocab=None) -> FullSystemDecomposition:
    """Strict decomposition derived from a plain one through guarded forms.

    Each ``A_k`` is split by a past guarded form and each ``A_k'`` by a
    future one; the pieces left of ``; skip ;`` are then refined into
    elementary conjunctions to restore a full system.
    """
    if dec.flavor != "nonstrict":
        raise ValueError("strictify_syntactic expects a nonstrict decomposition")
    _require_introspective(A)
    vocab = _vocab([A] + [f for pair in dec.pairs for f in pair], vocab)
    d = itl_to_dfa(A, vocab)
    _verify_decomposition(dec, d)

    empty_parts = []
    xs: list[Formula] = []
    ys: list[Formula] = []
    for Ak, Akp in dec.pairs:
        G = gnf(Ak, "past", vocab)
        H = gnf(Akp, "future", vocab)
        empty_parts.append(S.conj(G.empty_part, H.empty_part))
        for guard, cont in G.branches:
            xs.append(cont)
            ys.append(S.conj(guard, H.empty_part, S.EMPTY_F))
        for guard, cont in H.branches:
            xs.append(S.conj(Ak, S.Fin(guard)))
            ys.append(cont)
    # drop pieces that cannot contribute
    keep = [n for n in range(len(xs))
            if not au.is_empty(itl_to_dfa(xs[n], vocab)) and not au.is_empty(itl_to_dfa(ys[n], vocab))]
    xs = [xs[n] for n in keep]
    ys = [ys[n] for n in keep]
    pairs = []
    for Z, cell in elementary_conjunctions(xs, vocab):
        pairs.append((cell, S.disj(*[ys[n] for n in sorted(Z)])))
    # A_e is a state formula: read it off the letters it admits
    ae = S.disj(*empty_parts)
    one = letters_of(S.simplify_bool(ae), vocab) if S.is_state_formula(ae) else None
    empty_part = letter_set_formula(one, vocab) if one is not None else ae
    out = FullSystemDecomposition(empty_part, tuple(pairs), "strict")
    _verify_decomposition(out, d)
    auto = full_system_chop(A, "strict", vocab)
    if not au.dfa_equivalent(itl_to_dfa(auto.disjunctive(), vocab), itl_to_dfa(out.disjunctive(), vocab)):
        raise VerificationError("syntactic and automaton strict forms disagree")
    return out


# ================================================================ equations

@dataclass
class Equation:
    """``X == closed | OR_l coeff_l ; X_l``.

    ``closed`` maps each tail formula ``H`` to ``(bare, prefix)``: the
    closed part is the disjunction of ``H`` (when ``bare``) and
    ``prefix ; H`` (when ``prefix`` is not ``None``).
    """

    closed: dict[Formula, tuple[bool, Formula | None]] = field(default_factory=dict)
    terms: dict[Hashable, Formula] = field(default_factory=dict)

    def copy(self) -> "Equation":
        return Equation(dict(self.closed), dict(self.terms))

    def add_closed(self, H: Formula, bare: bool = False, prefix: Formula | None = None) -> None:
        if H.kind == S.FALSE or (prefix is not None and prefix.kind == S.FALSE):
            if not bare:
                return
            prefix = None
        ob, op = self.closed.get(H, (False, None))
        if prefix is not None:
            op = prefix if op is None else S.disj(op, prefix)
        self.closed[H] = (ob or bare, op)

    def add_term(self, X: Hashable, coeff: Formula) -> None:
        if coeff.kind == S.FALSE:
            return
        old = self.terms.get(X)
        self.terms[X] = coeff if old is None else S.disj(old, coeff)

    def closed_formula(self, select=None) -> Formula:
        parts = []
        for H, (bare, prefix) in self.closed.items():
            if select is not None and not select(H):
                continue
            if bare:
                parts.append(H)
            if prefix is not None:
                parts.append(S.Chop(prefix, H))
        return S.disj(*parts)


@dataclass
class EquationSystem:
    """Unknowns with right-hand sides of the canonical shape."""

    equations: dict[Hashable, Equation]
    order: list[Hashable] = field(default_factory=list)

    def __post_init__(self):
        if not self.order:
            self.order = list(self.equations)

    @classmethod
    def from_formulas(cls, spec: dict[Hashable, tuple[Formula, list[tuple[Formula, Hashable]]]]) -> "EquationSystem":
        """Build from ``{X: (R, [(R_l, X_l), ...])}`` with ``R`` a closed formula."""
        eqs = {}
        for X, (R, terms) in spec.items():
            e = Equation()
            e.add_closed(R, bare=True)
            for coeff, Y in terms:
                if Y not in spec:
                    raise ValueError(f"unknown {Y!r} has no equation")
                e.add_term(Y, coeff)
            eqs[X] = e
        return cls(eqs, list(spec))


def _chop(a: Formula, b: Formula) -> Formula:
    if a.kind == S.FALSE or b.kind == S.FALSE:
        return S.FALSE_F
    return S.Chop(a, b)


def _arden(e: Equation, X: Hashable) -> Equation:
    """Remove the self-loop: ``X == R | R1;X | ...`` becomes
    ``X == R1* ; R | R1* ; ...``."""
    loop = S.ChopStar(e.terms[X])
    out = Equation()
    for H, (bare, prefix) in e.closed.items():
        parts = []
        if bare:
            parts.append(loop)
        if prefix is not None:
            parts.append(_chop(loop, prefix))
        out.add_closed(H, prefix=S.disj(*parts))
    for Y, coeff in e.terms.items():
        if Y != X:
            out.add_term(Y, _chop(loop, coeff))
    return out


def _substitute(target: Equation, X: Hashable, e: Equation) -> Equation:
    """Replace the ``coeff ; X`` term of ``target`` by ``coeff ; rhs(X)``
    and regroup by tail."""
    coeff = target.terms[X]
    out = Equation(dict(target.closed), {Y: c for Y, c in target.terms.items() if Y != X})
    for H, (bare, prefix) in e.closed.items():
        parts = []
        if bare:
            parts.append(coeff)
        if prefix is not None:
            parts.append(_chop(coeff, prefix))
        out.add_closed(H, prefix=S.disj(*parts))
    for Y, c in e.terms.items():
        out.add_term(Y, _chop(coeff, c))
    return out


def solve_system(system: EquationSystem) -> dict[Hashable, Equation]:
    """Closed-form right-hand sides (no unknowns left) for every unknown."""
    eqs = {X: e.copy() for X, e in system.equations.items()}
    index = {X: n for n, X in enumerate(system.order)}
    remaining = list(system.order)
    eliminated: list[Hashable] = []
    for X in remaining:
        for Y in eqs[X].terms:
            if Y not in eqs:
                raise ValueError(f"unknown {Y!r} has no equation")
    while remaining:
        X = min(remaining, key=lambda u: (len(set(eqs[u].terms) - {u}), index[u]))
        if X in eqs[X].terms:
            eqs[X] = _arden(eqs[X], X)
        for Y in remaining:
            if Y != X and X in eqs[Y].terms:
                eqs[Y] = _substitute(eqs[Y], X, eqs[X])
        remaining.remove(X)
        eliminated.append(X)
    solved: dict[Hashable, Equation] = {}
    for X in reversed(eliminated):
        e = eqs[X]
        for Y in list(e.terms):
            e = _substitute(e, Y, solved[Y])
        solved[X] = e
    return solved


def solve_equations(system: EquationSystem) -> dict[Hashable, Formula]:
    """Solve by elimination, fewest dependencies first (ties by order)."""
    return {X: e.closed_formula() for X, e in solve_system(system).items()}


# ================================================================ w-closures

@dataclass(frozen=True)
class WTransition:
    block: Formula      # B_k, read inside a box-eps-w block
    target: tuple       # (state, phase) of the continuation unknown


@dataclass(frozen=True)
class WEquation:
    """``B & eps w == (B^box & box eps w) | OR_k (B_k & box eps w);skip;(B_k' & ~eps w)``."""

    key: tuple
    member: Formula
    homogeneous: Formula | None
    transitions: tuple[WTransition, ...]
    dead_ends: tuple[Formula, ...] = ()   # blocks after which no continuation is possible


@dataclass(frozen=True)
class WBlockSystem:
    w: Formula
    vocab: tuple
    members: dict        # (state, phase) -> B
    equations: dict      # (state, phase) -> WEquation
    initial: int
    dfa_states: int

    def phase_formula(self, positive: bool) -> Formula:
        return self.w if positive else S.Not(self.w)

    def block(self, body: Formula, positive: bool) -> Formula:
        return S.And(body, S.Box(self.phase_formula(positive)))

    def closure(self, positive: bool) -> list[Formula]:
        return [self.members[k] for k in self.members if k[1] == positive]

    def lhs(self, key) -> Formula:
        return S.And(self.members[key], self.phase_formula(key[1]))

    def rhs(self, key) -> Formula:
        eq = self.equations[key]
        pos = key[1]
        parts = []
        if eq.homogeneous is not None:
            parts.append(self.block(eq.homogeneous, pos))
        for t in eq.transitions:
            parts.append(S.strict_seq(self.block(t.block, pos), self.lhs(t.target)))
        return S.disj(*parts)

    def rhs_conjunctive(self, key) -> Formula:
        """The dual reading
        ``eps w & (box eps w -> B^box) & AND_k ~(block_k ; skip ; (~B_k' & ~eps w))``.

        The phase conjuncts are needed: without ``eps w`` intervals in the
        wrong phase satisfy every conjunct vacuously, and without the phase
        guard on the right a block could be split inside a longer run of
        its own phase. Dead-end blocks contribute ``~(block ; skip ; ~eps w)``.
        """
        eq = self.equations[key]
        pos = key[1]
        other = self.phase_formula(not pos)
        parts = [self.phase_formula(pos),
                 S.Imp(S.Box(self.phase_formula(pos)),
                       eq.homogeneous if eq.homogeneous is not None else S.FALSE_F)]
        for t in eq.transitions:
            tail = S.And(S.Not(self.members[t.target]), other)
            parts.append(S.Not(S.strict_seq(self.block(t.block, pos), tail)))
        for blk in eq.dead_ends:
            parts.append(S.Not(S.strict_seq(self.block(blk, pos), other)))
        return S.conj(*parts)


def w_closure_system(A: Formula, w: Formula, vocab=None, verify: bool = True) -> WBlockSystem:
    """Closures ``Cl^w(A)``, ``Cl^~w(A)`` and their block equations.

    Unknowns are ``(q, phase)``: the language accepted from DFA state ``q``
    restricted to intervals starting in ``phase``. A maximal block of
    ``phase`` letters leads from ``q`` to some ``r``, after which the
    interval continues in the opposite phase from ``r``.
    """
    _require_introspective(A)
    _require_state(w)
    vocab = _vocab([A, w], vocab)
    d = itl_to_dfa(A, vocab)
    wl = letters_of(w, vocab)
    nl = frozenset(range(2 ** len(vocab))) - wl
    phase_letters = {True: wl, False: nl}

    lang = {q: au.reroot(d, q) for q in range(d.n_states)}

    def live(q: int, pos: bool) -> bool:
        return bool(phase_letters[pos]) and not au.is_empty(
            au.intersection(lang[q], Dfa(vocab, *_first_letter_in(vocab, phase_letters[pos]))))

    members: dict = {}
    equations: dict = {}
    todo = [(d.initial, True), (d.initial, False)]
    while todo:
        key = todo.pop(0)
        if key in equations:
            continue
        q, pos = key
        letters = phase_letters[pos]
        members[key] = dfa_to_formula(lang[q])
        homo = au.restrict_letters(lang[q], letters)
        homogeneous = None if au.is_empty(homo) else dfa_to_formula(homo)
        transitions = []
        dead = []
        for r in range(d.n_states):
            acc = np.zeros(d.n_states, dtype=bool)
            acc[r] = True
            blk = au.restrict_letters(Dfa(vocab, d.delta, q, acc), letters)
            if au.is_empty(blk):
                continue
            if not live(r, not pos):
                dead.append(dfa_to_formula(blk))
                continue
            transitions.append(WTransition(dfa_to_formula(blk), (r, not pos)))
            if (r, not pos) not in equations:
                todo.append((r, not pos))
        equations[key] = WEquation(key, members[key], homogeneous, tuple(transitions), tuple(dead))
    system = WBlockSystem(w, vocab, members, equations, d.initial, d.n_states)
    if verify:
        for key in equations:
            target = itl_to_dfa(system.lhs(key), vocab)
            _check_equal(system.rhs(key), target, f"block equation for {key}")
            _check_equal(system.rhs_conjunctive(key), target, f"dual block equation for {key}")
    return system


def _first_letter_in(vocab, letters):
    """Arguments of a DFA for non-empty words whose first letter is in ``letters``."""
    m = 2 ** len(vocab)
    delta = np.array([[1 if c in letters else 2 for c in range(m)], [1] * m, [2] * m], dtype=np.int32)
    return delta, 0, [1]


def _phase_of_block(H: Formula, w: Formula) -> bool:
    box = H.args[1]
    return box.args[0] == w


def w_block_equations(system: WBlockSystem) -> EquationSystem:
    eqs = {}
    for key, eq in system.equations.items():
        e = Equation()
        if eq.homogeneous is not None:
            e.add_closed(system.block(eq.homogeneous, key[1]), bare=True)
        for t in eq.transitions:
            e.add_term(t.target, S.Chop(system.block(t.block, key[1]), S.SKIP_F))
        eqs[key] = e
    return EquationSystem(eqs, list(system.equations))


@dataclass(frozen=True)
class WBlockForm:
    """``w & (R++ | R+-) | ~w & (R-+ | R--)`` with ``R^{a,b}`` the intervals
    starting in phase ``a`` and ending in phase ``b``."""

    w: Formula
    signatures: dict     # (start, end) -> Formula
    formula: Formula


def w_block_normal_form(A: Formula, w: Formula, vocab=None) -> Formula:
    return w_block_form(A, w, vocab).formula


def w_block_form(A: Formula, w: Formula, vocab=None) -> WBlockForm:
    """Equivalent of ``A`` assembled from maximal ``box w`` / ``box ~w``
    blocks; exact equivalence and grammar membership are checked."""
    system = w_closure_system(A, w, vocab)
    vocab = system.vocab
    solved = solve_system(w_block_equations(system))
    sigs = {}
    top = []
    for start in (True, False):
        e = solved[(system.initial, start)]
        halves = []
        for end in (True, False):
            f = e.closed_formula(lambda H, end=end: _phase_of_block(H, w) == end)
            sigs[(start, end)] = f
            halves.append(f)
        body = S.disj(*halves)
        if body.kind != S.FALSE:
            top.append(S.And(system.phase_formula(start), body))
    out = WBlockForm(w, sigs, S.disj(*top))
    _check_equal(out.formula, itl_to_dfa(A, vocab), "w-block normal form")
    check_block_form(out.formula, w)
    for H in block_leaves(out.formula, w):
        check_block(H, w, vocab)
    return out


# ================================================================ grammar checks

def _block_phase(f: Formula, w: Formula) -> bool | None:
    """Phase of an ``H`` block ``B & box eps w``, else ``None``."""
    if f.kind != S.AND or f.args[1].kind != S.BOX:
        return None
    inner = f.args[1].args[0]
    if inner == w:
        return True
    if inner == S.Not(w):
        return False
    return None


def _r0_signatures(f: Formula, w: Formula, positive_only: bool) -> set[tuple[bool, bool]]:
    """Signatures ``(start, end)`` of ``f`` read as an ``R_0`` formula."""
    k = f.kind
    if k == S.CHOP and f.args[1] == S.SKIP_F:
        ph = _block_phase(f.args[0], w)
        if ph is not None and not (positive_only and not ph):
            return {(ph, ph)}
    if k == S.OR:
        a = _r0_signatures(f.args[0], w, positive_only)
        b = _r0_signatures(f.args[1], w, positive_only)
        return a & b if not positive_only else (a | b if a and b else set())
    if k == S.CHOP:
        a = _r0_signatures(f.args[0], w, positive_only)
        b = _r0_signatures(f.args[1], w, positive_only)
        if positive_only:
            return {(True, True)} if a and b else set()
        return {(s, e2) for s, e1 in a for s2, e2 in b if s2 != e1}
    if k == S.STAR:
        a = _r0_signatures(f.args[0], w, positive_only)
        if positive_only:
            return a
        return {(s, e) for s, e in a if s != e}
    return set()


def _r_signatures(f: Formula, w: Formula, positive_only: bool) -> set[tuple[bool, bool]]:
    ph = _block_phase(f, w)
    if ph is not None:
        return set() if positive_only and not ph else {(ph, ph)}
    if f.kind == S.OR:
        a = _r_signatures(f.args[0], w, positive_only)
        b = _r_signatures(f.args[1], w, positive_only)
        return a & b if not positive_only else (a | b if a and b else set())
    if f.kind == S.CHOP:
        ph = _block_phase(f.args[1], w)
        if ph is None:
            return set()
        pre = _r0_signatures(f.args[0], w, positive_only)
        if positive_only:
            return {(True, True)} if pre and ph else set()
        return {(s, ph) for s, e in pre if e != ph}
    return set()


def r_signatures(f: Formula, w: Formula) -> set[tuple[bool, bool]]:
    """Signatures under which ``f`` is an ``R^{a,b}`` formula of the
    maximal-block grammar (empty set: not in the grammar)."""
    return _r_signatures(f, w, False)


def check_block_form(f: Formula, w: Formula) -> None:
    """Check ``f`` has the shape ``w & R+ | ~w & R-`` where each ``R`` is a
    disjunction of ``R^{eps,_}`` formulas of the maximal-block grammar.

    ``false`` (no blocks at all) is accepted.
    """
    if f.kind == S.FALSE:
        return
    for part in _disjuncts(f):
        if part.kind != S.AND or part.args[0] not in (w, S.Not(w)):
            raise GrammarError(f"top-level disjunct is not guarded by the phase: {S.render(part)}")
        start = part.args[0] == w
        for piece in _disjuncts(part.args[1]):
            sigs = r_signatures(piece, w)
            if not any(s == start for s, _ in sigs):
                raise GrammarError(f"not a block formula starting in phase {start}: {S.render(piece)}")


def check_reg_pos(f: Formula, w: Formula) -> None:
    """Check ``f`` is in the positive block grammar: ``H | R_0 ; H | R | R``
    with every block of the form ``B & box w``. ``false`` is accepted."""
    if f.kind == S.FALSE:
        return
    if not _r_signatures(f, w, True):
        raise GrammarError(f"not a positive block formula: {S.render(f)}")


def _disjuncts(f: Formula) -> list[Formula]:
    if f.kind == S.OR:
        return _disjuncts(f.args[0]) + _disjuncts(f.args[1])
    return [f]


def block_leaves(f: Formula, w: Formula) -> list[Formula]:
    """All ``H`` blocks of a block-grammar formula."""
    out = []

    def walk(g: Formula) -> None:
        if _block_phase(g, w) is not None:
            if g not in out:
                out.append(g)
            return
        for x in g.args:
            walk(x)

    for part in _disjuncts(f):
        walk(part.args[1] if part.kind == S.AND and part.args[0] in (w, S.Not(w)) else part)
    return out


def check_block(H: Formula, w: Formula, vocab) -> None:
    """A block is satisfiable and only uses letters of its phase."""
    vocab = tuple(vocab)
    ph = _block_phase(H, w)
    d = itl_to_dfa(H, vocab)
    if au.is_empty(d):
        raise GrammarError(f"unsatisfiable block {S.render(H)}")
    letters = letters_of(w, vocab)
    if not ph:
        letters = frozenset(range(2 ** len(vocab))) - letters
    if not au.dfa_subset(d, au.letters_dfa(vocab, letters)):
        raise GrammarError(f"block leaves its phase: {S.render(H)}")
