"""Formula <-> automaton translation.

* :func:`itl_to_dfa` compiles introspective formulas clause by clause;
* :func:`dfa_to_formula` goes back by state elimination through a small
  regular-expression IR;
* :func:`future_to_nba` builds Büchi automata for future formulas anchored
  at a point.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import automata as au
from . import syntax as S
from .automata import Dfa, Nba
from .syntax import Formula


class NotIntrospective(ValueError):
    pass


class NotFutureFormula(ValueError):
    pass


# ================================================================ ITL -> DFA

def state_predicate(w: Formula, vocab: Sequence[str]):
    """Evaluate a state formula on a letter code."""
    vocab = tuple(vocab)

    def ev(g: Formula, c: int) -> bool:
        k = g.kind
        if k == S.VAR:
            return bool(c >> vocab.index(g.name) & 1)
        if k == S.TRUE:
            return True
        if k == S.FALSE:
            return False
        if k == S.NOT:
            return not ev(g.args[0], c)
        if k == S.AND:
            return ev(g.args[0], c) and ev(g.args[1], c)
        if k == S.OR:
            return ev(g.args[0], c) or ev(g.args[1], c)
        if k == S.IMP:
            return (not ev(g.args[0], c)) or ev(g.args[1], c)
        if k == S.IFF:
            return ev(g.args[0], c) == ev(g.args[1], c)
        raise ValueError(f"{S.render(w)} is not a state formula")

    return lambda c: ev(w, c)


def letters_of(w: Formula, vocab: Sequence[str]) -> frozenset[int]:
    pred = state_predicate(w, vocab)
    return frozenset(c for c in range(2 ** len(vocab)) if pred(c))


def itl_to_dfa(A: Formula, vocab: Sequence[str] | None = None) -> Dfa:
    """Minimal DFA of the intervals satisfying introspective ``A``."""
    if vocab is None:
        vocab = tuple(sorted(S.free_vars(A))) or ("p",)
    vocab = tuple(vocab)
    missing = S.free_vars(A) - set(vocab)
    if missing:
        raise au.VocabularyMismatch(f"variables {sorted(missing)} not in vocabulary")
    return _compile(A, vocab)


@lru_cache(maxsize=20000)
def _compile(A: Formula, vocab: tuple) -> Dfa:
    k = A.kind
    a = A.args
    if k == S.FALSE:
        return au.dfa_const(vocab, False)
    if k == S.TRUE:
        return au.dfa_const(vocab, True)
    if k == S.VAR:
        bit = vocab.index(A.name)
        return au.dfa_first_letter(vocab, lambda c: bool(c >> bit & 1))
    if k == S.NOT:
        return au.complement(_compile(a[0], vocab))
    if k in (S.AND, S.OR, S.IMP, S.IFF):
        kind = {S.AND: "intersection", S.OR: "union", S.IMP: "implies", S.IFF: "iff"}[k]
        return au.combine(kind, _compile(a[0], vocab), _compile(a[1], vocab))
    if k == S.EMPTY:
        return au.dfa_length(vocab, 1)
    if k == S.SKIP:
        return au.dfa_length(vocab, 2)
    if k == S.NEXT:
        d = _compile(a[0], vocab)
        n, m = d.delta.shape
        # n: fresh initial, n+1: non-accepting copy of d's initial state
        delta = np.vstack([d.delta, np.full((1, m), n + 1), d.delta[d.initial][None, :]])
        acc = np.append(d.accepting, [False, False])
        return au.minimize(Dfa(vocab, delta, n, acc))
    if k == S.PREV:
        d = _compile(a[0], vocab)
        return au.determinize_minimize(au.strict_concat(d, au.dfa_length(vocab, 1)))
    if k == S.CHOP:
        return au.determinize_minimize(au.fusion_concat(_compile(a[0], vocab), _compile(a[1], vocab)))
    if k == S.STAR:
        return au.determinize_minimize(au.fusion_star(_compile(a[0], vocab)))
    if k == S.DIA:
        return au.determinize_minimize(au.fusion_concat(au.dfa_const(vocab, True), _compile(a[0], vocab)))
    if k == S.DI:
        return au.determinize_minimize(au.fusion_concat(_compile(a[0], vocab), au.dfa_const(vocab, True)))
    if k in (S.BOX, S.BI, S.FIN):
        return _compile(S.desugar_step(A), vocab)
    if k == S.EXISTS:
        p = A.name
        inner_vocab = vocab if p in vocab else vocab + (p,)
        d = _compile(a[0], inner_vocab)
        closed = au.determinize_minimize(au.relabel_dont_care(d, p))
        return closed if p in vocab else au.drop_var(closed, p)
    if k == S.PROJ:
        return _compile_proj(a[0], a[1], vocab)
    if k == S.PROJINV:
        from .projection import pi_inverse_dfa
        return pi_inverse_dfa(a[0], a[1], vocab)
    raise NotIntrospective(f"cannot compile {k} node: {S.render(A)}")


def _compile_proj(w: Formula, body: Formula, vocab: tuple) -> Dfa:
    keep = letters_of(w, vocab)
    d = _compile(body, vocab)
    n, m = d.delta.shape
    delta = np.empty((n + 1, m), dtype=np.int32)
    for c in range(m):
        if c in keep:
            delta[:n, c] = d.delta[:, c]
            delta[n, c] = d.delta[d.initial, c]
        else:
            delta[:n, c] = np.arange(n)
            delta[n, c] = n
    return au.minimize(Dfa(vocab, delta, n, np.append(d.accepting, False)))


# ================================================================ DFA -> ITL
# Regular expressions over letters; each label is (eps, regex) where regex
# is None for the empty language.

@dataclass(frozen=True)
class Chars:
    letters: frozenset


@dataclass(frozen=True)
class Cat:
    items: tuple


@dataclass(frozen=True)
class Alt:
    items: frozenset


@dataclass(frozen=True)
class Plus:
    body: object


def r_alt(x, y):
    if x is None:
        return y
    if y is None or x == y:
        return x
    if isinstance(x, Chars) and isinstance(y, Chars):
        return Chars(x.letters | y.letters)
    items = set()
    for z in (x, y):
        items.update(z.items if isinstance(z, Alt) else (z,))
    chars = [z for z in items if isinstance(z, Chars)]
    if len(chars) > 1:
        merged = Chars(frozenset().union(*(z.letters for z in chars)))
        items = {z for z in items if not isinstance(z, Chars)} | {merged}
    if len(items) == 1:
        return next(iter(items))
    return Alt(frozenset(items))


def r_cat(x, y):
    if x is None or y is None:
        return None
    items = []
    for z in (x, y):
        items.extend(z.items if isinstance(z, Cat) else (z,))
    return Cat(tuple(items))


def e_alt(a, b):
    return (a[0] or b[0], r_alt(a[1], b[1]))


def e_cat(a, b):
    eps = a[0] and b[0]
    r = r_cat(a[1], b[1])
    if a[0]:
        r = r_alt(r, b[1])
    if b[0]:
        r = r_alt(r, a[1])
    return (eps, r)


def e_star(a):
    return (True, None if a[1] is None else Plus(a[1]))


def dfa_to_regex(d: Dfa):
    """ε-free regular expression for ``L(d)`` (``None`` if empty)."""
    n = d.n_states
    reach = au.reachable_states(d.delta, d.initial)
    # co-reachable to an accepting state
    alive = d.accepting.copy()
    changed = True
    while changed:
        new = alive | alive[d.delta].any(axis=1)
        changed = bool((new != alive).any())
        alive = new
    live = [q for q in range(n) if reach[q] and alive[q]]
    if not live:
        return None
    S_, T_ = -1, -2
    edges: dict[tuple[int, int], tuple] = {}

    def add(p, q, lab):
        edges[(p, q)] = e_alt(edges.get((p, q), (False, None)), lab)

    liveset = set(live)
    if d.initial in liveset:
        add(S_, d.initial, (True, None))
    for q in live:
        for c in range(d.n_letters):
            r = int(d.delta[q, c])
            if r in liveset:
                add(q, r, (False, Chars(frozenset([c]))))
        if d.accepting[q]:
            add(q, T_, (True, None))
    remaining = list(live)
    while remaining:
        def degree(q):
            ins = sum(1 for (p, r) in edges if r == q and p != q)
            outs = sum(1 for (p, r) in edges if p == q and r != q)
            return (ins + outs, q)

        k = min(remaining, key=degree)
        remaining.remove(k)
        loop = edges.pop((k, k), None)
        ins = [(p, lab) for (p, r), lab in edges.items() if r == k]
        outs = [(r, lab) for (p, r), lab in edges.items() if p == k]
        for p, _ in ins:
            del edges[(p, k)]
        for r, _ in outs:
            del edges[(k, r)]
        mid = e_star(loop) if loop is not None else None
        for p, lin in ins:
            for r, lout in outs:
                path = e_cat(lin, e_cat(mid, lout)) if mid is not None else e_cat(lin, lout)
                add(p, r, path)
    final = edges.get((S_, T_), (False, None))
    return final[1]


# ---- letter sets as state formulas

def _prime_implicants(minterms: set[int], nvars: int) -> list[tuple[int, int]]:
    """Quine-McCluskey: implicants as (value, mask-of-fixed-bits)."""
    full = (1 << nvars) - 1
    current = {(m, full) for m in minterms}
    primes = set()
    while current:
        nxt = set()
        used = set()
        cl = list(current)
        for i in range(len(cl)):
            for j in range(i + 1, len(cl)):
                (v1, m1), (v2, m2) = cl[i], cl[j]
                if m1 != m2:
                    continue
                diff = (v1 ^ v2) & m1
                if diff and diff & (diff - 1) == 0:
                    nxt.add((v1 & ~diff & m1, m1 & ~diff))
                    used.add(cl[i])
                    used.add(cl[j])
        primes |= current - used
        current = nxt
    return sorted(primes, key=lambda t: (-bin(t[1]).count("0"), t))


def _covers(imp: tuple[int, int], m: int) -> bool:
    v, mask = imp
    return (m & mask) == v


def letter_set_formula(letters: frozenset, vocab: Sequence[str]) -> Formula:
    """A small state formula true exactly on the given letters."""
    return _letter_set_formula(frozenset(letters), tuple(vocab))


@lru_cache(maxsize=4096)
def _letter_set_formula(letters: frozenset, vocab: tuple) -> Formula:
    n = len(vocab)
    total = 2 ** n
    letters = set(letters)
    if not letters:
        return S.FALSE_F
    if len(letters) == total:
        return S.TRUE_F
    primes = _prime_implicants(letters, n)
    chosen = []
    uncovered = set(letters)
    while uncovered:
        best = max(primes, key=lambda im: (sum(1 for m in uncovered if _covers(im, m)),
                                           -bin(im[1]).count("1")))
        chosen.append(best)
        uncovered = {m for m in uncovered if not _covers(best, m)}
    terms = []
    for v, mask in chosen:
        lits = []
        for b, p in enumerate(vocab):
            if mask >> b & 1:
                lits.append(S.Var(p) if v >> b & 1 else S.Not(S.Var(p)))
        terms.append(S.conj(*lits))
    return S.disj(*terms)


def regex_to_formula(r, vocab: Sequence[str]) -> Formula:
    total = 2 ** len(vocab)
    if r is None:
        return S.FALSE_F
    if isinstance(r, Chars):
        chi = letter_set_formula(r.letters, vocab)
        return S.EMPTY_F if len(r.letters) == total else S.conj(chi, S.EMPTY_F)
    if isinstance(r, Alt):
        return _alt_formula(r, vocab)
    if isinstance(r, Plus):
        body = r.body
        if isinstance(body, Chars):
            if len(body.letters) == total:
                return S.TRUE_F
            return S.Box(letter_set_formula(body.letters, vocab))
        f = regex_to_formula(body, vocab)
        return S.Chop(S.ChopStar(S.Chop(f, S.SKIP_F)), f)
    if isinstance(r, Cat):
        items = list(r.items)
        head = items[0]
        if len(items) == 1:
            return regex_to_formula(head, vocab)
        rest = Cat(tuple(items[1:])) if len(items) > 2 else items[1]
        if isinstance(head, Chars):
            chi = letter_set_formula(head.letters, vocab)
            return S.conj(chi, S.Next(regex_to_formula(rest, vocab)))
        last = items[-1]
        init = Cat(tuple(items[:-1])) if len(items) > 2 else items[0]
        if isinstance(last, Chars):
            chi = letter_set_formula(last.letters, vocab)
            prev = S.Prev(regex_to_formula(init, vocab))
            return prev if chi.kind == S.TRUE else S.And(prev, S.Fin(chi))
        return S.strict_seq(regex_to_formula(head, vocab), regex_to_formula(rest, vocab))
    raise TypeError(r)


def _split_head(r):
    """``(letters, tail)`` for items starting with a one-letter class;
    ``tail`` is ``None`` for the bare letter class."""
    if isinstance(r, Chars):
        return r.letters, None
    if isinstance(r, Cat) and isinstance(r.items[0], Chars):
        rest = r.items[1:]
        return r.items[0].letters, (rest[0] if len(rest) == 1 else Cat(rest))
    return None, None


def _alt_formula(r: Alt, vocab) -> Formula:
    # group alternatives sharing a leading letter class:
    # c | c.X | c.Y  ->  chi_c & (empty | next (X | Y))
    groups: dict[frozenset, list] = {}
    others = []
    for x in r.items:
        head, tail = _split_head(x)
        if head is None:
            others.append(x)
        else:
            groups.setdefault(head, []).append(tail)
    parts = [regex_to_formula(x, vocab) for x in others]
    for head, tails in groups.items():
        has_eps = any(t is None for t in tails)
        rest = None
        for t in tails:
            if t is not None:
                rest = r_alt(rest, t)
        if rest is None:
            parts.append(regex_to_formula(Chars(head), vocab))
            continue
        cont = S.Next(regex_to_formula(rest, vocab))
        if has_eps:
            cont = S.TRUE_F if cont.args[0].kind == S.TRUE else S.Or(S.EMPTY_F, cont)
        parts.append(S.conj(letter_set_formula(head, vocab), cont))
    return S.disj(*sorted(parts, key=S.render))


def dfa_to_formula(d: Dfa) -> Formula:
    """Introspective formula defining ``L(d)``.

    Both ``L(d)`` and its complement go through state elimination; the
    smaller of the direct formula and the negated complement is returned.
    """
    direct = regex_to_formula(dfa_to_regex(d), d.vocab)
    other = S.neg(regex_to_formula(dfa_to_regex(au.complement(d)), d.vocab))
    return other if S.size(other) < S.size(direct) else direct


# ================================================================ future -> NBA

DEFAULT_OMEGA_GUARD = 40


def _shannon(G: Formula, atoms: list[Formula]):
    """Yield ``(assignment, residual)`` for assignments to ``atoms`` whose
    residual is not syntactically false."""

    def go(g, i, chosen):
        if g.kind == S.FALSE:
            return
        present = set(S.subformulas(g))
        while i < len(atoms) and atoms[i] not in present:
            i += 1
        if i == len(atoms):
            yield chosen, g
            return
        a = atoms[i]
        for v in (True, False):
            yield from go(S.assign_atoms(g, {a: v}), i + 1, {**chosen, a: v})

    yield from go(S.simplify_bool(G), 0, {})


def _reach_nba(d: Dfa, positive: bool) -> Nba:
    """Deterministic Büchi automaton for "some non-empty prefix is in
    ``L(d)``" (or its complement): the DFA with an absorbing sink entered on
    acceptance."""
    n = d.n_states
    sink = n
    succ = []
    for q in range(n):
        succ.append([1 << (sink if d.accepting[r] else int(r)) for r in d.delta[q]])
    succ.append([1 << sink] * d.n_letters)
    acc = (1 << sink) if positive else (1 << sink) - 1
    return Nba(d.vocab, succ, 1 << d.initial, acc)


_POINT_HINTS: dict[Formula, tuple[tuple, Nba, Nba]] = {}
_HINT_LIMIT = 4096


def register_point_automata(F: Formula, pos: Nba, neg: Nba) -> None:
    """Record exact Büchi automata for the ω-words satisfying future ``F``
    at ``(0, 0)`` and for their complement.

    Constructions that already hold an automaton for a formula they emit
    register it here, so compiling that formula again skips the generic
    complementation. Keys are normalized formulas, hence exact.
    """
    from .semantics import normalize_future

    G = normalize_future(F)
    if G.kind != S.DR:
        G = normalize_future(S.DiamondR(S.And(S.EMPTY_F, F)))
    if len(_POINT_HINTS) >= _HINT_LIMIT:
        _POINT_HINTS.clear()
    _POINT_HINTS[G.args[0]] = (pos.vocab, pos, neg)


def _hint(G: Formula, vocab: tuple, positive: bool) -> Nba | None:
    hit = _POINT_HINTS.get(G)
    if hit is None or not set(hit[0]) <= set(vocab):
        return None
    return au.nba_with_vocab(hit[1] if positive else hit[2], vocab)


class OmegaCompiler:
    """Memoizing builder of Büchi automata for future formulas."""

    def __init__(self, vocab: Sequence[str], guard: int = DEFAULT_OMEGA_GUARD):
        self.vocab = tuple(vocab)
        self.guard = guard
        self.memo: dict[tuple[Formula, bool], Nba] = {}

    def diamond(self, G: Formula, positive: bool = True) -> Nba:
        """ω-words σ with ``σ,0,0 ⊨ <r> G`` (or its negation)."""
        key = (G, positive)
        if key in self.memo:
            return self.memo[key]
        hinted = _hint(G, self.vocab, positive)
        if hinted is not None:
            res = au.nba_trim(hinted)
        elif S.is_introspective(G):
            res = au.nba_trim(_reach_nba(_compile(G, self.vocab), positive))
        elif positive:
            from .semantics import future_atoms
            _, modal = future_atoms(G)
            out = None
            for chosen, residual in _shannon(G, modal):
                d = _compile(residual, self.vocab)
                if au.is_empty(d):
                    continue
                tail = au.nba_universal(self.vocab)
                for M, v in chosen.items():
                    tail = au.nba_intersection(tail, self.diamond(M.args[0], v))
                part = au.fusion_dfa_nba(d, tail)
                out = part if out is None else au.nba_union(out, part)
            res = au.nba_trim(out) if out is not None else au.nba_empty(self.vocab)
        else:
            res = au.nba_trim(au.nba_complement(self.diamond(G, True), self.guard))
        self.memo[key] = res
        return res

    def point(self, F: Formula) -> Nba:
        """ω-words σ with ``σ,0,0 ⊨ F``."""
        return self.diamond(S.And(S.EMPTY_F, F))


def future_to_nba(F: Formula, vocab: Sequence[str] | None = None,
                  guard: int = DEFAULT_OMEGA_GUARD) -> Nba:
    """Büchi automaton for the ω-words satisfying future ``F`` at ``(0, 0)``."""
    from .semantics import NotFuture, normalize_future

    if vocab is None:
        vocab = tuple(sorted(S.free_vars(F))) or ("p",)
    try:
        G = normalize_future(F)
    except NotFuture as e:
        raise NotFutureFormula(str(e)) from None
    return OmegaCompiler(vocab, guard).point(G)
