"""Independent reference computations used by the test-suite.

They avoid the constructions under test: ∃ is decided by brute force on
the reference interval and by relabeled Büchi automata (no
determinization) on the two lasso contexts.
"""
from __future__ import annotations

import itertools
from typing import Iterable, Sequence

from itlnl import automata as au
from itlnl import syntax as S
from itlnl.compile import OmegaCompiler
from itlnl.syntax import Formula
from itlnl.semantics import (ContextEvaluator, ContextWord, Lasso, Window,
                             enumerate_lassos, holds, letter_code, letter_set, normalize_future)


def lasso_codes(L: Lasso, vocab: Sequence[str]) -> tuple[list[int], list[int]]:
    return ([letter_code(s, vocab) for s in L.stem], [letter_code(s, vocab) for s in L.loop])


def context_lassos(vocab: Sequence[str], size: int = 3) -> list[Lasso]:
    """Distinct ω-words given by lassos with ``|stem| + |loop| <= size``."""
    out = []
    for L in enumerate_lassos(vocab, size - 1, size):
        if len(L.stem) + len(L.loop) <= size:
            out.append(L)
    return out


def words(vocab: Sequence[str], max_len: int) -> Iterable[tuple]:
    letters = [letter_set(c, vocab) for c in range(2 ** len(vocab))]
    for n in range(1, max_len + 1):
        yield from itertools.product(letters, repeat=n)


class ExistsOracle:
    """Truth of ``exists ps. A`` for separated ``A`` on context words over
    a vocabulary without ``ps``."""

    def __init__(self, ps: Sequence[str], A: Formula, vocab: Sequence[str]):
        self.ps = tuple(ps)
        self.full = tuple(sorted(set(vocab) | set(ps) | S.free_vars(A)))
        self.ev = ContextEvaluator(A, self.full)
        self.comp = OmegaCompiler(self.full)
        self._past = self._signs([S.DiamondR(S.Chop(S.SKIP_F, S.time_reverse(a.args[0].args[0])))
                                  for a in self.ev.past])
        self._future = self._signs(self.ev.future)

    def _signs(self, atoms) -> dict[tuple, object]:
        """One relabeled Büchi automaton per truth vector of the atoms."""
        out = {}
        for vec in itertools.product((True, False), repeat=len(atoms)):
            n = au.nba_universal(self.full)
            for atom, v in zip(atoms, vec):
                G = normalize_future(S.DiamondR(atom.args[0].args[1]))
                n = au.nba_intersection(n, self.comp.diamond(G.args[0], v))
            for p in self.ps:
                n = au.relabel_dont_care(n, p)
            out[vec] = au.nba_trim(n)
        return out

    def past_set(self, left: Lasso) -> frozenset:
        u, v = lasso_codes(left, self.full)
        return frozenset(k for k, n in self._past.items() if au.nba_lasso_accepts(n, u, v))

    def future_set(self, right: Lasso) -> frozenset:
        u, v = lasso_codes(right, self.full)
        return frozenset(k for k, n in self._future.items() if au.nba_lasso_accepts(n, u, v))

    def intro_set(self, center: Sequence[frozenset]) -> frozenset:
        n = len(center)
        out = set()
        for bits in itertools.product(*[[(), (p,)] for p in self.ps for _ in range(n)]):
            states = []
            for x in range(n):
                extra = set()
                for k, p in enumerate(self.ps):
                    extra |= set(bits[k * n + x])
                states.append(frozenset((center[x] - set(self.ps)) | extra))
            W = Window(tuple(states), 0, n - 1)
            out.add(tuple(holds(W, a) for a in self.ev.intro))
        return frozenset(out)

    def combine(self, ps, is_, fs) -> bool:
        return any(self.ev.combine(a, b, c) for a in ps for b in is_ for c in fs)

    def __call__(self, cw: ContextWord) -> bool:
        return self.combine(self.past_set(cw.left), self.intro_set(cw.center),
                            self.future_set(cw.right))


def context_mismatch(ps: Sequence[str], A, result, vocab: Sequence[str], max_len: int = 5,
                     context: int = 3):
    """First context word (center ``<= max_len``, lassos of size
    ``<= context``) where ``result`` and brute-force ``exists ps. A``
    differ, or ``None``.

    Truth values factor through the per-part signatures, so each part is
    evaluated once and the product is taken over distinct signatures.
    """
    vocab = tuple(v for v in vocab if v not in ps)
    oracle = ExistsOracle(ps, A, vocab)
    ev = ContextEvaluator(result, oracle.full)
    lassos = context_lassos(vocab, context)

    def classes(items, key):
        out = {}
        for x in items:
            out.setdefault(key(x), x)
        return out

    lefts = classes(lassos, lambda L: (ev.past_vector(L), oracle.past_set(L)))
    rights = classes(lassos, lambda L: (ev.future_vector(L), oracle.future_set(L)))
    centers = classes(words(vocab, max_len), lambda c: (ev.intro_vector(c), oracle.intro_set(c)))
    for (lv, ls), L in lefts.items():
        for (cv, cs), c in centers.items():
            for (rv, rs), R in rights.items():
                if ev.combine(lv, cv, rv) != oracle.combine(ls, cs, rs):
                    return ContextWord(L, c, R)
    return None



def context_difference(A, B, vocab: Sequence[str], max_len: int = 5, context: int = 3):
    """First context word where separated ``A`` and ``B`` differ, or ``None``."""
    vocab = tuple(vocab)
    ea, eb = ContextEvaluator(A, vocab), ContextEvaluator(B, vocab)
    lassos = context_lassos(vocab, context)

    def classes(items, key):
        out = {}
        for x in items:
            out.setdefault(key(x), x)
        return out

    lefts = classes(lassos, lambda L: (ea.past_vector(L), eb.past_vector(L)))
    rights = classes(lassos, lambda L: (ea.future_vector(L), eb.future_vector(L)))
    centers = classes(words(vocab, max_len), lambda c: (ea.intro_vector(c), eb.intro_vector(c)))
    for (la, lb), L in lefts.items():
        for (ca, cb), c in centers.items():
            for (ra, rb), R in rights.items():
                if ea.combine(la, ca, ra) != eb.combine(lb, cb, rb):
                    return ContextWord(L, c, R)
    return None


def naive_holds(states: Sequence[frozenset], i: int, j: int, A: Formula) -> bool:
    """Clause-by-clause evaluation on a finite window, written without the
    batched tables: chop tries every split point, chop-star every chain of
    split points and ``exists`` every relabeling of the window."""
    states = tuple(frozenset(s) for s in states)
    memo: dict = {}

    def ev(st, A, i, j) -> bool:
        key = (st, A, i, j)
        if key not in memo:
            memo[key] = clause(st, A, i, j)
        return memo[key]

    def clause(st, A, i, j) -> bool:
        k = A.kind
        a = A.args
        if k == S.FALSE:
            return False
        if k == S.VAR:
            return A.name in st[i]
        if k == S.IMP:
            return (not ev(st, a[0], i, j)) or ev(st, a[1], i, j)
        if k == S.NEXT:
            return i < j and ev(st, a[0], i + 1, j)
        if k == S.CHOP:
            return any(ev(st, a[0], i, m) and ev(st, a[1], m, j) for m in range(i, j + 1))
        if k == S.STAR:
            if i == j:
                return True
            return any(ev(st, a[0], i, m) and ev(st, A, m, j) for m in range(i + 1, j + 1))
        if k == S.DR:
            return any(ev(st, a[0], j, m) for m in range(j, len(st)))
        if k == S.DL:
            return any(ev(st, a[0], m, i) for m in range(0, i + 1))
        if k == S.EXISTS:
            p = A.name
            for bits in itertools.product((False, True), repeat=len(st)):
                relabeled = tuple((s - {p}) | ({p} if b else set()) for s, b in zip(st, bits))
                if ev(relabeled, a[0], i, j):
                    return True
            return False
        if k == S.PROJ:
            kept = tuple(s for s in st[i:j + 1] if _state(a[0], s))
            return bool(kept) and ev(kept, a[1], 0, len(kept) - 1)
        if k == S.PROJINV:
            raise ValueError("naive_holds does not evaluate projinv")
        return ev(st, S.desugar_step(A), i, j)

    return ev(states, A, i, j)


def _state(w: Formula, letter: frozenset) -> bool:
    return naive_holds((letter,), 0, 0, w)
