"""Acceptance sweeps, one test per criterion.

Each ``criterion_N`` returns ``(ok, detail)``; the pytest wrappers record
a one-line verdict that ``conftest.py`` prints in the terminal summary.
Run directly (``python3 tests/test_acceptance.py``) to print the lines
without pytest.
"""
from __future__ import annotations

import itertools
import os
import sys
import time

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from itlnl import automata as au  # noqa: E402
from itlnl import normal_forms as nf  # noqa: E402
from itlnl import syntax as S  # noqa: E402
from itlnl.compile import dfa_to_formula, future_to_nba, itl_to_dfa, letters_of  # noqa: E402
from itlnl.generators import (random_dfa, random_formula, random_future_formula, random_nba,  # noqa: E402
                              random_separated_formula, random_state_formula, rng_from,
                              strictly_future)
from itlnl.omega import (beth_define, check_valid, exists_elim, fin_formula,  # noqa: E402
                         finitely_many_prefixes, interpolate, reactivity_normal_form)
from itlnl.projection import pi_inverse_dfa, pi_inverse_eliminate  # noqa: E402
from itlnl.semantics import (LassoEvaluator, all_words, enumerate_lassos, eval_lasso,  # noqa: E402
                             tables_for_length)
from oracles import context_difference, context_mismatch, lasso_codes, naive_holds, words  # noqa: E402

V1 = ("p",)
V2 = ("p", "q")
VOCABS = (V1, V2)

VERDICTS: dict[int, str] = {}


def vocab_for(k: int) -> tuple:
    """Mostly two variables, every third case one."""
    return V1 if k % 3 == 2 else V2


def same(a, b) -> bool:
    return au.dfa_equivalent(a, b)


def is_full_system(formulas, vocab) -> bool:
    ds = [itl_to_dfa(f, vocab) for f in formulas]
    for a, b in itertools.combinations(ds, 2):
        if not au.is_empty(au.intersection(a, b)):
            return False
    acc = au.dfa_const(vocab, False)
    for d in ds:
        acc = au.union(acc, d)
    return au.is_universal(acc)


def word_list(vocab, max_len: int):
    """All words up to ``max_len`` as code lists."""
    m = 2 ** len(vocab)
    return [list(map(int, w)) for n in range(1, max_len + 1) for w in all_words(m, n)]


# ------------------------------------------------------------------ 1

def criterion_1(n: int = 100) -> tuple[bool, str]:
    rng = rng_from(1001)
    bad = 0
    for k in range(n):
        d = random_dfa(rng, vocab_for(k), int(rng.integers(1, 5)))
        if not same(itl_to_dfa(dfa_to_formula(d), d.vocab), d):
            bad += 1
    return bad == 0, f"{n} random minimal DFAs, {bad} round-trip failures"


# ------------------------------------------------------------------ 2

def criterion_2(n: int = 500, max_len: int = 5) -> tuple[bool, str]:
    rng = rng_from(1002)
    mismatches = 0
    windows = 0
    for k in range(n):
        vocab = vocab_for(k)
        A = random_formula(rng, vocab, int(rng.integers(1, 5)))
        d = itl_to_dfa(A, vocab)
        m = 2 ** len(vocab)
        for length in range(1, max_len + 1):
            ws = all_words(m, length)
            table = tables_for_length(A, vocab, length)
            for i in range(length):
                for j in range(i, length):
                    got = d.accepts_batch(ws[:, i:j + 1])
                    mismatches += int(np.count_nonzero(got != table[:, i, j]))
                    windows += len(ws)
    return mismatches == 0, f"{n} formulas, {windows} windows, {mismatches} mismatches"


# ------------------------------------------------------------------ 3

def criterion_3(n: int = 200) -> tuple[bool, str]:
    rng = rng_from(1003)
    bad = []
    for k in range(n):
        vocab = vocab_for(k)
        A = random_formula(rng, vocab, int(rng.integers(1, 4)))
        dA = itl_to_dfa(A, vocab)
        try:
            for flavor in nf.FLAVORS:
                dec = nf.full_system_chop(A, flavor, vocab)
                if not (same(itl_to_dfa(dec.disjunctive(), vocab), dA)
                        and same(itl_to_dfa(dec.conjunctive(), vocab), dA)
                        and is_full_system(dec.guards(), vocab)):
                    bad.append((k, flavor))
            plain = nf.full_system_chop(A, "nonstrict", vocab)
            strict = nf.strictify_syntactic(A, plain, vocab)
            auto = nf.full_system_chop(A, "strict", vocab)
            if not (same(itl_to_dfa(strict.disjunctive(), vocab), itl_to_dfa(auto.disjunctive(), vocab))
                    and same(itl_to_dfa(strict.conjunctive(), vocab), dA)
                    and is_full_system(strict.guards(), vocab)):
                bad.append((k, "strictify"))
        except nf.VerificationError as e:
            bad.append((k, str(e)))
    return not bad, f"{n} formulas x 4 flavors + strictify, {len(bad)} failures {bad[:3]}"


# ------------------------------------------------------------------ 4

def criterion_4(n: int = 100) -> tuple[bool, str]:
    rng = rng_from(1004)
    bad = []
    for k in range(n):
        vocab = vocab_for(k)
        A = random_formula(rng, vocab, int(rng.integers(1, 4)))
        w = random_state_formula(rng, vocab, 2)
        try:
            system = nf.w_closure_system(A, w, vocab)
            if len(system.members) > 2 * system.dfa_states:
                bad.append((k, "closure size"))
            f = nf.w_block_normal_form(A, w, vocab)
            if not same(itl_to_dfa(f, vocab), itl_to_dfa(A, vocab)):
                bad.append((k, "not equivalent"))
            nf.check_block_form(f, w)
            wl = letters_of(w, vocab)
            others = frozenset(range(2 ** len(vocab))) - wl
            for H in nf.block_leaves(f, w):
                d = itl_to_dfa(H, vocab)
                letters = wl if nf._block_phase(H, w) else others
                if au.is_empty(d) or not same(au.restrict_letters(d, letters), d):
                    bad.append((k, "block"))
        except (nf.VerificationError, nf.GrammarError) as e:
            bad.append((k, str(e)))
    return not bad, f"{n} (A, w) pairs, {len(bad)} failures {bad[:3]}"


# ------------------------------------------------------------------ 5

def _project(word, wl):
    return [c for c in word if c in wl]


def criterion_5(n: int = 200, max_len: int = 5) -> tuple[bool, str]:
    rng = rng_from(1005)
    bad = []
    checked = 0
    for k in range(n):
        vocab = vocab_for(k)
        A = random_formula(rng, vocab, int(rng.integers(1, 4)))
        B = random_formula(rng, vocab, 2)
        w = random_state_formula(rng, vocab, 2)
        try:
            oracle = pi_inverse_dfa(w, A, vocab)
            if not same(itl_to_dfa(pi_inverse_eliminate(w, A, vocab), vocab), oracle):
                bad.append((k, "elimination"))
        except (nf.VerificationError, nf.GrammarError) as e:
            bad.append((k, str(e)))
            continue
        # the four transformation laws
        bw = S.And(B, S.Box(w))
        if not same(pi_inverse_dfa(w, bw, vocab), itl_to_dfa(bw, vocab)):
            bad.append((k, "law 1"))
        if not au.is_empty(pi_inverse_dfa(w, S.And(B, S.Box(S.Not(w))), vocab)):
            bad.append((k, "law 2"))
        head = S.And(B, S.Box(S.Not(w)))
        lhs = pi_inverse_dfa(w, S.strict_seq(head, S.And(A, w)), vocab)
        rhs = (au.dfa_const(vocab, False) if au.is_empty(itl_to_dfa(head, vocab))
               else pi_inverse_dfa(w, S.And(A, w), vocab))
        if not same(lhs, rhs):
            bad.append((k, "law 3"))
        if not same(pi_inverse_dfa(w, S.Or(A, B), vocab),
                    au.union(oracle, pi_inverse_dfa(w, B, vocab))):
            bad.append((k, "law 4"))
        # relativized round trips on every window up to max_len
        wl = letters_of(w, vocab)
        there = pi_inverse_dfa(w, S.Proj(w, A), vocab)
        m = 2 ** len(vocab)
        for length in range(1, max_len + 1):
            ws = all_words(m, length)
            boxed = tables_for_length(S.And(A, S.Box(w)), vocab, length)[:, 0, length - 1]
            some = tables_for_length(S.And(A, S.Diamond(w)), vocab, length)[:, 0, length - 1]
            for x, word in enumerate(ws):
                word = list(map(int, word))
                if there.accepts(word) != bool(boxed[x]):
                    bad.append((k, "round trip 1", word))
                if some[x]:
                    kept = _project(word, wl)
                    if not (kept and oracle.accepts(kept)):
                        bad.append((k, "round trip 2", word))
                checked += 1
    return not bad, f"{n} (w, A) pairs, 4 laws, {checked} windows, {len(bad)} failures {bad[:3]}"


# ------------------------------------------------------------------ 6

def naive_finitely_many(X, L) -> bool:
    u, v = lasso_codes(L, X.vocab)
    T = len(u) + X.n_states * len(v)
    word = u + v * (2 * X.n_states + 1)
    q = X.initial
    for n, a in enumerate(word, start=1):
        q = int(X.delta[q, a])
        if n > T and X.accepting[q]:
            return False
    return True


def criterion_6(n_dfa: int = 50, n_nba: int = 50) -> tuple[bool, str]:
    rng = rng_from(1006)
    lassos = {v: list(enumerate_lassos(v, 3, 3)) for v in VOCABS}
    bad_fin = bad_react = total = 0
    for k in range(n_dfa):
        vocab = vocab_for(k)
        X = random_dfa(rng, vocab, int(rng.integers(1, 4)))
        ev = LassoEvaluator(fin_formula(X), vocab)
        for L in lassos[vocab]:
            exact = finitely_many_prefixes(X, L)
            bad_fin += int(ev(L) != exact or exact != naive_finitely_many(X, L))
            total += 1
    for k in range(n_nba):
        vocab = vocab_for(k)
        N = random_nba(rng, vocab, int(rng.integers(1, 4)))
        ev = LassoEvaluator(reactivity_normal_form(N).formula(), vocab)
        for L in lassos[vocab]:
            bad_react += int(ev(L) != au.nba_lasso_accepts(N, *lasso_codes(L, vocab)))
            total += 1
    ok = bad_fin == 0 and bad_react == 0
    return ok, (f"{n_dfa} DFAs + {n_nba} NBAs, {total} lasso checks, "
                f"{bad_fin} Fin / {bad_react} reactivity mismatches")


# ------------------------------------------------------------------ 7

def criterion_7(n_intro: int = 50, n_sep: int = 20, n_future: int = 30,
                max_len: int = 5, context: int = 3) -> tuple[bool, str]:
    rng = rng_from(1007)
    bad = []
    for k in range(n_intro):
        A = random_formula(rng, V2, int(rng.integers(1, 4)))
        R = exists_elim("p", A, V2)
        closure = au.determinize_minimize(au.relabel_dont_care(itl_to_dfa(A, V2), "p"))
        if "p" in S.free_vars(R) or not same(itl_to_dfa(R, V2), closure):
            bad.append((k, "closure"))
        E = S.Exists("p", A)
        for w in words(("q",), max_len):
            if naive_holds(w, 0, len(w) - 1, E) != naive_holds(w, 0, len(w) - 1, R):
                bad.append((k, "window", w))
                break
    for k in range(n_sep):
        A = random_separated_formula(rng, V2, n_future=1 + k % 2, n_past=k % 3 == 0, intro_depth=2)
        R = exists_elim("p", A, V2)
        cw = context_mismatch(("p",), A, R, V2, max_len=max_len, context=context)
        if "p" in S.free_vars(R) or cw is not None:
            bad.append((k, "separated", str(cw)))
    qlassos = list(enumerate_lassos(("q",), 3, 3))
    for k in range(n_future):
        F = strictly_future(random_future_formula(rng, V2, 1, 2))
        R = exists_elim("p", F, V2)
        relabeled = au.relabel_dont_care(future_to_nba(F, V2), "p")
        for L in qlassos:
            want = au.nba_lasso_accepts(relabeled, *lasso_codes(L, V2))
            if eval_lasso(L, R, V2) != want:
                bad.append((k, "future lasso", L))
                break
    return not bad, (f"{n_intro} introspective, {n_sep} separated (windows <= {max_len}, "
                     f"context <= {context}), {n_future} future; {len(bad)} failures {bad[:3]}")


# ------------------------------------------------------------------ 8

def _dfa_valid(f, vocab) -> bool:
    return au.is_universal(itl_to_dfa(f, vocab))


def criterion_8(n_interp: int = 100, n_beth: int = 50) -> tuple[bool, str]:
    rng = rng_from(1008)
    qr = ("q", "r")
    bad = []
    flagged = 0
    for k in range(n_interp):
        # A = E & D implies B = D | X, with the hidden p only in E
        E = random_formula(rng, V2, 2)
        if k % 4 == 3:
            D = S.And(random_formula(rng, qr, 2), strictly_future(random_formula(rng, qr, 2)))
        else:
            D = random_formula(rng, qr, 3)
        A = S.And(E, D)
        B = S.Or(D, random_formula(rng, qr, 2))
        vocab = ("p", "q", "r")
        if not check_valid(S.Imp(A, B), vocab).valid:
            continue
        ip = interpolate(A, B, vocab)
        C = ip.formula
        if not S.free_vars(C) <= S.free_vars(A) & S.free_vars(B):
            bad.append((k, "variables"))
        if ip.unverified:
            flagged += 1
        if S.is_introspective(A) and S.is_introspective(B):
            if not (_dfa_valid(S.Imp(A, C), vocab) and _dfa_valid(S.Imp(C, B), vocab)):
                bad.append((k, "implication"))
        elif not (check_valid(S.Imp(A, C), vocab).valid and check_valid(S.Imp(C, B), vocab).valid):
            bad.append((k, "implication"))
    for k in range(n_beth):
        if k % 5 == 4:
            C0 = strictly_future(random_formula(rng, qr, 2))
        else:
            C0 = random_formula(rng, qr, 3)
        A = S.Iff(S.Var("p"), C0)
        C = beth_define(A, "p", ("p", "q", "r")).formula
        if "p" in S.free_vars(C):
            bad.append((k, "beth variables"))
        elif S.is_introspective(C0) and S.is_introspective(C):
            if not same(itl_to_dfa(C, qr), itl_to_dfa(C0, qr)):
                bad.append((k, "beth"))
        elif context_difference(C, C0, qr, max_len=4, context=3) is not None:
            bad.append((k, "beth"))
    return not bad, (f"{n_interp} implications ({flagged} flagged bounded), {n_beth} planted "
                     f"definitions, {len(bad)} failures {bad[:3]}")


# ------------------------------------------------------------------ 9

def criterion_9(n: int = 100) -> tuple[bool, str]:
    rng = rng_from(1009)
    lassos = {v: list(enumerate_lassos(v, 3, 3)) for v in VOCABS}
    bad = 0
    for k in range(n):
        vocab = vocab_for(k)
        N = random_nba(rng, vocab, int(rng.integers(1, 5)))
        d = au.nba_determinize(N)
        for L in lassos[vocab]:
            u, v = lasso_codes(L, vocab)
            if au.dpa_lasso_accepts(d, u, v) != au.nba_lasso_accepts(N, u, v):
                bad += 1
        comp = au.dpa_to_nba(au.dpa_complement(d))
        if not au.nba_is_empty(au.nba_intersection(N, comp)):
            bad += 1
    return bad == 0, f"{n} random NBAs, {bad} failures"


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9}


def _run(k: int) -> tuple[bool, str]:
    start = time.perf_counter()
    ok, detail = CRITERIA[k]()
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'} ({detail}; {time.perf_counter() - start:.1f}s)"
    VERDICTS[k] = line
    return ok, line


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k):
    ok, line = _run(k)
    assert ok, line


if __name__ == "__main__":
    failed = 0
    for k in sorted(CRITERIA):
        ok, line = _run(k)
        print(line, flush=True)
        failed += not ok
    sys.exit(1 if failed else 0)
