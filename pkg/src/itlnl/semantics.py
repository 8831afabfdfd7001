"""Reference evaluators.

Two evaluators live here:

* a finite-window evaluator that follows the defining clauses literally,
  vectorised over a batch of windows of equal length, and
* an exact evaluator of future formulas on ultimately periodic words.

The neighbourhood modalities range over the window only, so window truth
values of non-introspective formulas are bounded approximations.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import syntax as S
from .syntax import Formula

Letter = frozenset

DEFAULT_BUDGET = 8
PER_GAP_LIMIT = 4


@dataclass(frozen=True)
class Window:
    """A finite stretch of states with a reference interval ``[i, j]``."""

    states: tuple
    i: int
    j: int

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(frozenset(s) for s in self.states))
        if not self.states:
            raise ValueError("a window needs at least one state")
        if not 0 <= self.i <= self.j < len(self.states):
            raise ValueError(f"reference ({self.i}, {self.j}) outside window of length {len(self.states)}")

    def __len__(self) -> int:
        return len(self.states)

    def __str__(self) -> str:
        return " ".join(format_letter(s) for s in self.states) + f" # ref {self.i} {self.j}"


@dataclass(frozen=True)
class Lasso:
    """The ultimately periodic word ``stem . loop . loop ...``."""

    stem: tuple
    loop: tuple

    def __post_init__(self):
        object.__setattr__(self, "stem", tuple(frozenset(s) for s in self.stem))
        object.__setattr__(self, "loop", tuple(frozenset(s) for s in self.loop))
        if not self.loop:
            raise ValueError("the loop of a lasso must be non-empty")

    def letter(self, k: int) -> frozenset:
        s = len(self.stem)
        return self.stem[k] if k < s else self.loop[(k - s) % len(self.loop)]

    def suffix_class(self, k: int) -> int:
        """Positions with equal class have equal suffixes."""
        s = len(self.stem)
        return k if k < s else s + (k - s) % len(self.loop)

    @property
    def n_classes(self) -> int:
        return len(self.stem) + len(self.loop)

    def __str__(self) -> str:
        return ("stem: " + " ".join(format_letter(s) for s in self.stem)).rstrip() + "\n" + \
            "loop: " + " ".join(format_letter(s) for s in self.loop)


def format_letter(s: Iterable[str], vocab: Sequence[str] | None = None) -> str:
    names = list(s)
    if vocab is not None:
        names = [p for p in vocab if p in s]
    else:
        names.sort()
    return "{" + ",".join(names) + "}"


class NotFuture(ValueError):
    pass


# ------------------------------------------------------------ batched tables

def _upper(n: int) -> np.ndarray:
    return np.triu(np.ones((n, n), dtype=bool))


def _bool_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.matmul(a.astype(np.float32), b.astype(np.float32)) > 0.5


def truth_table(f: Formula, env: dict[str, np.ndarray], budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Truth of ``f`` on every reference pair of a batch of windows.

    ``env`` maps each variable to a ``(B, n)`` boolean array. The result has
    shape ``(B, n, n)``; entry ``[b, i, j]`` is meaningful for ``i <= j`` and
    false below the diagonal.
    """
    arr = next(iter(env.values())) if env else None
    if arr is None:
        raise ValueError("truth_table needs at least one variable in env")
    return _Tables(env, arr.shape[0], arr.shape[1], budget).get(f)


class _Tables:
    def __init__(self, env, batch: int, n: int, budget: int):
        self.env = env
        self.B = batch
        self.n = n
        self.U = _upper(n)
        self.budget = budget
        self.memo: dict[Formula, np.ndarray] = {}

    def full(self, value: bool) -> np.ndarray:
        if value:
            return np.broadcast_to(self.U, (self.B, self.n, self.n)).copy()
        return np.zeros((self.B, self.n, self.n), dtype=bool)

    def get(self, f: Formula) -> np.ndarray:
        t = self.memo.get(f)
        if t is None:
            t = self.compute(f)
            self.memo[f] = t
        return t

    def compute(self, f: Formula) -> np.ndarray:
        k = f.kind
        a = f.args
        U = self.U
        n = self.n
        if k == S.FALSE:
            return self.full(False)
        if k == S.TRUE:
            return self.full(True)
        if k == S.VAR:
            if f.name not in self.env:
                raise KeyError(f"variable {f.name!r} not in vocabulary")
            return self.env[f.name][:, :, None] & U
        if k == S.NOT:
            return U & ~self.get(a[0])
        if k == S.AND:
            return self.get(a[0]) & self.get(a[1])
        if k == S.OR:
            return self.get(a[0]) | self.get(a[1])
        if k == S.IMP:
            return U & (~self.get(a[0]) | self.get(a[1]))
        if k == S.IFF:
            return U & ~(self.get(a[0]) ^ self.get(a[1]))
        if k == S.EMPTY:
            return np.broadcast_to(np.eye(n, dtype=bool), (self.B, n, n)).copy()
        if k == S.SKIP:
            return np.broadcast_to(np.eye(n, k=1, dtype=bool), (self.B, n, n)).copy()
        if k == S.NEXT:
            t = self.get(a[0])
            out = self.full(False)
            out[:, :-1, :] = t[:, 1:, :]
            return out
        if k == S.PREV:
            t = self.get(a[0])
            out = self.full(False)
            out[:, :, 1:] = t[:, :, :-1]
            return out
        if k == S.CHOP:
            return _bool_matmul(self.get(a[0]), self.get(a[1]))
        if k == S.STAR:
            step = self.get(a[0]) & np.triu(np.ones((n, n), dtype=bool), 1)
            reach = np.broadcast_to(np.eye(n, dtype=bool), (self.B, n, n)).copy()
            for _ in range(n):
                nxt = reach | _bool_matmul(step, reach)
                if np.array_equal(nxt, reach):
                    break
                reach = nxt
            return reach
        if k == S.DR:
            row = self.get(a[0]).any(axis=2)  # (B, n): some k >= j
            return row[:, None, :] & U
        if k == S.DL:
            col = self.get(a[0]).any(axis=1)  # (B, n): some k <= i
            return col[:, :, None] & U
        if k == S.DIA:
            return _bool_matmul(np.broadcast_to(U, (self.B, n, n)), self.get(a[0]))
        if k == S.DI:
            return _bool_matmul(self.get(a[0]), np.broadcast_to(U, (self.B, n, n)))
        if k == S.FIN:
            diag = np.diagonal(self.get(a[0]), axis1=1, axis2=2)
            return diag[:, None, :] & U
        if k in (S.BOX, S.BI, S.BL, S.BR, S.BOXA, S.DIAA):
            return self.get(S.desugar_step(f))
        if k == S.EXISTS:
            return self.exists(f.name, a[0])
        if k == S.PROJ:
            return self.per_cell(f, _eval_proj)
        if k == S.PROJINV:
            return self.per_cell(f, lambda w, i, j, g: _eval_projinv(w, i, j, g, self.budget))
        raise S.UnsupportedFormula(k)

    def exists(self, p: str, body: Formula) -> np.ndarray:
        n, B = self.n, self.B
        masks = np.arange(2 ** n)
        bits = ((masks[:, None] >> np.arange(n)[None, :]) & 1).astype(bool)  # (2^n, n)
        env = {}
        for name, arr in self.env.items():
            env[name] = np.repeat(arr, 2 ** n, axis=0)
        env[p] = np.tile(bits, (B, 1))
        sub = _Tables(env, B * 2 ** n, n, self.budget)
        t = sub.get(body)
        return t.reshape(B, 2 ** n, n, n).any(axis=1)

    def per_cell(self, f: Formula, fn) -> np.ndarray:
        out = self.full(False)
        names = list(self.env)
        for b in range(self.B):
            states = [frozenset(p for p in names if self.env[p][b, x]) for x in range(self.n)]
            for i in range(self.n):
                for j in range(i, self.n):
                    out[b, i, j] = fn(f.args[0], i, j, (tuple(states), names, f.args[1]))
        return out


def _state_holds(w: Formula, letter: frozenset) -> bool:
    return _eval_state(w, letter)


def _eval_state(w: Formula, letter: frozenset) -> bool:
    k = w.kind
    if k == S.VAR:
        return w.name in letter
    if k == S.TRUE:
        return True
    if k == S.FALSE:
        return False
    if k == S.NOT:
        return not _eval_state(w.args[0], letter)
    if k == S.AND:
        return _eval_state(w.args[0], letter) and _eval_state(w.args[1], letter)
    if k == S.OR:
        return _eval_state(w.args[0], letter) or _eval_state(w.args[1], letter)
    if k == S.IMP:
        return (not _eval_state(w.args[0], letter)) or _eval_state(w.args[1], letter)
    if k == S.IFF:
        return _eval_state(w.args[0], letter) == _eval_state(w.args[1], letter)
    raise ValueError(f"{S.render(w)} is not a state formula")


def _eval_proj(w: Formula, i: int, j: int, ctx) -> bool:
    states, names, body = ctx
    kept = [s for s in states[i:j + 1] if _eval_state(w, s)]
    if not kept:
        return False
    return _eval_whole(tuple(kept), tuple(names), body, DEFAULT_BUDGET)


def _compositions(total: int, gaps: int, per_gap: int) -> Iterator[tuple[int, ...]]:
    """Ways to split ``total`` fillers over ``gaps`` gaps, at most ``per_gap`` each."""
    if gaps == 0:
        if total == 0:
            yield ()
        return
    for first in range(0, min(per_gap, total) + 1):
        for rest in _compositions(total - first, gaps - 1, per_gap):
            yield (first,) + rest


def _eval_projinv(w: Formula, i: int, j: int, ctx, budget: int) -> bool:
    states, names, body = ctx
    seg = states[i:j + 1]
    if not all(_eval_state(w, s) for s in seg):
        return False
    return _projinv_segment(w, body, tuple(names), tuple(seg), budget)


@lru_cache(maxsize=4096)
def _projinv_segment(w: Formula, body: Formula, names: tuple, seg: tuple, budget: int) -> bool:
    """Is ``seg`` the ``w``-subsequence of a model of ``body`` having at most
    ``budget`` deleted states (at most ``PER_GAP_LIMIT`` per gap)?

    Candidates are tried by increasing number of deleted states.
    """
    fillers = [frozenset(c) for c in _all_letters(names) if not _eval_state(w, frozenset(c))]
    total_cap = budget if fillers else 0
    per_gap = min(PER_GAP_LIMIT, budget)
    gaps = len(seg) + 1
    for total in range(total_cap + 1):
        words = []
        for split in _compositions(total, gaps, per_gap):
            for fill in itertools.product(fillers, repeat=total):
                word: list = []
                pos = 0
                for g, size in enumerate(split):
                    word.extend(fill[pos:pos + size])
                    pos += size
                    if g < len(seg):
                        word.append(seg[g])
                words.append(tuple(word))
        if words and _eval_whole_batch(words, names, body, budget).any():
            return True
    return False


def _all_letters(names: tuple) -> list[tuple]:
    out = []
    for mask in range(2 ** len(names)):
        out.append(tuple(p for b, p in enumerate(names) if mask >> b & 1))
    return out


def _eval_whole(states: tuple, names: tuple, body: Formula, budget: int) -> bool:
    return bool(_eval_whole_batch([states], names, body, budget)[0])


def _eval_whole_batch(words: list, names: tuple, body: Formula, budget: int) -> np.ndarray:
    n = len(words[0])
    env = {p: np.array([[p in s for s in wd] for wd in words], dtype=bool) for p in names}
    t = _Tables(env, len(words), n, budget).get(body)
    return t[:, 0, n - 1]


# ------------------------------------------------------------ window API

def _vocab_of(W: Window, A: Formula) -> tuple[str, ...]:
    names = set(S.all_vars(A))
    for s in W.states:
        names |= s
    return tuple(sorted(names))


def window_env(states: Sequence[frozenset], vocab: Sequence[str]) -> dict[str, np.ndarray]:
    return {p: np.array([[p in s for s in states]], dtype=bool) for p in vocab}


def is_exact_formula(A: Formula) -> bool:
    return S.is_introspective(A) and not any(
        g.kind in (S.EXISTS, S.PROJINV) for g in S.subformulas(A))


def eval_window(W: Window, A: Formula, budget: int = DEFAULT_BUDGET) -> tuple[bool, bool]:
    """Evaluate ``A`` on ``W``; returns ``(truth, exact)``."""
    vocab = _vocab_of(W, A)
    t = _Tables(window_env(W.states, vocab), 1, len(W), budget).get(A)
    return bool(t[0, W.i, W.j]), is_exact_formula(A)


def holds(W: Window, A: Formula, budget: int = DEFAULT_BUDGET) -> bool:
    return eval_window(W, A, budget)[0]


@lru_cache(maxsize=64)
def all_words(n_letters: int, length: int) -> np.ndarray:
    """Every word of ``length`` letters as rows of letter codes, in
    lexicographic order."""
    grids = np.indices((n_letters,) * length).reshape(length, -1).T
    return np.ascontiguousarray(grids)


def words_env(words: np.ndarray, vocab: Sequence[str]) -> dict[str, np.ndarray]:
    return {p: ((words >> b) & 1).astype(bool) for b, p in enumerate(vocab)}


def tables_for_length(A: Formula, vocab: Sequence[str], length: int,
                      budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """Truth tables of ``A`` for all words of the given length."""
    words = all_words(2 ** len(vocab), length)
    return _Tables(words_env(words, vocab), len(words), length, budget).get(A)


def letter_set(code: int, vocab: Sequence[str]) -> frozenset:
    return frozenset(p for b, p in enumerate(vocab) if code >> b & 1)


def letter_code(s: Iterable[str], vocab: Sequence[str]) -> int:
    s = set(s)
    return sum(1 << b for b, p in enumerate(vocab) if p in s)


def ref_pairs(length: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(length) for j in range(i, length)]


def enumerate_models(vocab: Sequence[str], max_len: int) -> Iterator[Window]:
    """Every window of length 1..max_len with every reference pair."""
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    letters = [letter_set(c, vocab) for c in range(2 ** len(vocab))]
    for length in range(1, max_len + 1):
        for word in itertools.product(letters, repeat=length):
            for i, j in ref_pairs(length):
                yield Window(word, i, j)


@dataclass(frozen=True)
class Counterexample:
    window: Window
    left: bool
    right: bool

    def __str__(self) -> str:
        return str(self.window)


def bounded_equiv_check(A: Formula, B: Formula, vocab: Sequence[str], max_len: int = 5,
                        budget: int = DEFAULT_BUDGET) -> Counterexample | None:
    """First window (in enumeration order) where ``A`` and ``B`` differ."""
    vocab = tuple(vocab)
    for length in range(1, max_len + 1):
        ta = tables_for_length(A, vocab, length, budget)
        tb = tables_for_length(B, vocab, length, budget)
        diff = (ta ^ tb) & _upper(length)
        if diff.any():
            flat = [(i, j) for i, j in ref_pairs(length)]
            rows = np.array([i for i, _ in flat])
            cols = np.array([j for _, j in flat])
            cells = diff[:, rows, cols]  # (B, pairs) in enumeration order
            b, k = np.argwhere(cells)[0]
            word = all_words(2 ** len(vocab), length)[b]
            i, j = flat[k]
            W = Window(tuple(letter_set(int(c), vocab) for c in word), i, j)
            return Counterexample(W, bool(ta[b, i, j]), bool(tb[b, i, j]))
    return None


def bounded_valid(A: Formula, vocab: Sequence[str], max_len: int = 5,
                  budget: int = DEFAULT_BUDGET) -> Counterexample | None:
    """First window falsifying ``A``, or ``None``."""
    return bounded_equiv_check(A, S.TRUE_F, vocab, max_len, budget)


# ------------------------------------------------------------ lasso words

def normalize_future(F: Formula) -> Formula:
    """Rewrite into the core future fragment: Boolean combinations of
    introspective formulas and ``<r> G``.

    Uses ``<r>(C ; G) == <r>(C & <r> G)`` for introspective ``C`` and
    ``[r] G == ~<r> ~G``.
    """

    def go(g: Formula) -> Formula:
        if S.is_introspective(g):
            return g
        k = g.kind
        if k in (S.NOT, S.AND, S.OR, S.IMP, S.IFF):
            return Formula(k, tuple(go(x) for x in g.args))
        if k == S.BR:
            return S.Not(go(S.DiamondR(S.Not(g.args[0]))))
        if k == S.DR:
            body = g.args[0]
            if body.kind == S.CHOP and S.is_introspective(body.args[0]) and not S.is_introspective(body.args[1]):
                return S.DiamondR(S.And(body.args[0], go(S.DiamondR(body.args[1]))))
            return S.DiamondR(go(body))
        raise NotFuture(f"not a future formula: {S.render(g)}")

    return go(F)


def future_atoms(G: Formula) -> tuple[list[Formula], list[Formula]]:
    """Introspective and ``<r>`` atoms of a normalized future formula."""
    intro: list[Formula] = []
    modal: list[Formula] = []

    def walk(g: Formula) -> None:
        if S.is_introspective(g):
            if g not in intro:
                intro.append(g)
        elif g.kind == S.DR:
            if g not in modal:
                modal.append(g)
        else:
            for x in g.args:
                walk(x)

    walk(G)
    return intro, modal


def _bool_eval(g: Formula, vals: dict[Formula, bool]) -> bool:
    v = vals.get(g)
    if v is not None:
        return v
    k = g.kind
    a = g.args
    if k == S.NOT:
        return not _bool_eval(a[0], vals)
    if k == S.AND:
        return _bool_eval(a[0], vals) and _bool_eval(a[1], vals)
    if k == S.OR:
        return _bool_eval(a[0], vals) or _bool_eval(a[1], vals)
    if k == S.IMP:
        return (not _bool_eval(a[0], vals)) or _bool_eval(a[1], vals)
    if k == S.IFF:
        return _bool_eval(a[0], vals) == _bool_eval(a[1], vals)
    if k == S.TRUE:
        return True
    if k == S.FALSE:
        return False
    raise KeyError(S.render(g))


class LassoEvaluator:
    """Exact evaluation of a future formula at the anchor ``(0, 0)`` of
    ultimately periodic words. Build once, call on many lassos."""

    def __init__(self, F: Formula, vocab: Sequence[str]):
        from .compile import itl_to_dfa

        self.vocab = tuple(vocab)
        self.formula = normalize_future(F)
        self._dfas: dict[Formula, object] = {}
        self._order: list[Formula] = []  # <r> atoms, innermost first
        self._parts: dict[Formula, tuple[list, list]] = {}

        def register(D: Formula) -> None:
            if D in self._parts:
                return
            body = D.args[0]
            intro, modal = future_atoms(body)
            for M in modal:
                register(M)
            for C in intro:
                if C not in self._dfas:
                    self._dfas[C] = itl_to_dfa(C, self.vocab)
            self._parts[D] = (intro, modal)
            self._order.append(D)

        intro, modal = future_atoms(self.formula)
        for M in modal:
            register(M)
        for C in intro:
            if C not in self._dfas:
                self._dfas[C] = itl_to_dfa(C, self.vocab)
        self._top = (intro, modal)
        # Everything per-call works on positions: dict lookups keyed by
        # structurally equal but distinct formulas compare whole trees.
        self._tables = {}
        for C, d in self._dfas.items():
            self._tables[C] = (int(d.initial), d.delta.tolist(), [bool(x) for x in d.accepting])
        self._plan = []
        for D in self._order:
            intro, modal = self._parts[D]
            slot = {M: self._order.index(M) for M in modal}
            self._plan.append(([self._tables[C] for C in intro], [slot[M] for M in modal],
                               _memo(_compile_bool(D.args[0], list(intro) + list(modal)))))
        intro, modal = self._top
        self._top_plan = ([self._tables[C] for C in intro], [self._order.index(M) for M in modal],
                          _compile_bool(self.formula, list(intro) + list(modal)))

    def __call__(self, lasso: Lasso) -> bool:
        stem = [letter_code(x, self.vocab) for x in lasso.stem]
        loop = [letter_code(x, self.vocab) for x in lasso.loop]
        s, p = len(stem), len(loop)
        ncls = s + p
        word = stem + loop  # position class k reads word[k]
        succ = list(range(1, ncls)) + [s]

        value: list[list[bool]] = []
        for tables, slots, body in self._plan:
            res = []
            for c in range(ncls):
                states = tuple(t[0] for t in tables)
                seen = set()
                k = c
                found = False
                while True:
                    a = word[k]
                    states = tuple(t[1][q][a] for t, q in zip(tables, states))
                    key = (states, k)
                    if key in seen:
                        break
                    seen.add(key)
                    bits = tuple(t[2][q] for t, q in zip(tables, states)) + tuple(
                        value[m][k] for m in slots)
                    if body(bits):
                        found = True
                        break
                    k = succ[k]
                res.append(found)
            value.append(res)
        tables, slots, body = self._top_plan
        a0 = word[0]
        bits = tuple(t[2][t[1][t[0]][a0]] for t in tables) + tuple(value[m][0] for m in slots)
        return body(bits)


def _compile_bool(g: Formula, atoms: list[Formula]):
    """Boolean combination of ``atoms`` as a function of their truth tuple."""
    index = {}
    for n, A in enumerate(atoms):
        index.setdefault(A, n)
    cache: dict[int, object] = {}

    def build(g):
        key = id(g)
        if key in cache:
            return cache[key]
        n = index.get(g)
        if n is not None:
            fn = (lambda v, n=n: v[n])
        else:
            k, a = g.kind, g.args
            if k == S.NOT:
                x = build(a[0])
                fn = (lambda v: not x(v))
            elif k == S.AND:
                x, y = build(a[0]), build(a[1])
                fn = (lambda v: x(v) and y(v))
            elif k == S.OR:
                x, y = build(a[0]), build(a[1])
                fn = (lambda v: x(v) or y(v))
            elif k == S.IMP:
                x, y = build(a[0]), build(a[1])
                fn = (lambda v: (not x(v)) or y(v))
            elif k == S.IFF:
                x, y = build(a[0]), build(a[1])
                fn = (lambda v: x(v) == y(v))
            elif k == S.TRUE:
                fn = (lambda v: True)
            elif k == S.FALSE:
                fn = (lambda v: False)
            else:
                raise KeyError(S.render(g))
        cache[key] = fn
        return fn

    return build(g)


def _memo(fn):
    table: dict[tuple, bool] = {}

    def call(bits):
        r = table.get(bits)
        if r is None:
            r = table[bits] = bool(fn(bits))
        return r

    return call


def eval_lasso(L: Lasso, F: Formula, vocab: Sequence[str] | None = None) -> bool:
    """Exact truth of future ``F`` at ``(0, 0)`` of the ω-word of ``L``."""
    if vocab is None:
        names = set(S.free_vars(F))
        for s in L.stem + L.loop:
            names |= s
        vocab = tuple(sorted(names)) or ("p",)
    return LassoEvaluator(F, vocab)(L)


def enumerate_lassos(vocab: Sequence[str], max_stem: int = 3, max_loop: int = 3,
                     dedupe: bool = True) -> Iterator[Lasso]:
    """Lassos with ``|stem| <= max_stem`` and ``1 <= |loop| <= max_loop``.

    With ``dedupe`` only one lasso per distinct ω-word is produced (the
    normalized one: shortest stem, primitive loop).
    """
    letters = [letter_set(c, vocab) for c in range(2 ** len(vocab))]
    seen = set()
    for ls in range(0, max_stem + 1):
        for lp in range(1, max_loop + 1):
            for stem in itertools.product(letters, repeat=ls):
                for loop in itertools.product(letters, repeat=lp):
                    if dedupe:
                        key = normalize_lasso(stem, loop)
                        if key in seen:
                            continue
                        seen.add(key)
                    yield Lasso(stem, loop)


def normalize_lasso(stem: Sequence, loop: Sequence) -> tuple[tuple, tuple]:
    """Canonical (stem, loop) for the ω-word: primitive loop, shortest stem."""
    stem, loop = list(stem), list(loop)
    n = len(loop)
    for d in range(1, n + 1):
        if n % d == 0 and loop == loop[:d] * (n // d):
            loop = loop[:d]
            break
    while stem and stem[-1] == loop[-1]:
        stem.pop()
        loop = [loop[-1]] + loop[:-1]
    return tuple(stem), tuple(loop)


# ------------------------------------------------------------ lasso contexts

@dataclass(frozen=True)
class ContextWord:
    """A bi-infinite word around a reference interval.

    ``center`` is the reference interval; ``right`` lists the states after
    it and ``left`` the states before it, read leftwards from the state
    just before the interval.
    """

    left: Lasso
    center: tuple
    right: Lasso

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(frozenset(s) for s in self.center))
        if not self.center:
            raise ValueError("the reference interval needs at least one state")

    def __str__(self) -> str:
        def inline(L: Lasso) -> str:
            stem = " ".join(format_letter(s) for s in L.stem)
            loop = " ".join(format_letter(s) for s in L.loop)
            return f"{stem} ({loop})^w" if stem else f"({loop})^w"

        center = " ".join(format_letter(s) for s in self.center)
        return f"left {inline(self.left)} | {center} | right {inline(self.right)}"


def _past_atom_as_future(atom: Formula) -> Formula:
    """``<l>(P ; skip)`` read on the leftward lasso: ``<r> P^-1`` at its anchor."""
    return S.DiamondR(S.time_reverse(atom.args[0].args[0]))


class ContextEvaluator:
    """Exact truth of a separated formula on :class:`ContextWord` inputs.

    Strictly past atoms depend only on the left lasso, introspective atoms
    on the center and strictly future atoms on the right lasso, so each
    part is evaluated on its own and the Boolean skeleton combines them.
    """

    def __init__(self, A: Formula, vocab: Sequence[str]):
        self.vocab = tuple(vocab)
        self.formula = S.simplify_bool(A)
        atoms = S.boolean_atoms(self.formula)
        self.past = [a for a in atoms if not S.is_introspective(a) and S.is_strictly_past(a)]
        self.future = [a for a in atoms if not S.is_introspective(a) and S.is_strictly_future(a)]
        self.intro = [a for a in atoms if S.is_introspective(a)]
        if len(self.past) + len(self.future) + len(self.intro) != len(atoms):
            bad = next(a for a in atoms if a not in self.past + self.future + self.intro)
            raise S.NotSeparated(bad)
        self._past_ev = [LassoEvaluator(_past_atom_as_future(a), self.vocab) for a in self.past]
        self._future_ev = [LassoEvaluator(S.DiamondR(a.args[0].args[1]), self.vocab)
                           for a in self.future]

    def past_vector(self, left: Lasso) -> tuple[bool, ...]:
        return tuple(ev(left) for ev in self._past_ev)

    def future_vector(self, right: Lasso) -> tuple[bool, ...]:
        return tuple(ev(right) for ev in self._future_ev)

    def intro_vector(self, center: Sequence[frozenset]) -> tuple[bool, ...]:
        W = Window(tuple(center), 0, len(center) - 1)
        return tuple(holds(W, a) for a in self.intro)

    def combine(self, pv, iv, fv) -> bool:
        vals = dict(zip(self.past, pv))
        vals.update(zip(self.intro, iv))
        vals.update(zip(self.future, fv))
        return _bool_eval(self.formula, vals)

    def __call__(self, cw: ContextWord) -> bool:
        return self.combine(self.past_vector(cw.left), self.intro_vector(cw.center),
                            self.future_vector(cw.right))


def eval_context(cw: ContextWord, A: Formula, vocab: Sequence[str] | None = None) -> bool:
    """Exact truth of separated ``A`` on ``cw`` with the center as reference."""
    if vocab is None:
        names = set(S.free_vars(A))
        for s in cw.left.stem + cw.left.loop + cw.center + cw.right.stem + cw.right.loop:
            names |= s
        vocab = tuple(sorted(names)) or ("p",)
    return ContextEvaluator(A, vocab)(cw)
