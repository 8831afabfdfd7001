"""Finite and ω-automata over the power-set alphabet.

Letters are integers: bit ``b`` of a letter is set when the ``b``-th
vocabulary variable holds. Finite-word automata describe sets of
*non-empty* words (an n-letter word is an n-state interval), so the
acceptance flag of an initial state that is never re-entered is
irrelevant; :func:`minimize` picks whichever setting gives fewer states.

NFA and NBA successor sets are Python integers used as bitsets.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

DEFAULT_SUBSET_GUARD = 100_000
DEFAULT_NBA_GUARD = 12
DEFAULT_DPA_GUARD = 50_000


class GuardExceeded(RuntimeError):
    pass


class VocabularyMismatch(ValueError):
    pass


def _bits(mask: int) -> Iterable[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def letter_names(code: int, vocab: Sequence[str]) -> list[str]:
    return [p for b, p in enumerate(vocab) if code >> b & 1]


def format_code(code: int, vocab: Sequence[str]) -> str:
    return "{" + ",".join(letter_names(code, vocab)) + "}"


def embed_codes(src: Sequence[str], dst: Sequence[str]) -> np.ndarray:
    """For ``src ⊆ dst``: map each ``dst`` letter code to its ``src`` restriction."""
    missing = set(src) - set(dst)
    if missing:
        raise VocabularyMismatch(f"variables {sorted(missing)} not in target vocabulary")
    pos = [list(dst).index(p) for p in src]
    codes = np.arange(2 ** len(dst))
    out = np.zeros_like(codes)
    for b, d in enumerate(pos):
        out |= ((codes >> d) & 1) << b
    return out


# ================================================================== DFA

class Dfa:
    """Complete deterministic automaton over non-empty words."""

    __slots__ = ("vocab", "delta", "initial", "accepting")

    def __init__(self, vocab: Sequence[str], delta, initial: int, accepting):
        self.vocab = tuple(vocab)
        self.delta = np.asarray(delta, dtype=np.int32)
        self.initial = int(initial)
        acc = np.zeros(self.delta.shape[0], dtype=bool)
        if isinstance(accepting, np.ndarray) and accepting.dtype == bool:
            acc[:] = accepting
        else:
            for q in accepting:
                acc[q] = True
        self.accepting = acc
        if self.delta.shape[1] != 2 ** len(self.vocab):
            raise ValueError("transition table width must be 2^|vocab|")

    @property
    def n_states(self) -> int:
        return self.delta.shape[0]

    @property
    def n_letters(self) -> int:
        return self.delta.shape[1]

    def run(self, word: Sequence[int], start: int | None = None) -> int:
        q = self.initial if start is None else start
        for a in word:
            q = int(self.delta[q, a])
        return q

    def accepts(self, word: Sequence[int]) -> bool:
        if len(word) == 0:
            return False
        return bool(self.accepting[self.run(word)])

    def accepts_batch(self, words: np.ndarray) -> np.ndarray:
        """Membership of each row of ``words`` (all of equal positive length)."""
        q = np.full(words.shape[0], self.initial, dtype=np.int32)
        for k in range(words.shape[1]):
            q = self.delta[q, words[:, k]]
        return self.accepting[q]

    def __repr__(self) -> str:
        return f"Dfa(states={self.n_states}, vocab={self.vocab})"


def dfa_const(vocab: Sequence[str], value: bool) -> Dfa:
    """All non-empty words (``value``) or none."""
    return Dfa(vocab, np.zeros((1, 2 ** len(vocab)), dtype=np.int32), 0, [0] if value else [])


def dfa_first_letter(vocab: Sequence[str], pred: Callable[[int], bool]) -> Dfa:
    """Words whose first letter satisfies ``pred``."""
    n = 2 ** len(vocab)
    delta = np.zeros((3, n), dtype=np.int32)
    delta[0] = [1 if pred(a) else 2 for a in range(n)]
    delta[1] = 1
    delta[2] = 2
    return minimize(Dfa(vocab, delta, 0, [1]))


def dfa_length(vocab: Sequence[str], length: int) -> Dfa:
    """Words of exactly ``length`` letters."""
    n = 2 ** len(vocab)
    sink = length + 1
    delta = np.zeros((length + 2, n), dtype=np.int32)
    for q in range(length + 1):
        delta[q] = q + 1 if q < length else sink
    delta[sink] = sink
    return minimize(Dfa(vocab, delta, 0, [length]))


def dfa_min_length(vocab: Sequence[str], length: int) -> Dfa:
    """Words of at least ``length`` letters."""
    n = 2 ** len(vocab)
    delta = np.zeros((length + 1, n), dtype=np.int32)
    for q in range(length + 1):
        delta[q] = min(q + 1, length)
    return minimize(Dfa(vocab, delta, 0, [length]))


def reachable_states(delta: np.ndarray, start: int) -> np.ndarray:
    seen = np.zeros(delta.shape[0], dtype=bool)
    seen[start] = True
    frontier = np.array([start])
    while frontier.size:
        nxt = np.unique(delta[frontier].ravel())
        nxt = nxt[~seen[nxt]]
        seen[nxt] = True
        frontier = nxt
    return seen


def _nonempty_reachable(d: Dfa) -> np.ndarray:
    """States reachable by at least one letter."""
    seen = np.zeros(d.n_states, dtype=bool)
    frontier = np.unique(d.delta[d.initial])
    seen[frontier] = True
    while frontier.size:
        nxt = np.unique(d.delta[frontier].ravel())
        nxt = nxt[~seen[nxt]]
        seen[nxt] = True
        frontier = nxt
    return seen


def _moore(delta: np.ndarray, acc: np.ndarray, initial: int) -> tuple[np.ndarray, np.ndarray, int]:
    """Minimal DFA of the reachable part, canonically numbered by BFS."""
    reach = reachable_states(delta, initial)
    idx = np.flatnonzero(reach)
    remap = -np.ones(delta.shape[0], dtype=np.int64)
    remap[idx] = np.arange(idx.size)
    dl = remap[delta[idx]]
    ac = acc[idx]
    cls = ac.astype(np.int64)
    count = len(np.unique(cls))
    while True:
        sig = np.concatenate([cls[:, None], cls[dl]], axis=1)
        _, new = np.unique(sig, axis=0, return_inverse=True)
        new = new.ravel()
        new_count = int(new.max()) + 1
        cls = new
        if new_count == count:
            break
        count = new_count
    # quotient
    k = count
    qdelta = np.zeros((k, delta.shape[1]), dtype=np.int64)
    qacc = np.zeros(k, dtype=bool)
    qdelta[cls] = cls[dl]
    qacc[cls] = ac
    start = int(cls[remap[initial]])
    # canonical BFS numbering over letters in ascending order
    order = {start: 0}
    queue = deque([start])
    while queue:
        q = queue.popleft()
        for r in qdelta[q]:
            r = int(r)
            if r not in order:
                order[r] = len(order)
                queue.append(r)
    perm = np.empty(k, dtype=np.int64)
    for old, new_id in order.items():
        perm[old] = new_id
    out_delta = np.empty_like(qdelta)
    out_acc = np.empty_like(qacc)
    out_delta[perm] = perm[qdelta]
    out_acc[perm] = qacc
    return out_delta.astype(np.int32), out_acc, 0


def minimize(d: Dfa) -> Dfa:
    """Canonical minimal DFA of ``L(d)`` (a set of non-empty words).

    The initial state is split off so that its acceptance flag is free,
    then both settings are minimized and the smaller result is kept (ties
    go to the non-accepting setting).
    """
    n, m = d.delta.shape
    delta = np.vstack([d.delta, d.delta[d.initial][None, :]])
    fresh = n
    best = None
    for flag in (False, True):
        acc = np.append(d.accepting, flag)
        res = _moore(delta, acc, fresh)
        if best is None or res[0].shape[0] < best[0].shape[0]:
            best = res
    return Dfa(d.vocab, best[0], best[2], best[1])


def _check_vocab(a, b) -> None:
    if a.vocab != b.vocab:
        raise VocabularyMismatch(f"{a.vocab} vs {b.vocab}")


def product(a: Dfa, b: Dfa, op: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> Dfa:
    _check_vocab(a, b)
    nb = b.n_states
    qa = np.repeat(np.arange(a.n_states), nb)
    qb = np.tile(np.arange(nb), a.n_states)
    delta = a.delta[qa] * nb + b.delta[qb]
    acc = op(a.accepting[qa], b.accepting[qb])
    return minimize(Dfa(a.vocab, delta, a.initial * nb + b.initial, acc))


def complement(a: Dfa) -> Dfa:
    return minimize(Dfa(a.vocab, a.delta, a.initial, ~a.accepting))


def union(a: Dfa, b: Dfa) -> Dfa:
    return product(a, b, np.logical_or)


def intersection(a: Dfa, b: Dfa) -> Dfa:
    return product(a, b, np.logical_and)


def difference(a: Dfa, b: Dfa) -> Dfa:
    return product(a, b, lambda x, y: x & ~y)


def combine(kind: str, a: Dfa, b: Dfa | None = None) -> Dfa:
    """Language algebra: ``union``, ``intersection``, ``complement``,
    ``difference`` (complement is relative to all non-empty words)."""
    if kind == "complement":
        if b is not None:
            raise ValueError("complement takes one automaton")
        return complement(a)
    if b is None:
        raise ValueError(f"{kind} needs two automata")
    ops = {"union": union, "intersection": intersection, "difference": difference,
           "iff": lambda x, y: product(x, y, lambda s, t: s == t),
           "implies": lambda x, y: product(x, y, lambda s, t: ~s | t)}
    if kind not in ops:
        raise ValueError(f"unknown combination {kind!r}")
    return ops[kind](a, b)


def is_empty(a: Dfa) -> bool:
    return not bool((_nonempty_reachable(a) & a.accepting).any())


def is_universal(a: Dfa) -> bool:
    return not bool((_nonempty_reachable(a) & ~a.accepting).any())


def shortest_word(a: Dfa) -> list[int] | None:
    """Shortest accepted word, lexicographically least among those."""
    parent: dict[int, tuple[int | None, int]] = {}
    queue = deque()
    for c in range(a.n_letters):
        r = int(a.delta[a.initial, c])
        if r not in parent:
            parent[r] = (None, c)
            queue.append(r)
    while queue:
        q = queue.popleft()
        if a.accepting[q]:
            word = []
            x: int | None = q
            while x is not None:
                prev, c = parent[x]
                word.append(c)
                x = prev
            return word[::-1]
        for c in range(a.n_letters):
            r = int(a.delta[q, c])
            if r not in parent:
                parent[r] = (q, c)
                queue.append(r)
    return None


def dfa_counterexample(a: Dfa, b: Dfa) -> list[int] | None:
    """Shortest non-empty word in exactly one of the languages."""
    _check_vocab(a, b)
    start = (a.initial, b.initial)
    parent: dict[tuple, tuple] = {}
    queue = deque([start])
    first = True
    while queue:
        pair = queue.popleft()
        for c in range(a.n_letters):
            nxt = (int(a.delta[pair[0], c]), int(b.delta[pair[1], c]))
            if nxt in parent:
                continue
            parent[nxt] = (pair if not (first and pair == start) else None, c)
            if a.accepting[nxt[0]] != b.accepting[nxt[1]]:
                word = []
                x = nxt
                while x is not None:
                    prev, cc = parent[x]
                    word.append(cc)
                    x = prev
                return word[::-1]
            queue.append(nxt)
        first = False
    return None


def dfa_equivalent(a: Dfa, b: Dfa) -> bool:
    return dfa_counterexample(a, b) is None


def dfa_subset(a: Dfa, b: Dfa) -> bool:
    return is_empty(difference(a, b))


def with_vocab(a: Dfa, vocab: Sequence[str]) -> Dfa:
    """The same language with letters read over a larger vocabulary."""
    vocab = tuple(vocab)
    if vocab == a.vocab:
        return a
    emb = embed_codes(a.vocab, vocab)
    return Dfa(vocab, a.delta[:, emb], a.initial, a.accepting)


def drop_var(a: Dfa, p: str) -> Dfa:
    """Restrict to letters without ``p`` and remove ``p`` from the vocabulary.

    Faithful when the language is closed under changing ``p``.
    """
    vocab = tuple(v for v in a.vocab if v != p)
    emb = np.arange(2 ** len(vocab))
    pos = [a.vocab.index(v) for v in vocab]
    codes = np.zeros_like(emb)
    for b, d in enumerate(pos):
        codes |= ((emb >> b) & 1) << d
    return minimize(Dfa(vocab, a.delta[:, codes], a.initial, a.accepting))


def prefix_dfa(d: Dfa, q: int) -> Dfa:
    """Non-empty words leading from the initial state to ``q``."""
    if not 0 <= q < d.n_states:
        raise ValueError(f"unknown state {q}")
    acc = np.zeros(d.n_states, dtype=bool)
    acc[q] = True
    return minimize(Dfa(d.vocab, d.delta, d.initial, acc))


def reroot(d: Dfa, q: int) -> Dfa:
    """Language accepted when starting from ``q``."""
    return minimize(Dfa(d.vocab, d.delta, q, d.accepting))


def reroot_shared(d: Dfa, q: int) -> Dfa:
    """Words ``a.w`` such that ``w`` leads from ``q`` to acceptance (``w``
    may be empty): the right factor of a chop whose left factor ends in
    ``q`` and shares its last letter ``a``."""
    n = d.n_states
    delta = np.vstack([d.delta, np.full((1, d.n_letters), q, dtype=np.int32)])
    return minimize(Dfa(d.vocab, delta, n, np.append(d.accepting, False)))


def dfa_to_nfa(d: Dfa) -> "Nfa":
    succ = [[1 << int(r) for r in row] for row in d.delta]
    acc = 0
    for q in np.flatnonzero(d.accepting):
        acc |= 1 << int(q)
    return Nfa(d.vocab, succ, 1 << d.initial, acc)


def restrict_letters(d: Dfa, allowed: Iterable[int]) -> Dfa:
    """Intersect with words over the ``allowed`` letters only."""
    allowed = set(allowed)
    n = d.n_states
    delta = np.vstack([d.delta, np.full((1, d.n_letters), n, dtype=np.int32)])
    for c in range(d.n_letters):
        if c not in allowed:
            delta[:, c] = n
    return minimize(Dfa(d.vocab, delta, d.initial, np.append(d.accepting, False)))


def letters_dfa(vocab: Sequence[str], allowed: Iterable[int]) -> Dfa:
    """Non-empty words over the ``allowed`` letters."""
    allowed = set(allowed)
    n = 2 ** len(vocab)
    delta = np.array([[1 if c in allowed else 2 for c in range(n)]] * 3, dtype=np.int32)
    delta[2] = 2
    return minimize(Dfa(vocab, delta, 0, [1]))


# ================================================================== NFA

class Nfa:
    """Nondeterministic automaton over non-empty words; ``succ[q][a]`` is a
    bitset of successor states."""

    __slots__ = ("vocab", "succ", "initial", "accepting")

    def __init__(self, vocab: Sequence[str], succ: list[list[int]], initial: int, accepting: int):
        self.vocab = tuple(vocab)
        self.succ = succ
        self.initial = initial
        self.accepting = accepting

    @property
    def n_states(self) -> int:
        return len(self.succ)

    def post(self, states: int, a: int) -> int:
        out = 0
        for q in _bits(states):
            out |= self.succ[q][a]
        return out

    def accepts(self, word: Sequence[int]) -> bool:
        if not word:
            return False
        s = self.initial
        for a in word:
            s = self.post(s, a)
        return bool(s & self.accepting)


def determinize(n: Nfa, guard: int = DEFAULT_SUBSET_GUARD) -> Dfa:
    """Subset construction (unminimized)."""
    m = 2 ** len(n.vocab)
    index = {n.initial: 0}
    order = [n.initial]
    rows: list[list[int]] = []
    k = 0
    while k < len(order):
        s = order[k]
        row = []
        # successor of a subset is the union of member successors
        members = list(_bits(s))
        for a in range(m):
            t = 0
            for q in members:
                t |= n.succ[q][a]
            j = index.get(t)
            if j is None:
                j = len(order)
                if j >= guard:
                    raise GuardExceeded(f"subset construction exceeded {guard} states")
                index[t] = j
                order.append(t)
            row.append(j)
        rows.append(row)
        k += 1
    acc = [i for i, s in enumerate(order) if s & n.accepting]
    return Dfa(n.vocab, np.array(rows, dtype=np.int32), 0, acc)


def determinize_minimize(n: Nfa, guard: int = DEFAULT_SUBSET_GUARD) -> Dfa:
    return minimize(determinize(n, guard))


def fusion_concat(a: Dfa, b: Dfa) -> Nfa:
    """Words ``u ⊙ v`` (``u`` in ``L(a)``, ``v`` in ``L(b)``, sharing the last
    letter of ``u`` with the first letter of ``v``)."""
    _check_vocab(a, b)
    na = a.n_states
    succ = []
    for q in range(na):
        row = []
        for c in range(a.n_letters):
            r = int(a.delta[q, c])
            bits = 1 << r
            if a.accepting[r]:
                bits |= 1 << (na + int(b.delta[b.initial, c]))
            row.append(bits)
        succ.append(row)
    for q in range(b.n_states):
        succ.append([1 << (na + int(r)) for r in b.delta[q]])
    acc = 0
    for q in np.flatnonzero(b.accepting):
        acc |= 1 << (na + int(q))
    return Nfa(a.vocab, succ, 1 << a.initial, acc)


def strict_concat(a: Dfa, b: Dfa) -> Nfa:
    """Ordinary concatenation ``u . v`` of non-empty words."""
    _check_vocab(a, b)
    na = a.n_states
    j = na  # fresh, non-accepting copy of b's initial state
    off = na + 1
    succ = []
    for q in range(na):
        row = []
        for c in range(a.n_letters):
            r = int(a.delta[q, c])
            bits = 1 << r
            if a.accepting[r]:
                bits |= 1 << j
            row.append(bits)
        succ.append(row)
    succ.append([1 << (off + int(r)) for r in b.delta[b.initial]])
    for q in range(b.n_states):
        succ.append([1 << (off + int(r)) for r in b.delta[q]])
    acc = 0
    for q in np.flatnonzero(b.accepting):
        acc |= 1 << (off + int(q))
    return Nfa(a.vocab, succ, 1 << a.initial, acc)


def fusion_star(a: Dfa) -> Nfa:
    """All one-letter words plus fusion chains of words of ``L(a)`` having at
    least two letters each."""
    a2 = intersection(a, dfa_min_length(a.vocab, 2))
    m = a2.n_letters
    off = 2
    succ = [[0] * m, [0] * m]
    for c in range(m):
        succ[0][c] = (1 << 1) | (1 << (off + int(a2.delta[a2.initial, c])))
    for q in range(a2.n_states):
        row = []
        for c in range(m):
            r = int(a2.delta[q, c])
            bits = 1 << (off + r)
            if a2.accepting[r]:
                bits |= 1 << (off + int(a2.delta[a2.initial, c]))
            row.append(bits)
        succ.append(row)
    acc = 1 << 1
    for q in np.flatnonzero(a2.accepting):
        acc |= 1 << (off + int(q))
    return Nfa(a.vocab, succ, 1, acc)


def reverse(d: Dfa) -> Nfa:
    """NFA for the mirror image of ``L(d)``."""
    n = d.n_states
    succ = [[0] * d.n_letters for _ in range(n)]
    for q in range(n):
        for c in range(d.n_letters):
            succ[int(d.delta[q, c])][c] |= 1 << q
    init = 0
    for q in np.flatnonzero(d.accepting):
        init |= 1 << int(q)
    return Nfa(d.vocab, succ, init, 1 << d.initial)


def reverse_dfa(d: Dfa) -> Dfa:
    return determinize_minimize(reverse(d))


def relabel_dont_care(a, p: str):
    """Close the language under changing ``p`` in any letter (``h_p^{-1} h_p``).

    Accepts a :class:`Dfa`, :class:`Nfa` or :class:`Nba`; returns an
    :class:`Nfa` (for finite-word inputs) or :class:`Nba`.
    """
    if p not in a.vocab:
        raise ValueError(f"{p} not in vocabulary {a.vocab}")
    bit = 1 << a.vocab.index(p)
    if isinstance(a, Dfa):
        a = dfa_to_nfa(a)
    succ = [[row[c] | row[c ^ bit] for c in range(len(row))] for row in a.succ]
    if isinstance(a, Nba):
        return Nba(a.vocab, succ, a.initial, a.accepting)
    return Nfa(a.vocab, succ, a.initial, a.accepting)


# ================================================================== NBA

class Nba:
    """Büchi automaton: accepts an ω-word if some run visits ``accepting``
    infinitely often."""

    __slots__ = ("vocab", "succ", "initial", "accepting")

    def __init__(self, vocab: Sequence[str], succ: list[list[int]], initial: int, accepting: int):
        self.vocab = tuple(vocab)
        self.succ = succ
        self.initial = initial
        self.accepting = accepting

    @property
    def n_states(self) -> int:
        return len(self.succ)

    @property
    def n_letters(self) -> int:
        return 2 ** len(self.vocab)

    def post(self, states: int, a: int) -> int:
        out = 0
        for q in _bits(states):
            out |= self.succ[q][a]
        return out

    def __repr__(self) -> str:
        return f"Nba(states={self.n_states}, vocab={self.vocab})"


def nba_universal(vocab: Sequence[str]) -> Nba:
    m = 2 ** len(vocab)
    return Nba(vocab, [[1] * m], 1, 1)


def nba_empty(vocab: Sequence[str]) -> Nba:
    m = 2 ** len(vocab)
    return Nba(vocab, [[0] * m], 1, 0)


def nba_first_letter(vocab: Sequence[str], pred: Callable[[int], bool]) -> Nba:
    """ω-words whose first letter satisfies ``pred``."""
    m = 2 ** len(vocab)
    succ = [[2 if pred(c) else 0 for c in range(m)], [2] * m]
    return Nba(vocab, succ, 1, 2)


def nba_lasso_accepts(n: Nba, stem: Sequence[int], loop: Sequence[int]) -> bool:
    """Exact membership of ``stem . loop^ω``."""
    if not loop:
        raise ValueError("empty loop")
    s = n.initial
    for a in stem:
        s = n.post(s, a)
    p = len(loop)
    N = n.n_states

    def node(q, i):
        return i * N + q

    def succs(x):
        i, q = divmod(x, N)
        j = (i + 1) % p
        return [node(r, j) for r in _bits(n.succ[q][loop[i]])]

    start = [node(q, 0) for q in _bits(s)]
    seen = set(start)
    stack = list(start)
    while stack:
        x = stack.pop()
        for y in succs(x):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    for x in seen:
        if not (n.accepting >> (x % N)) & 1:
            continue
        # is x on a cycle?
        inner = set()
        stack = succs(x)
        while stack:
            y = stack.pop()
            if y == x:
                return True
            if y not in inner:
                inner.add(y)
                stack.extend(succs(y))
    return False


def _bfs_path(n: Nba, sources: int, target_pred, min_steps: int = 0):
    """Shortest letter path from one of ``sources`` to a state satisfying
    ``target_pred`` (using at least ``min_steps`` letters)."""
    parent: dict[int, tuple] = {}
    queue = deque()
    if min_steps == 0:
        for q in _bits(sources):
            if target_pred(q):
                return q, []
            parent[q] = (None, None)
            queue.append(q)
    else:
        for q in _bits(sources):
            for c in range(n.n_letters):
                for r in _bits(n.succ[q][c]):
                    if r not in parent:
                        parent[r] = (("src", q), c)
                        queue.append(r)
    while queue:
        q = queue.popleft()
        if min_steps and target_pred(q):
            return q, _unwind(parent, q)
        for c in range(n.n_letters):
            for r in _bits(n.succ[q][c]):
                if r not in parent:
                    parent[r] = (q, c)
                    if min_steps == 0 and target_pred(r):
                        return r, _unwind(parent, r)
                    queue.append(r)
    return None, None


def _unwind(parent, q) -> list[int]:
    word = []
    x = q
    while True:
        prev, c = parent[x]
        if c is None:
            break
        word.append(c)
        if isinstance(prev, tuple):
            break
        x = prev
    return word[::-1]


def nba_find_lasso(n: Nba) -> tuple[list[int], list[int]] | None:
    """A lasso ``(stem, loop)`` of letter codes accepted by ``n``, or ``None``."""
    from .semantics import normalize_lasso

    reach = 0
    frontier = n.initial
    reach = frontier
    while frontier:
        nxt = 0
        for q in _bits(frontier):
            for row in (n.succ[q],):
                for m in row:
                    nxt |= m
        frontier = nxt & ~reach
        reach |= nxt
    best = None
    for f in _bits(reach & n.accepting):
        tgt, cycle = _bfs_path(n, 1 << f, lambda q, f=f: q == f, min_steps=1)
        if tgt is None:
            continue
        _, stem = _bfs_path(n, n.initial, lambda q, f=f: q == f)
        cand = (stem, cycle)
        if best is None or len(stem) + len(cycle) < len(best[0]) + len(best[1]):
            best = cand
    if best is None:
        return None
    stem, loop = normalize_lasso(best[0], best[1])
    return list(stem), list(loop)


def nba_is_empty(n: Nba) -> bool:
    return nba_find_lasso(n) is None


def nba_check(n: Nba, query: str = "emptiness", lasso=None):
    """``emptiness`` returns ``(True, None)`` or ``(False, witness)``;
    ``lasso`` returns membership of the given ``(stem, loop)`` codes."""
    if query == "emptiness":
        w = nba_find_lasso(n)
        return (w is None), w
    if query == "lasso":
        stem, loop = lasso
        return nba_lasso_accepts(n, stem, loop)
    raise ValueError(f"unknown query {query!r}")


def nba_trim(n: Nba) -> Nba:
    """Keep states that are reachable and can reach an accepting cycle."""
    N = n.n_states
    m = n.n_letters
    out_edges = [0] * N
    for q in range(N):
        for c in range(m):
            out_edges[q] |= n.succ[q][c]
    reach = n.initial
    frontier = reach
    while frontier:
        nxt = 0
        for q in _bits(frontier):
            nxt |= out_edges[q]
        frontier = nxt & ~reach
        reach |= nxt
    # accepting states lying on a cycle
    good = 0
    for f in _bits(n.accepting & reach):
        seen = out_edges[f]
        frontier = seen
        while frontier and not (seen >> f) & 1:
            nxt = 0
            for q in _bits(frontier):
                nxt |= out_edges[q]
            frontier = nxt & ~seen
            seen |= nxt
        if (seen >> f) & 1:
            good |= 1 << f
    # backward closure
    preds = [0] * N
    for q in range(N):
        for r in _bits(out_edges[q]):
            preds[r] |= 1 << q
    useful = good
    frontier = good
    while frontier:
        nxt = 0
        for q in _bits(frontier):
            nxt |= preds[q]
        frontier = nxt & ~useful
        useful |= nxt
    keep = [q for q in range(N) if (reach >> q) & 1 and (useful >> q) & 1]
    if not keep:
        return nba_empty(n.vocab)
    idx = {q: i for i, q in enumerate(keep)}
    mask_keep = sum(1 << q for q in keep)

    def remap(s: int) -> int:
        out = 0
        for q in _bits(s & mask_keep):
            out |= 1 << idx[q]
        return out

    succ = [[remap(n.succ[q][c]) for c in range(m)] for q in keep]
    return Nba(n.vocab, succ, remap(n.initial), remap(n.accepting))


def nba_union(a: Nba, b: Nba) -> Nba:
    _check_vocab(a, b)
    na = a.n_states
    succ = [list(r) for r in a.succ] + [[m << na for m in r] for r in b.succ]
    return Nba(a.vocab, succ, a.initial | (b.initial << na), a.accepting | (b.accepting << na))


def nba_intersection(a: Nba, b: Nba) -> Nba:
    """Product with a two-track counter (accepting: track 1 at an
    ``a``-accepting state)."""
    _check_vocab(a, b)
    m = a.n_letters
    index: dict[tuple, int] = {}
    order: list[tuple] = []

    def get(key):
        i = index.get(key)
        if i is None:
            i = len(order)
            index[key] = i
            order.append(key)
        return i

    init = 0
    for p in _bits(a.initial):
        for q in _bits(b.initial):
            init |= 1 << get((p, q, 1))
    succ: list[list[int]] = []
    k = 0
    while k < len(order):
        p, q, t = order[k]
        if t == 1:
            t2 = 2 if (a.accepting >> p) & 1 else 1
        else:
            t2 = 1 if (b.accepting >> q) & 1 else 2
        row = []
        for c in range(m):
            bits = 0
            for r in _bits(a.succ[p][c]):
                for s in _bits(b.succ[q][c]):
                    bits |= 1 << get((r, s, t2))
            row.append(bits)
        succ.append(row)
        k += 1
    acc = 0
    for i, (p, q, t) in enumerate(order):
        if t == 1 and (a.accepting >> p) & 1:
            acc |= 1 << i
    return nba_trim(Nba(a.vocab, succ, init, acc))


def fusion_dfa_nba(d: Dfa, n: Nba) -> Nba:
    """ω-words ``u ⊙ x`` with ``u`` in ``L(d)`` and ``x`` in ``L(n)`` sharing
    the last letter of ``u``."""
    _check_vocab(d, n)
    nd = d.n_states
    m = d.n_letters
    first = [n.post(n.initial, c) for c in range(m)]
    succ = []
    for q in range(nd):
        row = []
        for c in range(m):
            r = int(d.delta[q, c])
            bits = 1 << r
            if d.accepting[r]:
                bits |= first[c] << nd
            row.append(bits)
        succ.append(row)
    for q in range(n.n_states):
        succ.append([s << nd for s in n.succ[q]])
    return nba_trim(Nba(d.vocab, succ, 1 << d.initial, n.accepting << nd))


def nba_with_vocab(n: Nba, vocab: Sequence[str]) -> Nba:
    vocab = tuple(vocab)
    if vocab == n.vocab:
        return n
    emb = embed_codes(n.vocab, vocab)
    succ = [[row[int(emb[c])] for c in range(len(emb))] for row in n.succ]
    return Nba(vocab, succ, n.initial, n.accepting)


def nba_after_letter(n: Nba) -> Nba:
    """Words ``a.w`` with ``w`` accepted by ``n`` and ``a`` any letter."""
    N = n.n_states
    succ = [list(r) for r in n.succ] + [[n.initial] * n.n_letters]
    return Nba(n.vocab, succ, 1 << N, n.accepting)


def nba_from_dfa_cobuchi(d: Dfa) -> Nba:
    """ω-words with only finitely many non-empty prefixes in ``L(d)``: guess
    the last such prefix, then stay out of accepting states."""
    N = d.n_states
    succ = []
    for q in range(N):
        succ.append([(1 << int(r)) | (0 if d.accepting[r] else 1 << (N + int(r))) for r in d.delta[q]])
    for q in range(N):
        succ.append([0 if d.accepting[r] else 1 << (N + int(r)) for r in d.delta[q]])
    init = (1 << d.initial) | (1 << (N + d.initial))
    return Nba(d.vocab, succ, init, ((1 << N) - 1) << N)


def nba_drop_var(n: Nba, p: str) -> Nba:
    """Letters without ``p`` only; faithful for ``p``-closed languages."""
    vocab = tuple(v for v in n.vocab if v != p)
    pos = [n.vocab.index(v) for v in vocab]
    codes = []
    for c in range(2 ** len(vocab)):
        x = 0
        for b, d in enumerate(pos):
            x |= ((c >> b) & 1) << d
        codes.append(x)
    succ = [[row[x] for x in codes] for row in n.succ]
    return Nba(vocab, succ, n.initial, n.accepting)


def nba_is_deterministic(n: Nba) -> bool:
    if bin(n.initial).count("1") != 1:
        return False
    return all(bin(m).count("1") <= 1 for row in n.succ for m in row)


# ================================================================== DPA

class Dpa:
    """Deterministic parity automaton, min-even acceptance on states."""

    __slots__ = ("vocab", "delta", "initial", "priority")

    def __init__(self, vocab: Sequence[str], delta, initial: int, priority):
        self.vocab = tuple(vocab)
        self.delta = np.asarray(delta, dtype=np.int32)
        self.initial = int(initial)
        self.priority = np.asarray(priority, dtype=np.int64)

    @property
    def n_states(self) -> int:
        return self.delta.shape[0]

    @property
    def n_letters(self) -> int:
        return self.delta.shape[1]

    def __repr__(self) -> str:
        return f"Dpa(states={self.n_states}, priorities={sorted(set(self.priority.tolist()))})"


def dpa_lasso_accepts(d: Dpa, stem: Sequence[int], loop: Sequence[int]) -> bool:
    q = d.initial
    for a in stem:
        q = int(d.delta[q, a])
    seen: dict[int, int] = {}
    visits: list[int] = []
    k = 0
    while q not in seen:
        seen[q] = k
        for a in loop:
            q = int(d.delta[q, a])
            visits.append(q)
        k += 1
    start = seen[q] * len(loop)
    return int(d.priority[visits[start:]].min()) % 2 == 0


def dpa_complement(d: Dpa) -> Dpa:
    return Dpa(d.vocab, d.delta, d.initial, d.priority + 1)


def dpa_to_nba(d: Dpa) -> Nba:
    """Büchi automaton for ``L(d)``: guess an even priority ``e`` that is
    minimal from some point on; accept on visits to priority ``e``."""
    N = d.n_states
    m = d.n_letters
    evens = sorted({int(x) for x in d.priority if x % 2 == 0})
    copies = [None] + evens
    succ = []
    acc = 0
    for ci, e in enumerate(copies):
        for q in range(N):
            row = []
            for c in range(m):
                r = int(d.delta[q, c])
                bits = 0
                if e is None:
                    bits |= 1 << r
                    for cj, e2 in enumerate(copies[1:], start=1):
                        if d.priority[r] >= e2:
                            bits |= 1 << (cj * N + r)
                elif d.priority[r] >= e:
                    bits |= 1 << (ci * N + r)
                row.append(bits)
            succ.append(row)
            if e is not None and d.priority[q] == e:
                acc |= 1 << (ci * N + q)
    return nba_trim(Nba(d.vocab, succ, 1 << d.initial, acc))


def dpa_complement_nba(d: Dpa) -> tuple[Dpa, Nba]:
    """``(complement DPA, NBA for L(d))``."""
    return dpa_complement(d), dpa_to_nba(d)


def _sccs(delta: np.ndarray, members: set[int]) -> list[list[int]]:
    """Nontrivial strongly connected components of the subgraph on
    ``members`` (iterative Tarjan)."""
    succ = {q: sorted({int(r) for r in delta[q] if int(r) in members}) for q in members}
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    stack: list[int] = []
    on_stack: set[int] = set()
    out = []
    for root in sorted(members):
        if root in index:
            continue
        work = [(root, 0)]
        index[root] = low[root] = len(index)
        stack.append(root)
        on_stack.add(root)
        while work:
            q, i = work[-1]
            if i < len(succ[q]):
                work[-1] = (q, i + 1)
                r = succ[q][i]
                if r not in index:
                    index[r] = low[r] = len(index)
                    stack.append(r)
                    on_stack.add(r)
                    work.append((r, 0))
                elif r in on_stack:
                    low[q] = min(low[q], index[r])
                continue
            work.pop()
            if work:
                low[work[-1][0]] = min(low[work[-1][0]], low[q])
            if low[q] == index[q]:
                comp = []
                while True:
                    r = stack.pop()
                    on_stack.discard(r)
                    comp.append(r)
                    if r == q:
                        break
                if len(comp) > 1 or q in succ[q]:
                    out.append(comp)
    return out


def normalize_priorities(delta: np.ndarray, prio: np.ndarray) -> np.ndarray:
    """Priorities with the same minimum on every cycle, and so the same
    parity language.

    Inside each SCC the states of least priority keep their parity at the
    lowest free level and the rest are treated recursively; states on no
    sub-cycle keep the level of their component. States on no cycle at
    all get the top even priority, which no cycle minimum can see.
    """
    top = int(prio.max()) + 2 + int(prio.max()) % 2 if prio.size else 0
    out = np.full(prio.shape, top, dtype=np.int64)
    todo = [(set(range(len(prio))), 0)]
    while todo:
        members, base = todo.pop()
        for comp in _sccs(delta, members):
            m = min(int(prio[q]) for q in comp)
            level = base if base % 2 == m % 2 else base + 1
            low = [q for q in comp if int(prio[q]) == m]
            out[comp] = level
            rest = set(comp) - set(low)
            if rest:
                todo.append((rest, level + 1))
    return out


def compress_priorities(prio: np.ndarray) -> np.ndarray:
    """Renumber priorities preserving order and parity, merging runs of equal
    parity."""
    values = sorted(set(int(x) for x in prio))
    mapping = {}
    cur = None
    for v in values:
        if cur is None:
            cur = v % 2
        elif (cur % 2) != (v % 2):
            cur += 1
        mapping[v] = cur
    return np.array([mapping[int(x)] for x in prio], dtype=np.int64)


def _bisimulation(delta: np.ndarray, prio: np.ndarray) -> np.ndarray:
    """Class index per state of the coarsest priority-respecting
    bisimulation."""
    _, cls = np.unique(prio, return_inverse=True)
    cls = cls.ravel()
    count = int(cls.max()) + 1
    while True:
        sig = np.concatenate([cls[:, None], cls[delta]], axis=1)
        _, new = np.unique(sig, axis=0, return_inverse=True)
        new = new.ravel()
        nc = int(new.max()) + 1
        cls = new
        if nc == count:
            return cls
        count = nc


def _absorb_transients(delta: np.ndarray, prio: np.ndarray) -> np.ndarray:
    """Reassign priorities of states on no cycle so they merge with a state
    having the same successor classes.

    Such priorities are never seen infinitely often, so any choice keeps
    the language; each state is reassigned at most once.
    """
    n = len(prio)
    cyclic = set()
    for comp in _sccs(delta, set(range(n))):
        cyclic.update(comp)
    open_ = [q for q in range(n) if q not in cyclic]
    prio = prio.copy()
    while open_:
        cls = _bisimulation(delta, prio)
        succ = cls[delta]
        settled = []
        for q in open_:
            same = np.flatnonzero((succ == succ[q]).all(axis=1) & (cls != cls[q]))
            if same.size:
                prio[q] = prio[int(same[0])]
                settled.append(q)
                break
        if not settled:
            break
        open_ = [q for q in open_ if q not in settled]
    return prio


def dpa_reduce(d: Dpa) -> Dpa:
    """Reachable part, compressed priorities and bisimulation quotient."""
    reach = reachable_states(d.delta, d.initial)
    idx = np.flatnonzero(reach)
    remap = -np.ones(d.n_states, dtype=np.int64)
    remap[idx] = np.arange(idx.size)
    delta = remap[d.delta[idx]]
    prio = normalize_priorities(delta, d.priority[idx])
    prio = compress_priorities(_absorb_transients(delta, prio))
    cls = _bisimulation(delta, prio)
    count = int(cls.max()) + 1
    qdelta = np.zeros((count, d.n_letters), dtype=np.int64)
    qprio = np.zeros(count, dtype=np.int64)
    qdelta[cls] = cls[delta]
    qprio[cls] = prio
    start = int(cls[remap[d.initial]])
    order = {start: 0}
    queue = deque([start])
    while queue:
        q = queue.popleft()
        for r in qdelta[q]:
            r = int(r)
            if r not in order:
                order[r] = len(order)
                queue.append(r)
    perm = np.empty(count, dtype=np.int64)
    for old, new_id in order.items():
        perm[old] = new_id
    out_delta = np.empty_like(qdelta)
    out_prio = np.empty_like(qprio)
    out_delta[perm] = perm[qdelta]
    out_prio[perm] = qprio
    return Dpa(d.vocab, out_delta, 0, out_prio)


def _deterministic_nba_to_dpa(n: Nba) -> Dpa:
    N = n.n_states
    m = n.n_letters
    sink = N
    delta = np.full((N + 1, m), sink, dtype=np.int32)
    for q in range(N):
        for c in range(m):
            s = n.succ[q][c]
            if s:
                delta[q, c] = s.bit_length() - 1
    prio = np.array([0 if (n.accepting >> q) & 1 else 1 for q in range(N)] + [1])
    return dpa_reduce(Dpa(n.vocab, delta, n.initial.bit_length() - 1, prio))


def nba_determinize(n: Nba, guard: int = DEFAULT_NBA_GUARD,
                    state_guard: int = DEFAULT_DPA_GUARD) -> Dpa:
    """Safra-tree determinization with compact, age-ordered node names.

    A transition's priority is ``2r - 1`` for the smallest removed name
    ``r`` or ``2g`` for the smallest name ``g`` whose node turned green,
    whichever is smaller; odd maximum otherwise. Priorities are pushed into
    the target state, giving a state-based min-even parity automaton.
    """
    n = nba_trim(n)
    if n.initial == 0 or n.accepting == 0:
        m = n.n_letters
        return Dpa(n.vocab, np.zeros((1, m), dtype=np.int32), 0, [1])
    if nba_is_deterministic(n):
        return _deterministic_nba_to_dpa(n)
    if n.n_states > guard:
        raise GuardExceeded(f"NBA has {n.n_states} states, guard is {guard}")
    m = n.n_letters
    F = n.accepting
    neutral = 4 * n.n_states + 3

    post_cache: dict[tuple[int, int], int] = {}

    def post(s: int, a: int) -> int:
        key = (s, a)
        r = post_cache.get(key)
        if r is None:
            r = n.post(s, a)
            post_cache[key] = r
        return r

    def freeze(node) -> tuple:
        return (node[0], node[1], tuple(freeze(k) for k in node[2]))

    def thaw(t) -> list:
        return [t[0], t[1], [thaw(k) for k in t[2]]]

    def names(node, out):
        out.append(node[0])
        for k in node[2]:
            names(k, out)
        return out

    def step(tree: tuple, a: int):
        t = thaw(tree)
        top = max(names(t, []))
        counter = [top]

        def spawn(node):
            for k in node[2]:
                spawn(k)
            if node[1] & F:
                counter[0] += 1
                node[2].append([counter[0], node[1] & F, []])

        spawn(t)

        def move(node):
            node[1] = post(node[1], a)
            for k in node[2]:
                move(k)

        move(t)

        def hmerge(node, allowed):
            node[1] &= allowed
            claimed = 0
            for k in node[2]:
                hmerge(k, node[1] & ~claimed)
                claimed |= k[1]

        hmerge(t, -1)
        red: list[int] = []
        if t[1] == 0:
            return None, 1

        def prune(node):
            keep = []
            for k in node[2]:
                if k[1] == 0:
                    names(k, red)
                else:
                    prune(k)
                    keep.append(k)
            node[2] = keep

        prune(t)
        green: list[int] = []

        def vmerge(node):
            if not node[2]:
                return
            u = 0
            for k in node[2]:
                u |= k[1]
            if u == node[1]:
                for k in node[2]:
                    names(k, red)
                node[2] = []
                green.append(node[0])
                return
            for k in node[2]:
                vmerge(k)

        vmerge(t)
        pr = neutral
        if red:
            pr = min(pr, 2 * min(red) - 1)
        if green:
            pr = min(pr, 2 * min(green))
        alive = sorted(names(t, []))
        rename = {old: i + 1 for i, old in enumerate(alive)}

        def relabel(node):
            node[0] = rename[node[0]]
            for k in node[2]:
                relabel(k)

        relabel(t)
        return freeze(t), pr

    start = (1, n.initial, ())
    index: dict[tuple, int] = {(start, neutral): 0}
    order: list[tuple] = [(start, neutral)]
    rows: list[list[int]] = []
    trans_cache: dict[tuple, tuple] = {}
    k = 0
    while k < len(order):
        tree, _ = order[k]
        row = []
        for a in range(m):
            if tree is None:
                res = (None, 1)
            else:
                key = (tree, a)
                res = trans_cache.get(key)
                if res is None:
                    res = step(tree, a)
                    trans_cache[key] = res
            j = index.get(res)
            if j is None:
                j = len(order)
                if j >= state_guard:
                    raise GuardExceeded(f"determinization exceeded {state_guard} states")
                index[res] = j
                order.append(res)
            row.append(j)
        rows.append(row)
        k += 1
    prio = [pr for _, pr in order]
    return dpa_reduce(Dpa(n.vocab, np.array(rows, dtype=np.int32), 0, prio))


def nba_complement(n: Nba, guard: int = DEFAULT_NBA_GUARD) -> Nba:
    return dpa_to_nba(dpa_complement(nba_determinize(n, guard)))


def dpa_prefix_dfa(d: Dpa, states: Iterable[int]) -> Dfa:
    """Non-empty words leading from the initial state into ``states``."""
    acc = np.zeros(d.n_states, dtype=bool)
    for q in states:
        acc[q] = True
    return minimize(Dfa(d.vocab, d.delta, d.initial, acc))


def nba_from_dfa_buchi(d: Dfa) -> Nba:
    """Read a DFA as a deterministic Büchi automaton."""
    succ = [[1 << int(r) for r in row] for row in d.delta]
    acc = 0
    for q in np.flatnonzero(d.accepting):
        acc |= 1 << int(q)
    return Nba(d.vocab, succ, 1 << d.initial, acc)


@dataclass
class LassoCodes:
    stem: list
    loop: list


def dfa_key(d: Dfa) -> tuple:
    """Hashable identity of a canonical minimal DFA (equal keys iff equal
    languages, for outputs of :func:`minimize`)."""
    return (d.vocab, d.delta.shape, d.delta.tobytes(), d.accepting.tobytes(), d.initial)
