"""Seeded random formulas and automata for sweeps and property tests.

Every generator takes a :class:`numpy.random.Generator`, so a fixed seed
reproduces the same corpus.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from . import automata as au
from . import syntax as S
from .automata import Dfa, Nba
from .syntax import Formula

# weights of the introspective connectives; leaves are handled separately
_UNARY = ("not", "next", "star", "box", "dia")
_BINARY = ("and", "or", "chop")


def rng_from(seed: int | np.random.Generator | None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _pick(rng: np.random.Generator, items: Sequence):
    return items[int(rng.integers(len(items)))]


def random_state_formula(rng: np.random.Generator, vocab: Sequence[str], depth: int = 2) -> Formula:
    if depth <= 0 or rng.random() < 0.35:
        return _leaf_var(rng, vocab)
    k = _pick(rng, ("not", "and", "or"))
    if k == "not":
        return S.Not(random_state_formula(rng, vocab, depth - 1))
    a = random_state_formula(rng, vocab, depth - 1)
    b = random_state_formula(rng, vocab, depth - 1)
    return S.And(a, b) if k == "and" else S.Or(a, b)


def _leaf_var(rng: np.random.Generator, vocab: Sequence[str]) -> Formula:
    v = S.Var(_pick(rng, list(vocab)))
    return S.Not(v) if rng.random() < 0.3 else v


def _leaf(rng: np.random.Generator, vocab: Sequence[str]) -> Formula:
    r = rng.random()
    if r < 0.65:
        return _leaf_var(rng, vocab)
    if r < 0.8:
        return S.EMPTY_F
    if r < 0.93:
        return S.SKIP_F
    return S.TRUE_F


def random_formula(rng: np.random.Generator, vocab: Sequence[str], depth: int = 4) -> Formula:
    """A random introspective formula of nesting depth at most ``depth``."""
    if depth <= 0 or rng.random() < 0.2:
        return _leaf(rng, vocab)
    if rng.random() < 0.45:
        k = _pick(rng, _UNARY)
        a = random_formula(rng, vocab, depth - 1)
        return {"not": S.Not, "next": S.Next, "star": S.ChopStar,
                "box": S.Box, "dia": S.Diamond}[k](a)
    k = _pick(rng, _BINARY)
    a = random_formula(rng, vocab, depth - 1)
    b = random_formula(rng, vocab, depth - 1)
    return {"and": S.And, "or": S.Or, "chop": S.Chop}[k](a, b)


def random_future_formula(rng: np.random.Generator, vocab: Sequence[str], depth: int = 2,
                          intro_depth: int = 2) -> Formula:
    """A future formula: Boolean combinations of introspective formulas and
    ``<r>`` of future formulas."""
    if depth <= 0 or rng.random() < 0.3:
        return random_formula(rng, vocab, intro_depth)
    r = rng.random()
    if r < 0.45:
        return S.DiamondR(random_future_formula(rng, vocab, depth - 1, intro_depth))
    if r < 0.6:
        return S.Not(random_future_formula(rng, vocab, depth - 1, intro_depth))
    a = random_future_formula(rng, vocab, depth - 1, intro_depth)
    b = random_future_formula(rng, vocab, depth - 1, intro_depth)
    return S.And(a, b) if r < 0.8 else S.Or(a, b)


def strictly_future(F: Formula) -> Formula:
    return S.DiamondR(S.Chop(S.SKIP_F, F))


def strictly_past(P: Formula) -> Formula:
    return S.DiamondL(S.Chop(P, S.SKIP_F))


def random_separated_formula(rng: np.random.Generator, vocab: Sequence[str], n_future: int = 1,
                             n_past: int = 0, intro_depth: int = 2) -> Formula:
    """A Boolean combination of one introspective formula and strictly
    future/past atoms with small future bodies."""
    parts = [random_formula(rng, vocab, intro_depth)]
    for _ in range(n_future):
        atom = strictly_future(random_future_formula(rng, vocab, 1, intro_depth))
        parts.append(S.Not(atom) if rng.random() < 0.4 else atom)
    for _ in range(n_past):
        body = S.time_reverse(random_future_formula(rng, vocab, 1, intro_depth))
        atom = strictly_past(body)
        parts.append(S.Not(atom) if rng.random() < 0.4 else atom)
    out = parts[0]
    for f in parts[1:]:
        out = S.And(out, f) if rng.random() < 0.7 else S.Or(out, f)
    return out


def random_dfa(rng: np.random.Generator, vocab: Sequence[str], n_states: int) -> Dfa:
    """Uniform transition table and acceptance bits, minimized."""
    m = 2 ** len(vocab)
    delta = rng.integers(0, n_states, size=(n_states, m))
    acc = rng.random(n_states) < 0.5
    return au.minimize(Dfa(vocab, delta, 0, acc))


def random_nba(rng: np.random.Generator, vocab: Sequence[str], n_states: int) -> Nba:
    """Successor sets are intersections of two uniform subsets, which keeps
    the branching moderate."""
    m = 2 ** len(vocab)
    full = 2 ** n_states
    succ = [[int(rng.integers(0, full)) & int(rng.integers(0, full)) for _ in range(m)]
            for _ in range(n_states)]
    initial = 1 << int(rng.integers(0, n_states))
    if rng.random() < 0.2:
        initial |= 1
    return Nba(vocab, succ, initial, int(rng.integers(0, full)))


__all__ = [
    "random_dfa", "random_formula", "random_future_formula", "random_nba",
    "random_separated_formula", "random_state_formula", "rng_from", "strictly_future",
    "strictly_past",
]
