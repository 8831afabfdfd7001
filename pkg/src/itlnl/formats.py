"""Text formats for windows, lassos and automata, plus DOT export.

Window file::

    {p} {} {p,q}
    # ref 0 1

Letters are whitespace separated; the ``# ref i j`` line is optional and
defaults to the whole window. Lasso file::

    stem: {p} {}
    loop: {q}

Automaton file (``dfa``, ``nfa``, ``nba`` or ``dpa``)::

    nba
    vocab: p q
    states: 2
    initial: 0
    0 --{p}--> 1
    1 --{}--> 1
    accepting: 1

A DPA lists ``priority q = n`` lines instead of ``accepting:``. Missing
DFA/DPA transitions go to an added rejecting sink; a DPA sink gets the
odd priority one above the largest used.
"""
from __future__ import annotations

import re
from typing import Sequence

import numpy as np

from . import automata as au
from . import syntax as S
from .automata import Dfa, Dpa, Nba, Nfa
from .semantics import Lasso, Window, format_letter


class FormatError(ValueError):
    pass


_LETTER = re.compile(r"\{([^{}]*)\}")
_EDGE = re.compile(r"^(\d+)\s*--(\{[^{}]*\})-->\s*(\d+)$")
_PRIO = re.compile(r"^priority\s+(\d+)\s*=\s*(\d+)$")
_NAME = S.IDENT_RE


def parse_letter(token: str) -> frozenset:
    m = _LETTER.fullmatch(token.strip())
    if not m:
        raise FormatError(f"not a letter: {token!r}")
    names = [x.strip() for x in m.group(1).split(",") if x.strip()]
    for x in names:
        if not _NAME.match(x):
            raise FormatError(f"bad variable name {x!r} in {token!r}")
    return frozenset(names)


def parse_letters(text: str) -> tuple:
    text = text.strip()
    if not text:
        return ()
    tokens = re.findall(r"\{[^{}]*\}|\S+", text)
    return tuple(parse_letter(t) for t in tokens)


def parse_window(text: str) -> Window:
    letters: list = []
    ref = None
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = re.fullmatch(r"#\s*ref\s+(\d+)\s+(\d+)", line)
            if not m:
                raise FormatError(f"bad reference line {line!r}")
            ref = (int(m.group(1)), int(m.group(2)))
            continue
        if "#" in line:
            body, tail = line.split("#", 1)
            letters.extend(parse_letters(body))
            m = re.fullmatch(r"\s*ref\s+(\d+)\s+(\d+)\s*", tail)
            if not m:
                raise FormatError(f"bad reference {tail!r}")
            ref = (int(m.group(1)), int(m.group(2)))
            continue
        letters.extend(parse_letters(line))
    if not letters:
        raise FormatError("window has no letters")
    i, j = ref if ref is not None else (0, len(letters) - 1)
    try:
        return Window(tuple(letters), i, j)
    except ValueError as e:
        raise FormatError(str(e)) from None


def format_window(W: Window, vocab: Sequence[str] | None = None) -> str:
    return " ".join(format_letter(s, vocab) for s in W.states) + f" # ref {W.i} {W.j}"


def parse_lasso(text: str) -> Lasso:
    stem, loop = (), None
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition(":")
        key = key.strip()
        if key == "stem":
            stem = parse_letters(rest)
        elif key == "loop":
            loop = parse_letters(rest)
        else:
            raise FormatError(f"expected 'stem:' or 'loop:', got {line!r}")
    if not loop:
        raise FormatError("a lasso needs a non-empty 'loop:' line")
    return Lasso(stem, loop)


def format_lasso(L: Lasso, vocab: Sequence[str] | None = None) -> str:
    stem = " ".join(format_letter(s, vocab) for s in L.stem)
    loop = " ".join(format_letter(s, vocab) for s in L.loop)
    return f"stem: {stem}".rstrip() + f"\nloop: {loop}"


# ------------------------------------------------------------ automata

KINDS = ("dfa", "nfa", "nba", "dpa")


def _code(letter: frozenset, vocab: Sequence[str]) -> int:
    extra = letter - set(vocab)
    if extra:
        raise FormatError(f"letter uses variables outside the vocabulary: {sorted(extra)}")
    return sum(1 << k for k, p in enumerate(vocab) if p in letter)


def _ints(text: str, what: str) -> list[int]:
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise FormatError(f"bad {what}: {text!r}") from None


def parse_automaton(text: str, vocab: Sequence[str] | None = None):
    """Parse an automaton file into a :class:`Dfa`, :class:`Nfa`,
    :class:`Nba` or :class:`Dpa`."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or lines[0] not in KINDS:
        raise FormatError(f"first line must be one of {', '.join(KINDS)}")
    kind = lines[0]
    n_states = None
    initial: list[int] = []
    accepting: list[int] = []
    prio: dict[int, int] = {}
    edges: list[tuple[int, frozenset, int]] = []
    file_vocab = None
    for line in lines[1:]:
        m = _EDGE.match(line)
        if m:
            edges.append((int(m.group(1)), parse_letter(m.group(2)), int(m.group(3))))
            continue
        m = _PRIO.match(line)
        if m:
            prio[int(m.group(1))] = int(m.group(2))
            continue
        key, sep, rest = line.partition(":")
        if not sep:
            raise FormatError(f"unrecognized line {line!r}")
        key = key.strip()
        if key == "vocab":
            file_vocab = tuple(rest.replace(",", " ").split())
        elif key == "states":
            vals = _ints(rest, "state count")
            if len(vals) != 1:
                raise FormatError(f"bad state count: {rest!r}")
            n_states = vals[0]
        elif key == "initial":
            initial = _ints(rest, "initial states")
        elif key == "accepting":
            accepting = _ints(rest, "accepting states")
        else:
            raise FormatError(f"unknown field {key!r}")
    if n_states is None or n_states <= 0:
        raise FormatError("missing or empty 'states:' line")
    if not initial:
        raise FormatError("missing 'initial:' line")
    if file_vocab is None:
        used = set().union(*[e[1] for e in edges]) if edges else set()
        file_vocab = tuple(vocab) if vocab is not None else tuple(sorted(used))
    vocab = file_vocab
    for q in initial + accepting + list(prio) + [e[0] for e in edges] + [e[2] for e in edges]:
        if not 0 <= q < n_states:
            raise FormatError(f"state {q} out of range 0..{n_states - 1}")
    m = 2 ** len(vocab)
    if kind in ("dfa", "dpa"):
        if len(initial) != 1:
            raise FormatError(f"a {kind} has exactly one initial state")
        delta = -np.ones((n_states, m), dtype=np.int64)
        for q, letter, r in edges:
            c = _code(letter, vocab)
            if delta[q, c] >= 0 and delta[q, c] != r:
                raise FormatError(f"{kind} has two {format_letter(letter)}-transitions from {q}")
            delta[q, c] = r
        missing = delta < 0
        if missing.any():
            delta = np.vstack([delta, np.full((1, m), n_states)])
            delta[delta < 0] = n_states
        if kind == "dfa":
            return Dfa(vocab, delta, initial[0], accepting)
        if accepting:
            raise FormatError("a dpa uses 'priority q = n' lines, not 'accepting:'")
        if len(prio) != n_states:
            raise FormatError("every dpa state needs a priority")
        p = [prio[q] for q in range(n_states)]
        if missing.any():
            top = max(p) + 1
            p.append(top if top % 2 else top + 1)
        return Dpa(vocab, delta, initial[0], p)
    if prio:
        raise FormatError(f"priorities are only allowed in a dpa, not a {kind}")
    succ = [[0] * m for _ in range(n_states)]
    for q, letter, r in edges:
        succ[q][_code(letter, vocab)] |= 1 << r
    init = sum(1 << q for q in set(initial))
    acc = sum(1 << q for q in set(accepting))
    return (Nfa if kind == "nfa" else Nba)(vocab, succ, init, acc)


def kind_of(a) -> str:
    for cls, name in ((Dfa, "dfa"), (Nfa, "nfa"), (Nba, "nba"), (Dpa, "dpa")):
        if isinstance(a, cls):
            return name
    raise TypeError(f"not an automaton: {a!r}")


def _edges(a):
    """``(q, code, r)`` triples in state/letter order."""
    if isinstance(a, (Dfa, Dpa)):
        for q in range(a.n_states):
            for c in range(a.n_letters):
                yield q, c, int(a.delta[q, c])
    else:
        for q in range(a.n_states):
            for c, s in enumerate(a.succ[q]):
                for r in au._bits(s):
                    yield q, c, r


def _initial(a) -> list[int]:
    if isinstance(a, (Dfa, Dpa)):
        return [a.initial]
    return list(au._bits(a.initial))


def _accepting(a) -> list[int]:
    if isinstance(a, Dfa):
        return [int(q) for q in np.flatnonzero(a.accepting)]
    return list(au._bits(a.accepting))


def format_automaton(a) -> str:
    vocab = a.vocab
    kind = kind_of(a)
    out = [kind, "vocab: " + " ".join(vocab), f"states: {a.n_states}",
           "initial: " + " ".join(map(str, _initial(a)))]
    for q, c, r in _edges(a):
        out.append(f"{q} --{au.format_code(c, vocab)}--> {r}")
    if kind == "dpa":
        out += [f"priority {q} = {int(p)}" for q, p in enumerate(a.priority)]
    else:
        out.append("accepting: " + " ".join(map(str, _accepting(a))))
    return "\n".join(out)


def to_dot(a, name: str = "A") -> str:
    """Graphviz rendering; parallel edges are merged into one label."""
    kind = kind_of(a)
    vocab = a.vocab
    acc = set() if kind == "dpa" else set(_accepting(a))
    lines = [f"digraph {name} {{", "  rankdir=LR;", '  node [shape=circle];']
    for q in range(a.n_states):
        attrs = []
        if q in acc:
            attrs.append("shape=doublecircle")
        if kind == "dpa":
            attrs.append(f'label="{q}/{int(a.priority[q])}"')
        lines.append(f"  {q}" + (f" [{', '.join(attrs)}]" if attrs else "") + ";")
    for k, q in enumerate(_initial(a)):
        lines.append(f'  init{k} [shape=point]; init{k} -> {q};')
    merged: dict[tuple[int, int], list[str]] = {}
    for q, c, r in _edges(a):
        merged.setdefault((q, r), []).append(au.format_code(c, vocab))
    for (q, r), labels in merged.items():
        lines.append(f'  {q} -> {r} [label="{" ".join(labels)}"];')
    lines.append("}")
    return "\n".join(lines)


__all__ = [
    "FormatError", "format_automaton", "format_lasso", "format_window", "kind_of",
    "parse_automaton", "parse_lasso", "parse_letter", "parse_letters", "parse_window", "to_dot",
]
