"""Formula syntax for ITL with neighbourhood modalities.

Formulas are immutable trees, hashed and compared by value. Derived
connectives are kept as their own node kinds so that rendered output stays
readable; :func:`desugar` expands them to the basic connectives
``false, p, ->, next, ;, *, <l>, <r>``.

Concrete grammar (loosest binding first)::

    exists p. A                  binder, extends as far right as possible
    A -> B     A <-> B           right associative
    A | B
    A & B
    w proj A   w projinv A       non associative
    A ; B                        right associative
    ~ next prev <l> <r> [l] [r] dia di box bi fin box_a dia_a   prefix
    A*                           postfix
    false true empty skip p (A)
"""
from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping, Sequence

# node kinds
FALSE = "false"
TRUE = "true"
VAR = "var"
NOT = "not"
AND = "and"
OR = "or"
IMP = "imp"
IFF = "iff"
NEXT = "next"
PREV = "prev"
CHOP = "chop"
STAR = "star"
DL = "dl"
DR = "dr"
BL = "bl"
BR = "br"
EMPTY = "empty"
SKIP = "skip"
DIA = "dia"
DI = "di"
BOX = "box"
BI = "bi"
FIN = "fin"
BOXA = "box_a"
DIAA = "dia_a"
EXISTS = "exists"
PROJ = "proj"
PROJINV = "projinv"

BASIC_KINDS = frozenset({FALSE, VAR, IMP, NEXT, CHOP, STAR, DL, DR})
BOOLEAN_KINDS = frozenset({FALSE, TRUE, NOT, AND, OR, IMP, IFF})
NEIGHBOURHOOD_KINDS = frozenset({DL, DR, BL, BR, BOXA, DIAA})
INPUT_ONLY_KINDS = frozenset({EXISTS, PROJ, PROJINV})

_UNARY_KEYWORDS = {
    "next": NEXT, "prev": PREV, "dia": DIA, "di": DI, "box": BOX, "bi": BI,
    "fin": FIN, "box_a": BOXA, "dia_a": DIAA,
}
_UNARY_SYMBOLS = {"~": NOT, "<l>": DL, "<r>": DR, "[l]": BL, "[r]": BR}
_CONSTANTS = {"false": FALSE, "true": TRUE, "empty": EMPTY, "skip": SKIP}
KEYWORDS = frozenset(_UNARY_KEYWORDS) | frozenset(_CONSTANTS) | {"exists", "proj", "projinv"}

IDENT_RE = re.compile(r"[a-z][a-z0-9]*\Z")


class Formula:
    """An immutable formula node.

    ``kind`` is one of the module-level kind constants, ``args`` the child
    formulas and ``name`` the variable identifier for ``var`` and ``exists``
    nodes.
    """

    __slots__ = ("kind", "args", "name", "_hash")

    def __init__(self, kind: str, args: tuple = (), name: str | None = None):
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "args", tuple(args))
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_hash", hash((kind, name, self.args)))

    def __setattr__(self, key, value):
        raise AttributeError("Formula is immutable")

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Formula) or self._hash != other._hash:
            return False
        return self.kind == other.kind and self.name == other.name and self.args == other.args

    def __repr__(self) -> str:
        return f"Formula({render(self)!r})"

    def __str__(self) -> str:
        return render(self)

    def __reduce__(self):
        return (Formula, (self.kind, self.args, self.name))

    # operator sugar for building formulas in tests and scripts
    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __invert__(self) -> "Formula":
        return Not(self)

    def __rshift__(self, other: "Formula") -> "Formula":
        return Imp(self, other)


def Var(name: str) -> Formula:
    return Formula(VAR, (), name)


def Not(a: Formula) -> Formula:
    return Formula(NOT, (a,))


def And(a: Formula, b: Formula) -> Formula:
    return Formula(AND, (a, b))


def Or(a: Formula, b: Formula) -> Formula:
    return Formula(OR, (a, b))


def Imp(a: Formula, b: Formula) -> Formula:
    return Formula(IMP, (a, b))


def Iff(a: Formula, b: Formula) -> Formula:
    return Formula(IFF, (a, b))


def Next(a: Formula) -> Formula:
    return Formula(NEXT, (a,))


def Prev(a: Formula) -> Formula:
    return Formula(PREV, (a,))


def Chop(a: Formula, b: Formula) -> Formula:
    return Formula(CHOP, (a, b))


def ChopStar(a: Formula) -> Formula:
    return Formula(STAR, (a,))


def DiamondL(a: Formula) -> Formula:
    return Formula(DL, (a,))


def DiamondR(a: Formula) -> Formula:
    return Formula(DR, (a,))


def BoxL(a: Formula) -> Formula:
    return Formula(BL, (a,))


def BoxR(a: Formula) -> Formula:
    return Formula(BR, (a,))


def Diamond(a: Formula) -> Formula:
    return Formula(DIA, (a,))


def Di(a: Formula) -> Formula:
    return Formula(DI, (a,))


def Box(a: Formula) -> Formula:
    return Formula(BOX, (a,))


def Bi(a: Formula) -> Formula:
    return Formula(BI, (a,))


def Fin(a: Formula) -> Formula:
    return Formula(FIN, (a,))


def BoxA(a: Formula) -> Formula:
    return Formula(BOXA, (a,))


def DiamondA(a: Formula) -> Formula:
    return Formula(DIAA, (a,))


def Exists(p: str, a: Formula) -> Formula:
    return Formula(EXISTS, (a,), p)


def Proj(w: Formula, a: Formula) -> Formula:
    return Formula(PROJ, (w, a))


def ProjInv(w: Formula, a: Formula) -> Formula:
    return Formula(PROJINV, (w, a))


FALSE_F = Formula(FALSE)
TRUE_F = Formula(TRUE)
EMPTY_F = Formula(EMPTY)
SKIP_F = Formula(SKIP)


# ---------------------------------------------------------------- builders
# Simplifying constructors used by generated formulas; they fold constants.

def neg(a: Formula) -> Formula:
    if a.kind == TRUE:
        return FALSE_F
    if a.kind == FALSE:
        return TRUE_F
    if a.kind == NOT:
        return a.args[0]
    return Not(a)


def conj(*fs: Formula) -> Formula:
    out: list[Formula] = []
    for f in fs:
        if f.kind == FALSE:
            return FALSE_F
        if f.kind == TRUE or f in out:
            continue
        out.append(f)
    if not out:
        return TRUE_F
    return _fold(And, out)


def disj(*fs: Formula) -> Formula:
    out: list[Formula] = []
    for f in fs:
        if f.kind == TRUE:
            return TRUE_F
        if f.kind == FALSE or f in out:
            continue
        out.append(f)
    if not out:
        return FALSE_F
    return _fold(Or, out)


def _fold(op, items: Sequence[Formula]) -> Formula:
    acc = items[0]
    for f in items[1:]:
        acc = op(acc, f)
    return acc


def seq(*fs: Formula) -> Formula:
    """Right-nested chop of ``fs``; ``false`` absorbs."""
    if any(f.kind == FALSE for f in fs):
        return FALSE_F
    acc = fs[-1]
    for f in reversed(fs[:-1]):
        acc = Chop(f, acc)
    return acc


def strict_seq(a: Formula, b: Formula) -> Formula:
    """``a ; skip ; b``: ordinary (non-overlapping) concatenation."""
    if a.kind == FALSE or b.kind == FALSE:
        return FALSE_F
    return Chop(a, Chop(SKIP_F, b))


# ------------------------------------------------------------------ errors

class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UndeclaredVariable(ParseError):
    pass


class CaptureError(ValueError):
    pass


class UnsupportedFormula(ValueError):
    """Raised when an operation receives a node kind it does not handle."""


class NotSeparated(ValueError):
    def __init__(self, subformula: Formula, reason: str = "not separated"):
        super().__init__(f"{reason}: {render(subformula)}")
        self.subformula = subformula


# ----------------------------------------------------------------- parsing

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<sym><->|->|<l>|<r>|\[l\]|\[r\]|[~&|;*().])|(?P<word>[A-Za-z_][A-Za-z0-9_]*))"
)


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start("sym") if m.group("sym") else m.start("word")
        tokens.append((m.group("sym") or m.group("word"), start))
        pos = m.end()
    tokens.append(("<eof>", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, vocab: Iterable[str] | None):
        self.tokens = _tokenize(text)
        self.i = 0
        self.vocab = None if vocab is None else set(vocab)

    @property
    def tok(self) -> str:
        return self.tokens[self.i][0]

    @property
    def pos(self) -> int:
        return self.tokens[self.i][1]

    def take(self) -> str:
        t = self.tok
        self.i += 1
        return t

    def expect(self, t: str) -> None:
        if self.tok != t:
            raise ParseError(f"expected {t!r}, found {self.tok!r}", self.pos)
        self.i += 1

    def ident(self) -> str:
        t, pos = self.tokens[self.i]
        if t in KEYWORDS or not IDENT_RE.match(t):
            raise ParseError(f"expected a variable, found {t!r}", pos)
        if self.vocab is not None and t not in self.vocab:
            raise UndeclaredVariable(f"undeclared variable {t!r}", pos)
        self.i += 1
        return t

    def parse(self) -> Formula:
        f = self.implication()
        if self.tok != "<eof>":
            raise ParseError(f"unexpected {self.tok!r}", self.pos)
        return f

    def implication(self) -> Formula:
        if self.tok == "exists":
            return self.binder()
        left = self.disjunction()
        if self.tok in ("->", "<->"):
            op = self.take()
            right = self.implication()
            return Imp(left, right) if op == "->" else Iff(left, right)
        return left

    def binder(self) -> Formula:
        self.expect("exists")
        p = self.ident()
        self.expect(".")
        return Exists(p, self.implication())

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.tok == "|":
            self.take()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.projection()
        while self.tok == "&":
            self.take()
            f = And(f, self.projection())
        return f

    def projection(self) -> Formula:
        left = self.chop()
        if self.tok in ("proj", "projinv"):
            op = self.take()
            right = self.chop()
            return Proj(left, right) if op == "proj" else ProjInv(left, right)
        return left

    def chop(self) -> Formula:
        left = self.unary()
        if self.tok == ";":
            self.take()
            return Chop(left, self.chop())
        return left

    def unary(self) -> Formula:
        t = self.tok
        if t in _UNARY_SYMBOLS:
            self.take()
            return Formula(_UNARY_SYMBOLS[t], (self.unary(),))
        if t in _UNARY_KEYWORDS:
            self.take()
            return Formula(_UNARY_KEYWORDS[t], (self.unary(),))
        if t == "exists":
            return self.binder()
        return self.postfix()

    def postfix(self) -> Formula:
        f = self.atom()
        while self.tok == "*":
            self.take()
            f = ChopStar(f)
        return f

    def atom(self) -> Formula:
        t = self.tok
        if t == "(":
            self.take()
            f = self.implication()
            self.expect(")")
            return f
        if t in _CONSTANTS:
            self.take()
            return Formula(_CONSTANTS[t])
        if t == "<eof>":
            raise ParseError("unexpected end of input", self.pos)
        if t in KEYWORDS or not IDENT_RE.match(t):
            raise ParseError(f"unexpected {t!r}", self.pos)
        return Var(self.ident())


def parse(text: str, vocab: Iterable[str] | None = None) -> Formula:
    """Parse ``text``; when ``vocab`` is given every identifier must be in it."""
    return _Parser(text, vocab).parse()


# --------------------------------------------------------------- rendering

_LEVEL = {
    EXISTS: 1, IMP: 2, IFF: 2, OR: 3, AND: 4, PROJ: 5, PROJINV: 5, CHOP: 6,
    NOT: 7, NEXT: 7, PREV: 7, DL: 7, DR: 7, BL: 7, BR: 7, DIA: 7, DI: 7,
    BOX: 7, BI: 7, FIN: 7, BOXA: 7, DIAA: 7, STAR: 8,
}
_PREFIX = {NOT: "~", DL: "<l> ", DR: "<r> ", BL: "[l] ", BR: "[r] "}
_PREFIX.update({k: kw + " " for kw, k in _UNARY_KEYWORDS.items()})
_INFIX = {IMP: "->", IFF: "<->", OR: "|", AND: "&", CHOP: ";", PROJ: "proj", PROJINV: "projinv"}
_CONST_TEXT = {v: k for k, v in _CONSTANTS.items()}


def render(f: Formula) -> str:
    return _render(f)[0]


@functools.lru_cache(maxsize=1 << 16)
def _render(f: Formula) -> tuple[str, int]:
    k = f.kind
    if k == VAR:
        return f.name, 9
    if k in _CONST_TEXT:
        return _CONST_TEXT[k], 9
    level = _LEVEL[k]
    if k == EXISTS:
        return f"exists {f.name}. {render(f.args[0])}", level
    if k == STAR:
        return _wrap(f.args[0], 8) + "*", level
    if k in _PREFIX:
        return _PREFIX[k] + _wrap(f.args[0], 7), level
    a, b = f.args
    if k in (AND, OR):
        left, right = _wrap(a, level), _wrap(b, level + 1)
    elif k in (PROJ, PROJINV):
        left, right = _wrap(a, level + 1), _wrap(b, level + 1)
    else:  # right associative
        left, right = _wrap(a, level + 1), _wrap(b, level)
    return f"{left} {_INFIX[k]} {right}", level


def _wrap(f: Formula, min_level: int) -> str:
    text, level = _render(f)
    if level < min_level or (f.kind == EXISTS and min_level > 1):
        return f"({text})"
    return text


# ---------------------------------------------------------------- traversal

def subformulas(f: Formula) -> Iterator[Formula]:
    """Pre-order traversal (with repetitions)."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(g.args))


def size(f: Formula) -> int:
    return sum(1 for _ in subformulas(f))


def kinds(f: Formula) -> set[str]:
    return {g.kind for g in subformulas(f)}


def variables(f: Formula) -> tuple[frozenset[str], frozenset[str]]:
    """Return ``(free, bound)`` variable sets of ``f``."""
    free: set[str] = set()
    bound: set[str] = set()

    def walk(g: Formula, scope: frozenset[str]) -> None:
        if g.kind == VAR:
            if g.name not in scope:
                free.add(g.name)
            return
        if g.kind == EXISTS:
            bound.add(g.name)
            scope = scope | {g.name}
        for a in g.args:
            walk(a, scope)

    walk(f, frozenset())
    return frozenset(free), frozenset(bound)


def free_vars(f: Formula) -> frozenset[str]:
    return variables(f)[0]


def all_vars(f: Formula) -> frozenset[str]:
    free, bound = variables(f)
    return free | bound


def map_formula(f: Formula, fn: Callable[[Formula], Formula | None]) -> Formula:
    """Bottom-up rewrite; ``fn`` returns a replacement or ``None`` to keep."""
    memo: dict[Formula, Formula] = {}

    def go(g: Formula) -> Formula:
        if g in memo:
            return memo[g]
        args = tuple(go(a) for a in g.args)
        h = g if args == g.args else Formula(g.kind, args, g.name)
        r = fn(h)
        out = h if r is None else r
        memo[g] = out
        return out

    return go(f)


def substitute_var(f: Formula, p: str, q: str) -> Formula:
    """Replace every free occurrence of ``p`` by ``q``.

    Raises :class:`CaptureError` if an occurrence of ``p`` sits under a
    binder for ``q``.
    """

    def go(g: Formula, bound: frozenset[str]) -> Formula:
        if g.kind == VAR:
            if g.name == p and p not in bound:
                if q in bound:
                    raise CaptureError(f"{q} is bound at a free occurrence of {p}")
                return Var(q)
            return g
        if g.kind == EXISTS:
            bound = bound | {g.name}
        args = tuple(go(a, bound) for a in g.args)
        return g if args == g.args else Formula(g.kind, args, g.name)

    return go(f, frozenset())


def substitute(f: Formula, mapping: Mapping[Formula, Formula]) -> Formula:
    """Replace whole subformulas (outermost match wins)."""

    def go(g: Formula) -> Formula:
        if g in mapping:
            return mapping[g]
        args = tuple(go(a) for a in g.args)
        return g if args == g.args else Formula(g.kind, args, g.name)

    return go(f)


def fresh_var(avoid: Iterable[str], base: str = "p") -> str:
    avoid = set(avoid)
    base = base.rstrip("0123456789") or "p"
    for n in itertools.count(1):
        cand = f"{base}{n}"
        if cand not in avoid:
            return cand
    raise AssertionError  # pragma: no cover


# ---------------------------------------------------------------- desugaring

def desugar_step(f: Formula) -> Formula:
    """Expand a single derived node by its defining equation."""
    k = f.kind
    a = f.args
    t = Imp(FALSE_F, FALSE_F)
    if k == TRUE:
        return t
    if k == NOT:
        return Imp(a[0], FALSE_F)
    if k == AND:
        return Not(Imp(a[0], Not(a[1])))
    if k == OR:
        return Imp(Not(a[0]), a[1])
    if k == IFF:
        return And(Imp(a[0], a[1]), Imp(a[1], a[0]))
    if k == EMPTY:
        return Not(Next(TRUE_F))
    if k == SKIP:
        return Next(EMPTY_F)
    if k == PREV:
        return Chop(a[0], SKIP_F)
    if k == DIA:
        return Chop(TRUE_F, a[0])
    if k == DI:
        return Chop(a[0], TRUE_F)
    if k == BOX:
        return Not(Diamond(Not(a[0])))
    if k == BI:
        return Not(Di(Not(a[0])))
    if k == BL:
        return Not(DiamondL(Not(a[0])))
    if k == BR:
        return Not(DiamondR(Not(a[0])))
    if k == FIN:
        return Box(Imp(EMPTY_F, a[0]))
    if k == DIAA:
        return DiamondR(DiamondR(DiamondL(DiamondL(a[0]))))
    if k == BOXA:
        return Not(DiamondA(Not(a[0])))
    return f


def desugar(f: Formula) -> Formula:
    """Fully expand derived connectives; input-only nodes are kept."""
    memo: dict[Formula, Formula] = {}

    def go(g: Formula) -> Formula:
        if g in memo:
            return memo[g]
        if g.kind in BASIC_KINDS or g.kind in INPUT_ONLY_KINDS:
            args = tuple(go(x) for x in g.args)
            out = Formula(g.kind, args, g.name)
        else:
            out = go(desugar_step(g))
        memo[g] = out
        return out

    return go(f)


# ------------------------------------------------------------ classification

def is_state_formula(f: Formula) -> bool:
    return all(g.kind in BOOLEAN_KINDS or g.kind == VAR for g in subformulas(f))


def is_introspective(f: Formula) -> bool:
    return not any(g.kind in NEIGHBOURHOOD_KINDS for g in subformulas(f))


def has_input_only(f: Formula) -> bool:
    return any(g.kind in INPUT_ONLY_KINDS for g in subformulas(f))


def is_future(f: Formula) -> bool:
    """Boolean combinations of introspective formulas and ``<r>``/``[r]`` of
    future formulas; also ``<r>(C ; F)`` with ``C`` introspective."""
    if is_introspective(f):
        return True
    k = f.kind
    if k in BOOLEAN_KINDS:
        return all(is_future(a) for a in f.args)
    if k in (DR, BR):
        body = f.args[0]
        if body.kind == CHOP and is_introspective(body.args[0]):
            return is_future(body.args[1])
        return is_future(body)
    return False


def is_past(f: Formula) -> bool:
    if is_introspective(f):
        return True
    k = f.kind
    if k in BOOLEAN_KINDS:
        return all(is_past(a) for a in f.args)
    if k in (DL, BL):
        body = f.args[0]
        if body.kind == CHOP and is_introspective(body.args[1]):
            return is_past(body.args[0])
        return is_past(body)
    return False


def is_strictly_future(f: Formula) -> bool:
    """``<r>(skip ; F)`` with ``F`` future."""
    if f.kind != DR:
        return False
    body = f.args[0]
    return body.kind == CHOP and body.args[0].kind == SKIP and is_future(body.args[1])


def is_strictly_past(f: Formula) -> bool:
    if f.kind != DL:
        return False
    body = f.args[0]
    return body.kind == CHOP and body.args[1].kind == SKIP and is_past(body.args[0])


def boolean_atoms(f: Formula) -> list[Formula]:
    """Maximal non-Boolean subformulas, grouping introspective subtrees.

    A Boolean subtree that is introspective as a whole counts as one atom.
    """
    atoms: list[Formula] = []

    def walk(g: Formula) -> None:
        if g.kind in BOOLEAN_KINDS and not is_introspective(g):
            for a in g.args:
                walk(a)
        elif g.kind not in (TRUE, FALSE) and g not in atoms:
            atoms.append(g)

    walk(f)
    return atoms


def simplify_bool(f: Formula) -> Formula:
    """Fold Boolean constants (no other rewriting)."""
    k = f.kind
    if k not in BOOLEAN_KINDS or k in (TRUE, FALSE):
        return f
    args = [simplify_bool(a) for a in f.args]
    if k == NOT:
        return neg(args[0])
    if k == AND:
        return conj(*args)
    if k == OR:
        return disj(*args)
    a, b = args
    if k == IMP:
        if a.kind == FALSE or b.kind == TRUE:
            return TRUE_F
        if a.kind == TRUE:
            return b
        if b.kind == FALSE:
            return neg(a)
        return Imp(a, b)
    # IFF
    if a.kind == TRUE:
        return b
    if b.kind == TRUE:
        return a
    if a.kind == FALSE:
        return neg(b)
    if b.kind == FALSE:
        return neg(a)
    return Iff(a, b)


def assign_atoms(f: Formula, values: Mapping[Formula, bool]) -> Formula:
    """Replace atoms by truth constants and fold."""
    return simplify_bool(substitute(f, {a: (TRUE_F if v else FALSE_F) for a, v in values.items()}))


def classify(f: Formula) -> str:
    """One of ``state``, ``introspective``, ``strictly-future``,
    ``strictly-past``, ``future``, ``past``, ``separated`` or ``other``."""
    if is_state_formula(f):
        return "state"
    if is_introspective(f):
        return "introspective"
    if is_strictly_future(f):
        return "strictly-future"
    if is_strictly_past(f):
        return "strictly-past"
    if is_future(f):
        return "future"
    if is_past(f):
        return "past"
    try:
        separated_dnf(f)
        return "separated"
    except (NotSeparated, ValueError):
        return "other"


# ------------------------------------------------------------ time reversal

def time_reverse(f: Formula) -> Formula:
    """Mirror image ``A^-1``: evaluating it on the reversed trace with swapped
    endpoints agrees with ``A``."""
    memo: dict[Formula, Formula] = {}

    def go(g: Formula) -> Formula:
        if g in memo:
            return memo[g]
        k = g.kind
        a = g.args
        if k in INPUT_ONLY_KINDS:
            raise UnsupportedFormula(f"cannot reverse {k} node")
        if k == VAR:
            out = Fin(g)
        elif k in (TRUE, FALSE, EMPTY, SKIP):
            out = g
        elif k in (NOT, AND, OR, IMP, IFF, STAR):
            out = Formula(k, tuple(go(x) for x in a))
        elif k == CHOP:
            out = Chop(go(a[1]), go(a[0]))
        elif k in _MIRROR:
            out = Formula(_MIRROR[k], (go(a[0]),))
        elif k == FIN:
            out = Bi(Imp(EMPTY_F, go(a[0])))
        elif k in (BOXA, DIAA):
            out = go(desugar_step(g))
        else:  # pragma: no cover
            raise UnsupportedFormula(k)
        memo[g] = out
        return out

    return go(f)


_MIRROR = {NEXT: PREV, PREV: NEXT, DL: DR, DR: DL, BL: BR, BR: BL, DIA: DI, DI: DIA, BOX: BI, BI: BOX}


# ------------------------------------------------------------ separated DNF

@dataclass(frozen=True)
class SeparatedDisjunct:
    past: Formula
    introspective: Formula
    future: Formula

    def formula(self) -> Formula:
        return conj(self.past, self.introspective, self.future)


@dataclass(frozen=True)
class SeparatedDnf:
    disjuncts: tuple[SeparatedDisjunct, ...]

    def formula(self) -> Formula:
        return disj(*(d.formula() for d in self.disjuncts))

    def __iter__(self):
        return iter(self.disjuncts)

    def __len__(self) -> int:
        return len(self.disjuncts)


MAX_DNF_ATOMS = 16


def separated_dnf(f: Formula, max_atoms: int = MAX_DNF_ATOMS) -> SeparatedDnf:
    """Disjunctive normal form over strictly past / introspective / strictly
    future components.

    Modal atoms are branched on by Shannon expansion; for each branch the
    introspective remainder is kept as a single formula.
    """
    atoms = boolean_atoms(f)
    past, future = [], []
    for a in atoms:
        if is_introspective(a):
            continue
        if is_strictly_future(a):
            future.append(a)
        elif is_strictly_past(a):
            past.append(a)
        else:
            raise NotSeparated(_offender(a), "not a strictly past/future atom")
    if len(atoms) > max_atoms:
        raise ValueError(f"{len(atoms)} atoms exceed the DNF limit {max_atoms}")

    def literal(atom: Formula, value: bool) -> Formula:
        return atom if value else Not(atom)

    modal = past + future
    out: list[SeparatedDisjunct] = []

    def expand(g: Formula, i: int, chosen: dict[Formula, bool]) -> None:
        if g.kind == FALSE:
            return
        present = set(subformulas(g))
        while i < len(modal) and modal[i] not in present:
            i += 1
        if i == len(modal):
            p = conj(*(literal(a, chosen[a]) for a in past if a in chosen))
            fu = conj(*(literal(a, chosen[a]) for a in future if a in chosen))
            out.append(SeparatedDisjunct(p, g, fu))
            return
        a = modal[i]
        for v in (True, False):
            expand(assign_atoms(g, {a: v}), i + 1, {**chosen, a: v})

    expand(simplify_bool(f), 0, {})
    return SeparatedDnf(tuple(out))


def _offender(a: Formula) -> Formula:
    for g in subformulas(a):
        if g is not a and g.kind in NEIGHBOURHOOD_KINDS:
            return g
    return a
