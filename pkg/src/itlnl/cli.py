"""Command-line front end: ``itl <command> [options] ...``.

Exit codes: 0 success or pass, 1 a semantic negative (counterexample,
invalid implication, undefinable variable, unsatisfiable or invalid
query) with its witness printed, 2 a usage, format or unsupported-input
error, 3 an internal verification failure.

Every transformation reports how its result was checked: ``exact`` when
backed by automaton equivalence or the decision procedure, ``bounded``
when only windows or lassos up to the configured sizes were examined.
With ``--json`` each invocation prints one object per line.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence, TextIO

import numpy as np

from . import __version__
from . import automata as au
from . import syntax as S
from .compile import (DEFAULT_OMEGA_GUARD, NotFutureFormula, NotIntrospective, dfa_to_formula,
                      future_to_nba, itl_to_dfa)
from .formats import (FormatError, format_automaton, format_lasso, format_window, kind_of,
                      parse_automaton, parse_lasso, parse_window, to_dot)
from .normal_forms import (GrammarError, VerificationError, full_system_chop, gnf,
                           strictify_syntactic, w_block_normal_form, w_closure_system)
from .omega import (ImplicationInvalid, NotImplicitlyDefined, beth_define, check_valid,
                    exists_elim, fin_formula, finitely_many_prefixes, interpolate,
                    reactivity_normal_form, strongest_consequence)
from .projection import pi_inverse_eliminate
from .semantics import (DEFAULT_BUDGET, Window, all_words, bounded_equiv_check, enumerate_lassos,
                        eval_lasso, eval_window, letter_code, tables_for_length, truth_table,
                        words_env)

COMMANDS = (
    "parse", "eval", "eval-lasso", "compile", "to-formula", "gnf", "decompose", "strictify",
    "wblocks", "wnf", "projinv", "qelim", "sc", "interpolate", "beth", "reactivity-nf", "fin",
    "check-equiv", "decide", "classify", "reverse",
)

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(ValueError):
    pass


@dataclass
class SessionConfig:
    """Settings shared by all commands."""

    vocab: tuple | None = None
    max_len: int = 5
    context: int = 3
    budget: int = DEFAULT_BUDGET
    guard: int = DEFAULT_OMEGA_GUARD
    nba_guard: int = au.DEFAULT_NBA_GUARD
    json: bool = False
    dot: bool = False
    timings: bool = False

    def __post_init__(self):
        for name in ("max_len", "context", "budget", "guard", "nba_guard"):
            if getattr(self, name) <= 0:
                raise UsageError(f"--{name.replace('_', '-')} must be positive")


@dataclass
class Report:
    """Outcome of one command: text lines plus the machine-readable fields."""

    command: str
    status: str
    lines: list[str] = field(default_factory=list)
    result: str | None = None
    witness: object = None
    exact: bool | None = None
    verification: str | None = None
    sizes: dict = field(default_factory=dict)
    code: int = EXIT_OK

    def text(self) -> str:
        return "\n".join(self.lines)

    def record(self, seconds: float | None) -> dict:
        rec = {"command": self.command, "status": self.status}
        if self.result is not None:
            rec["result"] = self.result
        if self.witness is not None:
            rec["witness"] = self.witness
        if self.exact is not None:
            rec["exact"] = self.exact
        if self.verification:
            rec["verification"] = self.verification
        rec["sizes"] = self.sizes
        rec["timings"] = {} if seconds is None else {"total_s": round(seconds, 6)}
        return rec


# ------------------------------------------------------------ input helpers

def _read(arg: str) -> str:
    if arg == "-":
        return sys.stdin.read()
    return arg


def _read_file_or_inline(arg: str) -> str:
    if arg == "-":
        return sys.stdin.read()
    if os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            return fh.read()
    return arg


def _vocab_arg(text: str | None) -> tuple | None:
    if text is None:
        return None
    names = tuple(x for x in text.replace(",", " ").split() if x)
    for x in names:
        if not S.IDENT_RE.match(x):
            raise UsageError(f"bad variable name {x!r} in --vocab")
    return names


class Session:
    def __init__(self, cfg: SessionConfig):
        self.cfg = cfg

    def formula(self, arg: str) -> S.Formula:
        return S.parse(_read(arg), self.cfg.vocab)

    def vocab_for(self, *fs: S.Formula, extra: Sequence[str] = ()) -> tuple:
        if self.cfg.vocab is not None:
            return tuple(self.cfg.vocab)
        names = set(extra)
        for f in fs:
            names |= S.free_vars(f)
        return tuple(sorted(names)) or ("p",)

    def lassos(self, vocab):
        k = self.cfg.context
        return enumerate_lassos(vocab, k, k)

    def fmt(self, f: S.Formula) -> str:
        return S.render(f)


def _bounded_note(cfg: SessionConfig) -> str:
    return f"bounded (windows <= {cfg.max_len})"


def _lasso_note(cfg: SessionConfig) -> str:
    return f"bounded (lassos with stem and loop <= {cfg.context})"


def _sizes(**items) -> dict:
    out = {}
    for k, v in items.items():
        if isinstance(v, S.Formula):
            out[k] = S.size(v)
        elif hasattr(v, "n_states"):
            out[k] = int(v.n_states)
        else:
            out[k] = v
    return out


def _require_introspective(A: S.Formula, what: str = "formula") -> None:
    if not S.is_introspective(A) or S.has_input_only(A):
        raise S.UnsupportedFormula(f"{what} must be introspective: {S.render(A)}")


def _exact_equal(A: S.Formula, d: au.Dfa) -> bool:
    return au.dfa_equivalent(itl_to_dfa(A, d.vocab), d)


def _window_agreement(A: S.Formula, d: au.Dfa, max_len: int) -> Window | None:
    """First word up to ``max_len`` where ``d`` and ``A`` on the whole word
    disagree."""
    vocab = d.vocab
    for n in range(1, max_len + 1):
        words = all_words(2 ** len(vocab), n)
        truth = tables_for_length(A, vocab, n)[:, 0, n - 1]
        acc = d.accepts_batch(words)
        bad = np.flatnonzero(truth != acc)
        if bad.size:
            w = words[int(bad[0])]
            return Window(tuple(au.letter_names(int(c), vocab) for c in w), 0, n - 1)
    return None


def _lasso_agreement(F: S.Formula, accepts: Callable, s: Session, vocab) -> object:
    for L in s.lassos(vocab):
        if eval_lasso(L, F, vocab) != accepts(L):
            return L
    return None


def _codes(L, vocab):
    return ([letter_code(x, vocab) for x in L.stem], [letter_code(x, vocab) for x in L.loop])


def _witness_text(w) -> str:
    if isinstance(w, Window):
        return format_window(w)
    if hasattr(w, "stem") and hasattr(w, "loop"):
        return format_lasso(w).replace("\n", " ")
    return str(w)


# ------------------------------------------------------------ commands

def cmd_parse(s: Session, a) -> Report:
    A = s.formula(a.formula)
    text = s.fmt(A)
    ok = S.parse(text) == A
    return Report("parse", "ok", [text], result=text, exact=ok,
                  verification="exact (render/parse round trip)" if ok else "round trip failed",
                  sizes=_sizes(formula=A), code=EXIT_OK if ok else EXIT_INTERNAL)


def cmd_classify(s: Session, a) -> Report:
    A = s.formula(a.formula)
    c = S.classify(A)
    return Report("classify", c, [c], result=c, sizes=_sizes(formula=A))


def cmd_reverse(s: Session, a) -> Report:
    A = s.formula(a.formula)
    R = S.time_reverse(A)
    vocab = s.vocab_for(A)
    if S.is_introspective(A) and not S.has_input_only(A):
        ok = au.dfa_equivalent(itl_to_dfa(R, vocab), au.reverse_dfa(itl_to_dfa(A, vocab)))
        exact, note = ok, "exact (mirror automaton)"
    else:
        ok = True
        for n in range(1, s.cfg.max_len + 1):
            words = all_words(2 ** len(vocab), n)
            ta = truth_table(A, words_env(words, vocab), s.cfg.budget)
            tr = truth_table(R, words_env(words[:, ::-1], vocab), s.cfg.budget)
            mirrored = tr[:, ::-1, ::-1].transpose(0, 2, 1)
            upper = np.triu(np.ones((n, n), dtype=bool))
            if ((ta != mirrored) & upper).any():
                ok = False
                break
        exact, note = False, _bounded_note(s.cfg)
    text = s.fmt(R)
    return Report("reverse", "ok" if ok else "mismatch", [text], result=text, exact=exact,
                  verification=note if ok else "mirror check failed",
                  sizes=_sizes(formula=R), code=EXIT_OK if ok else EXIT_INTERNAL)


def cmd_eval(s: Session, a) -> Report:
    A = s.formula(a.formula)
    W = parse_window(_read_file_or_inline(a.window))
    truth, exact = eval_window(W, A, s.cfg.budget)
    val = "true" if truth else "false"
    note = "exact" if exact else f"bounded (chop-star budget {s.cfg.budget})"
    return Report("eval", val, [val], result=val, exact=exact, verification=note,
                  sizes=_sizes(formula=A, window=len(W)))


def cmd_eval_lasso(s: Session, a) -> Report:
    F = s.formula(a.formula)
    text = _read_file_or_inline(a.lasso).replace("loop:", "\nloop:")
    L = parse_lasso(text)
    vocab = s.vocab_for(F, extra=set().union(*L.stem, *L.loop))
    val = "true" if eval_lasso(L, F, vocab) else "false"
    return Report("eval-lasso", val, [val], result=val, exact=True, verification="exact",
                  sizes=_sizes(formula=F, stem=len(L.stem), loop=len(L.loop)))


def cmd_compile(s: Session, a) -> Report:
    A = s.formula(a.formula)
    vocab = s.vocab_for(A)
    if S.is_introspective(A) and not S.has_input_only(A):
        aut = itl_to_dfa(A, vocab)
        bad = _window_agreement(A, aut, s.cfg.max_len)
        note = _bounded_note(s.cfg) + " against window evaluation"
    else:
        aut = future_to_nba(A, vocab, s.cfg.guard)
        if a.dpa:
            aut = au.nba_determinize(aut, s.cfg.nba_guard)
            bad = _lasso_agreement(A, lambda L: au.dpa_lasso_accepts(aut, *_codes(L, vocab)),
                                   s, vocab)
        else:
            bad = _lasso_agreement(A, lambda L: au.nba_lasso_accepts(aut, *_codes(L, vocab)),
                                   s, vocab)
        note = _lasso_note(s.cfg) + " against lasso evaluation"
    text = to_dot(aut) if s.cfg.dot else format_automaton(aut)
    if bad is not None:
        return Report("compile", "mismatch", [text], result=text, witness=_witness_text(bad),
                      exact=False, verification="disagreement found", code=EXIT_INTERNAL,
                      sizes=_sizes(states=aut))
    return Report("compile", "ok", [text], result=text, exact=False, verification=note,
                  sizes=_sizes(formula=A, states=aut))


def cmd_to_formula(s: Session, a) -> Report:
    aut = parse_automaton(_read_file_or_inline(a.automaton), s.cfg.vocab)
    kind = kind_of(aut)
    if kind == "nfa":
        aut = au.determinize_minimize(aut)
    elif kind != "dfa":
        raise UsageError(f"to-formula reads dfa or nfa files; use reactivity-nf for a {kind}")
    F = dfa_to_formula(aut)
    ok = _exact_equal(F, aut)
    text = s.fmt(F)
    return Report("to-formula", "ok" if ok else "mismatch", [text], result=text, exact=ok,
                  verification="exact (automaton equivalence)" if ok else "equivalence failed",
                  sizes=_sizes(states=aut, formula=F), code=EXIT_OK if ok else EXIT_INTERNAL)


def cmd_gnf(s: Session, a) -> Report:
    A = s.formula(a.formula)
    g = gnf(A, a.direction, s.vocab_for(A))
    lines = [f"empty: {s.fmt(g.empty_part)}"]
    for guard, cont in g.branches:
        lines.append(f"branch: {s.fmt(guard)} => {s.fmt(cont)}")
    F = g.formula()
    lines.append(f"formula: {s.fmt(F)}")
    return Report("gnf", "ok", lines, result=s.fmt(F), exact=True,
                  verification="exact (automaton equivalence of both readings)",
                  sizes=_sizes(branches=len(g.branches), formula=F))


def _decomposition_lines(s: Session, dec) -> list[str]:
    lines = [f"flavor: {dec.flavor}"]
    if dec.strict:
        lines.append(f"empty: {s.fmt(dec.empty_part)}")
    for k, (g, o) in enumerate(dec.pairs):
        lines.append(f"pair {k}: {s.fmt(g)} ;; {s.fmt(o)}")
    return lines


def _decomposition_result(dec) -> list:
    return [[S.render(g), S.render(o)] for g, o in dec.pairs]


def cmd_decompose(s: Session, a) -> Report:
    A = s.formula(a.formula)
    dec = full_system_chop(A, a.flavor, s.vocab_for(A))
    return Report("decompose", "ok", _decomposition_lines(s, dec),
                  result=json.dumps(_decomposition_result(dec)), exact=True,
                  verification="exact (both readings and the full-system guards)",
                  sizes=_sizes(pairs=len(dec.pairs)))


def cmd_strictify(s: Session, a) -> Report:
    A = s.formula(a.formula)
    vocab = s.vocab_for(A)
    dec = strictify_syntactic(A, full_system_chop(A, "nonstrict", vocab), vocab)
    return Report("strictify", "ok", _decomposition_lines(s, dec),
                  result=json.dumps(_decomposition_result(dec)), exact=True,
                  verification="exact (both readings and the full-system guards)",
                  sizes=_sizes(pairs=len(dec.pairs)))


def cmd_wblocks(s: Session, a) -> Report:
    A = s.formula(a.formula)
    w = s.formula(a.w)
    system = w_closure_system(A, w, s.vocab_for(A, w))
    lines = []
    for key, B in system.members.items():
        tag = "w" if key[1] else "~w"
        lines.append(f"member {key[0]} ({tag}): {s.fmt(B)}")
    for key in system.equations:
        lines.append(f"equation {key[0]} ({'w' if key[1] else '~w'}): "
                     f"{s.fmt(system.lhs(key))} == {s.fmt(system.rhs(key))}")
    n_pos = len(system.closure(True))
    n_neg = len(system.closure(False))
    return Report("wblocks", "ok", lines, exact=True,
                  verification="exact (each equation and its dual reading)",
                  sizes=_sizes(closure_w=n_pos, closure_not_w=n_neg, dfa=system.dfa_states))


def cmd_wnf(s: Session, a) -> Report:
    A = s.formula(a.formula)
    w = s.formula(a.w)
    F = w_block_normal_form(A, w, s.vocab_for(A, w))
    text = s.fmt(F)
    return Report("wnf", "ok", [text], result=text, exact=True,
                  verification="exact (automaton equivalence and block grammar)",
                  sizes=_sizes(formula=F))


def cmd_projinv(s: Session, a) -> Report:
    A = s.formula(a.formula)
    if a.w is None:
        if A.kind != S.PROJINV:
            raise UsageError("give --w or a formula of the form 'w projinv A'")
        w, A = A.args
    else:
        w = s.formula(a.w)
    F = pi_inverse_eliminate(w, A, s.vocab_for(A, w))
    text = s.fmt(F)
    return Report("projinv", "ok", [text], result=text, exact=True,
                  verification="exact (automaton equivalence with the closure construction)",
                  sizes=_sizes(formula=F))


def _hidden(s: Session, a, A: S.Formula) -> tuple[tuple, S.Formula]:
    hide = set(_vocab_arg(a.hide) or ())
    while A.kind == S.EXISTS:
        hide.add(A.name)
        A = A.args[0]
    if not hide:
        raise UsageError("nothing to eliminate: give --hide or an 'exists p.' prefix")
    return tuple(sorted(hide)), A


def _qelim_report(s: Session, command: str, A: S.Formula, hide: tuple, C: S.Formula) -> Report:
    vocab = s.vocab_for(A, extra=hide)
    text = s.fmt(C)
    if S.is_introspective(A):
        n = au.dfa_to_nfa(itl_to_dfa(A, vocab))
        for p in hide:
            n = au.relabel_dont_care(n, p)
        d = au.determinize_minimize(n)
        for p in hide:
            if p in d.vocab:
                d = au.drop_var(d, p)
        ok = _exact_equal(C, d)
        return Report(command, "ok" if ok else "mismatch", [text], result=text, exact=ok,
                      verification="exact (automaton equivalence with the relabeling closure)"
                      if ok else "equivalence failed", sizes=_sizes(formula=C),
                      code=EXIT_OK if ok else EXIT_INTERNAL)
    rep = check_valid(S.Imp(A, C), vocab, s.cfg.max_len, s.cfg.guard)
    if not rep.valid:
        return Report(command, "mismatch", [text], result=text, exact=False,
                      witness=_witness_text(rep.witness), code=EXIT_INTERNAL,
                      verification="the formula does not imply the result")
    note = ("A -> result decided" if rep.exact else "A -> result " + _bounded_note(s.cfg)) + \
        "; the converse holds by construction and is not re-checked"
    return Report(command, "ok", [text], result=text, exact=False, verification=note,
                  sizes=_sizes(formula=C))


def cmd_qelim(s: Session, a) -> Report:
    hide, A = _hidden(s, a, s.formula(a.formula))
    C = exists_elim(hide, A, s.vocab_for(A, extra=hide), s.cfg.guard)
    return _qelim_report(s, "qelim", A, hide, C)


def cmd_sc(s: Session, a) -> Report:
    hide, A = _hidden(s, a, s.formula(a.formula))
    C = strongest_consequence(A, hide, s.vocab_for(A, extra=hide), check=False)
    return _qelim_report(s, "sc", A, hide, C)


def cmd_interpolate(s: Session, a) -> Report:
    A, B = s.formula(a.first), s.formula(a.second)
    try:
        ip = interpolate(A, B, s.vocab_for(A, B), s.cfg.max_len)
    except ImplicationInvalid as e:
        w = _witness_text(e.witness)
        return Report("interpolate", "invalid", ["implication invalid", f"witness: {w}"],
                      witness=w, exact=e.exact, code=EXIT_NEGATIVE,
                      verification="exact" if e.exact else _bounded_note(s.cfg))
    text = s.fmt(ip.formula)
    note = "exact (both implications decided)" if ip.exact else \
        "unverified: " + _bounded_note(s.cfg)
    return Report("interpolate", "ok", [text], result=text, exact=ip.exact, verification=note,
                  sizes=_sizes(formula=ip.formula))


def cmd_beth(s: Session, a) -> Report:
    A = s.formula(a.formula)
    try:
        d = beth_define(A, a.var, s.vocab_for(A), s.cfg.max_len)
    except NotImplicitlyDefined as e:
        lines = [f"{a.var} is not implicitly defined",
                 f"witness: {format_window(e.window)}",
                 f"first: {format_window(e.first)}",
                 f"second: {format_window(e.second)}"]
        return Report("beth", "undefined", lines, witness=format_window(e.window),
                      exact=True, code=EXIT_NEGATIVE, verification="bounded counterexample")
    text = s.fmt(d.formula)
    note = "exact (A -> (p <-> C) decided)" if d.exact else "unverified: " + _bounded_note(s.cfg)
    return Report("beth", "ok", [text], result=text, exact=d.exact, verification=note,
                  sizes=_sizes(formula=d.formula))


def _omega_input(s: Session, arg: str):
    """An NBA from an automaton file, or the NBA of a future formula."""
    text = _read_file_or_inline(arg)
    if text.lstrip().split("\n", 1)[0].strip() in ("nba", "dfa", "nfa", "dpa"):
        return parse_automaton(text, s.cfg.vocab), None
    F = S.parse(text, s.cfg.vocab)
    vocab = s.vocab_for(F)
    return future_to_nba(F, vocab, s.cfg.guard), F


def cmd_reactivity(s: Session, a) -> Report:
    n, _ = _omega_input(s, a.input)
    if kind_of(n) != "nba":
        raise UsageError(f"reactivity-nf reads an nba or a future formula, not a {kind_of(n)}")
    form = reactivity_normal_form(n, s.cfg.nba_guard, a.direction)
    F = form.formula()
    vocab = n.vocab
    lines = [s.fmt(F)]
    bad = None
    if a.direction == "future":
        bad = _lasso_agreement(F, lambda L: au.nba_lasso_accepts(n, *_codes(L, vocab)), s, vocab)
    else:
        R = S.time_reverse(F)
        bad = _lasso_agreement(R, lambda L: au.nba_lasso_accepts(n, *_codes(L, vocab)), s, vocab)
    sizes = _sizes(dpa=form.dpa, pairs=len(form.pairs), formula=F)
    if bad is not None:
        return Report("reactivity-nf", "mismatch", lines, result=s.fmt(F),
                      witness=_witness_text(bad), exact=False, code=EXIT_INTERNAL,
                      verification="lasso disagreement", sizes=sizes)
    return Report("reactivity-nf", "ok", lines, result=s.fmt(F), exact=False,
                  verification=_lasso_note(s.cfg), sizes=sizes)


def cmd_fin(s: Session, a) -> Report:
    text = _read_file_or_inline(a.input)
    if text.lstrip().split("\n", 1)[0].strip() in ("dfa", "nfa"):
        X = parse_automaton(text, s.cfg.vocab)
        if kind_of(X) == "nfa":
            X = au.determinize_minimize(X)
    else:
        A = S.parse(text, s.cfg.vocab)
        _require_introspective(A)
        X = itl_to_dfa(A, s.vocab_for(A))
    F = fin_formula(X, a.direction)
    G = F if a.direction == "future" else S.time_reverse(F)
    bad = _lasso_agreement(G, lambda L: finitely_many_prefixes(X, L), s, X.vocab)
    if bad is not None:
        return Report("fin", "mismatch", [s.fmt(F)], result=s.fmt(F),
                      witness=_witness_text(bad), exact=False, code=EXIT_INTERNAL,
                      verification="lasso disagreement with the prefix count")
    return Report("fin", "ok", [s.fmt(F)], result=s.fmt(F), exact=False,
                  verification=_lasso_note(s.cfg) + " against the exact prefix count",
                  sizes=_sizes(dfa=X, formula=F))


def cmd_check_equiv(s: Session, a) -> Report:
    A, B = s.formula(a.first), s.formula(a.second)
    vocab = s.vocab_for(A, B)
    n = s.cfg.max_len
    cex = bounded_equiv_check(A, B, vocab, n, s.cfg.budget)
    sizes = _sizes(first=A, second=B)
    if cex is not None:
        w = format_window(cex.window, vocab)
        return Report("check-equiv", "fail", [f"fail (exhaustive, {n})", f"witness: {w}",
                                              f"first: {str(cex.left).lower()}",
                                              f"second: {str(cex.right).lower()}"],
                      witness=w, exact=True, code=EXIT_NEGATIVE, sizes=sizes)
    lines = [f"pass (exhaustive, {n})"]
    intro = all(S.is_introspective(f) and not S.has_input_only(f) for f in (A, B))
    if not intro:
        return Report("check-equiv", "pass", lines, exact=False,
                      verification=_bounded_note(s.cfg), sizes=sizes)
    da, db = itl_to_dfa(A, vocab), itl_to_dfa(B, vocab)
    word = au.dfa_counterexample(da, db)
    if word is None:
        return Report("check-equiv", "pass", lines, exact=True,
                      verification="exact (automaton equivalence)", sizes=sizes)
    W = Window(tuple(au.letter_names(int(c), vocab) for c in word), 0, len(word) - 1)
    w = format_window(W, vocab)
    return Report("check-equiv", "fail", lines + [f"fail (exact): witness {w}"], witness=w,
                  exact=True, code=EXIT_NEGATIVE, verification="exact (automaton equivalence)",
                  sizes=sizes)


def cmd_decide(s: Session, a) -> Report:
    A = s.formula(a.formula)
    vocab = s.vocab_for(A)
    target = A if a.query == "valid" else S.Not(A)
    rep = check_valid(target, vocab, s.cfg.max_len, s.cfg.guard)
    if a.query == "valid":
        status = "valid" if rep.valid else "invalid"
    else:
        status = "unsat" if rep.valid else "sat"
    positive = status in ("valid", "sat")
    lines = [status]
    witness = None
    if rep.witness is not None:
        witness = _witness_text(rep.witness)
        lines.append(("model: " if a.query == "sat" else "counterexample: ") + witness)
    note = "exact (decision procedure)" if rep.exact else _bounded_note(s.cfg)
    return Report("decide", status, lines, result=status, witness=witness, exact=rep.exact,
                  verification=note, sizes=_sizes(formula=A),
                  code=EXIT_OK if positive else EXIT_NEGATIVE)


# ------------------------------------------------------------ argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


_DEFAULTS = dict(vocab=None, max_len=5, context=3, budget=DEFAULT_BUDGET, guard=DEFAULT_OMEGA_GUARD,
                 nba_guard=au.DEFAULT_NBA_GUARD, json=False, dot=False, timings=False)


def _common(p: argparse.ArgumentParser, top: bool) -> None:
    """Shared options; accepted before or after the command name."""
    d = (lambda k: _DEFAULTS[k]) if top else (lambda k: argparse.SUPPRESS)
    p.add_argument("--vocab", default=d("vocab"), help="variables, comma or space separated")
    p.add_argument("--max-len", type=int, default=d("max_len"), help="longest window examined")
    p.add_argument("--context", type=int, default=d("context"), help="lasso stem/loop bound")
    p.add_argument("--budget", type=int, default=d("budget"),
                   help="deleted states tried when evaluating projinv on a window")
    p.add_argument("--guard", type=int, default=d("guard"), help="state guard for ω-automata")
    p.add_argument("--nba-guard", type=int, default=d("nba_guard"),
                   help="largest NBA handed to determinization")
    p.add_argument("--json", action="store_true", default=d("json"),
                   help="one JSON object per line")
    p.add_argument("--dot", action="store_true", default=d("dot"),
                   help="emit automata as Graphviz DOT")
    p.add_argument("--timings", action="store_true", default=d("timings"),
                   help="include wall-clock timings")


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="itl", description="Interval temporal logic toolkit.")
    top.add_argument("--version", action="version", version=f"itl {__version__}")
    _common(top, True)
    sub = top.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def add(name, fn, help_, *positional, **extra):
        p = sub.add_parser(name, help=help_)
        for arg, h in positional:
            p.add_argument(arg, help=h)
        for flag, kw in extra.items():
            p.add_argument("--" + flag.replace("_", "-"), **kw)
        _common(p, False)
        p.set_defaults(func=fn)
        return p

    F = ("formula", "formula text, or - for stdin")
    add("parse", cmd_parse, "parse and re-render a formula", F)
    add("classify", cmd_classify, "syntactic class of a formula", F)
    add("reverse", cmd_reverse, "time reversal", F)
    add("eval", cmd_eval, "evaluate on a window", F, ("window", "window file or inline text"))
    add("eval-lasso", cmd_eval_lasso, "evaluate a future formula on a lasso", F,
        ("lasso", "lasso file or inline 'stem: ... loop: ...'"))
    add("compile", cmd_compile, "DFA of an introspective or NBA of a future formula", F,
        dpa=dict(action="store_true", help="determinize the NBA to a parity automaton"))
    add("to-formula", cmd_to_formula, "formula of a dfa/nfa file",
        ("automaton", "automaton file or inline text"))
    add("gnf", cmd_gnf, "guarded normal form", F,
        direction=dict(choices=("future", "past"), default="future"))
    add("decompose", cmd_decompose, "full-system chop decomposition", F,
        flavor=dict(choices=("nonstrict", "strict", "mirror", "mirror-strict"), default="nonstrict"))
    add("strictify", cmd_strictify, "strict decomposition from the plain one", F)
    add("wblocks", cmd_wblocks, "w-closures and block equations", F,
        w=dict(required=True, help="state formula"))
    add("wnf", cmd_wnf, "w-block normal form", F, w=dict(required=True, help="state formula"))
    add("projinv", cmd_projinv, "eliminate inverse projection", F,
        w=dict(default=None, help="state formula (else the formula is 'w projinv A')"))
    add("qelim", cmd_qelim, "eliminate existential quantifiers", F,
        hide=dict(default=None, help="variables to eliminate"))
    add("sc", cmd_sc, "strongest consequence without the hidden variables", F,
        hide=dict(default=None, help="variables to hide"))
    add("interpolate", cmd_interpolate, "uniform interpolant of a valid A -> B",
        ("first", "antecedent A"), ("second", "consequent B"))
    add("beth", cmd_beth, "explicit definition of an implicitly defined variable", F,
        var=dict(required=True, help="the defined variable"))
    add("reactivity-nf", cmd_reactivity, "reactivity normal form of an NBA or future formula",
        ("input", "nba file, inline automaton or future formula"),
        direction=dict(choices=("future", "past"), default="future"))
    add("fin", cmd_fin, "Fin(X) for a DFA or introspective formula X",
        ("input", "dfa/nfa file or introspective formula"),
        direction=dict(choices=("future", "past"), default="future"))
    add("check-equiv", cmd_check_equiv, "equivalence on all windows up to --max-len",
        ("first", "formula"), ("second", "formula"))
    add("decide", cmd_decide, "satisfiability or validity",
        ("query", "sat or valid"), F)
    return top


def _config(ns) -> SessionConfig:
    return SessionConfig(vocab=_vocab_arg(ns.vocab), max_len=ns.max_len, context=ns.context,
                         budget=ns.budget, guard=ns.guard, nba_guard=ns.nba_guard,
                         json=ns.json, dot=ns.dot, timings=ns.timings)


def _emit(out: TextIO, err: TextIO, cfg: SessionConfig, rep: Report,
          seconds: float | None) -> None:
    """Results go to ``out``; in text mode the verification report goes to
    ``err`` so that results can be piped into other commands."""
    if cfg.json:
        out.write(json.dumps(rep.record(seconds)) + "\n")
        return
    text = rep.text()
    if text:
        out.write(text + "\n")
    if rep.verification:
        err.write(f"verification: {rep.verification}\n")
    if seconds is not None:
        err.write(f"time: {seconds:.3f}s\n")


def run(argv: Sequence[str] | None = None, out: TextIO | None = None,
        err: TextIO | None = None) -> int:
    """Run one command and return its exit code."""
    out = out or sys.stdout
    err = err or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    cfg = None
    command = argv[0] if argv else ""
    start = time.perf_counter()
    try:
        ns = build_parser().parse_args(argv)
        command = ns.command
        cfg = _config(ns)
        if ns.command == "decide" and ns.query not in ("sat", "valid"):
            raise UsageError("decide expects 'sat' or 'valid'")
        rep = ns.func(Session(cfg), ns)
    except SystemExit as e:  # --help / --version
        return int(e.code or 0)
    except (UsageError, S.ParseError, FormatError) as e:
        return _fail(out, err, cfg, command, "usage", e, EXIT_USAGE)
    except (S.UnsupportedFormula, S.NotSeparated, S.CaptureError, NotIntrospective,
            NotFutureFormula, GrammarError, au.GuardExceeded, au.VocabularyMismatch) as e:
        return _fail(out, err, cfg, command, "unsupported", e, EXIT_USAGE)
    except VerificationError as e:
        return _fail(out, err, cfg, command, "verification-failed", e, EXIT_INTERNAL)
    except ValueError as e:
        return _fail(out, err, cfg, command, "usage", e, EXIT_USAGE)
    seconds = time.perf_counter() - start if cfg.timings else None
    _emit(out, err, cfg, rep, seconds)
    return rep.code


def _fail(out, err, cfg, command, status, exc, code) -> int:
    if cfg is not None and cfg.json:
        rep = Report(command, status, result=None)
        rec = rep.record(None)
        rec["error"] = str(exc)
        out.write(json.dumps(rec) + "\n")
    else:
        err.write(f"itl {command}: {status}: {exc}\n".replace("itl : ", "itl: "))
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
