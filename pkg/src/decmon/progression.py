"""Formula progression: rewrite an LTL formula against one sample at a time.

``progress(f, sample)`` returns a formula that the remaining word must
satisfy for the original word to satisfy f, so a monitor is just repeated
progression plus simplification.  A verdict is reached when the formula
collapses to true or false; that check is purely syntactic, hence a sound
but incomplete approximation of the three-valued semantics.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import reduce
from pathlib import Path

from .formula import (
    FALSE,
    TRUE,
    Always,
    And,
    Atom,
    Eventually,
    FalseF,
    Formula,
    Iff,
    Implies,
    Next,
    Not,
    Or,
    TrueF,
    Until,
    structural_key,
    symbol_count,
)
from .verdicts import Verdict3

DEFAULT_MAX_SYMBOLS = 64


class FormulaSizeError(RuntimeError):
    """Raised when a progressed formula outgrows the symbol limit."""

    def __init__(self, size: int, limit: int):
        super().__init__(f"progressed formula has {size} symbols, limit is {limit}")
        self.size = size
        self.limit = limit


def progress(f: Formula, sample) -> Formula:
    """One-step rewrite of f against a single sample."""
    sigma = frozenset(sample)

    def rec(g: Formula) -> Formula:
        match g:
            case TrueF():
                return TRUE
            case FalseF():
                return FALSE
            case Atom(name):
                return TRUE if name in sigma else FALSE
            case Not(child):
                return Not(rec(child))
            case And(left, right):
                return And(rec(left), rec(right))
            case Or(left, right):
                return Or(rec(left), rec(right))
            case Implies(left, right):
                return rec(Or(Not(left), right))
            case Iff(left, right):
                return rec(And(Implies(left, right), Implies(right, left)))
            case Next(child):
                return child
            case Until(left, right):
                return Or(rec(right), And(rec(left), g))
            case Always(child):
                return And(rec(child), g)
            case Eventually(child):
                return Or(rec(child), g)
        raise TypeError(f"not a formula: {g!r}")

    return rec(f)


def _flat(cls, f: Formula, out: list[Formula]) -> None:
    if isinstance(f, cls):
        _flat(cls, f.left, out)
        _flat(cls, f.right, out)
    else:
        out.append(f)


def _rebuild(cls, parts: list[Formula], unit: Formula) -> Formula:
    if not parts:
        return unit
    return reduce(cls, parts)


def _negate(f: Formula) -> Formula:
    """Negation of an already-simplified formula, folding constants."""
    if isinstance(f, TrueF):
        return FALSE
    if isinstance(f, FalseF):
        return TRUE
    if isinstance(f, Not):
        return f.child
    return Not(f)


def simplify(f: Formula) -> Formula:
    """Bottom-up constant folding, double negation removal and idempotence.

    Conjuncts and disjuncts are flattened, deduplicated and sorted by the
    structural key, so equal monitor states get equal representations.
    Constants also collapse through the derived and temporal operators
    (true U phi, G true, X false, ...); without that, progression closures
    of Iff/Until-heavy formulas accumulate vacuous obligations without
    bound.
    """
    match f:
        case TrueF() | FalseF() | Atom(_):
            return f
        case Not(child):
            return _negate(simplify(child))
        case And(left, right):
            raw: list[Formula] = []
            _flat(And, simplify(left), raw)
            _flat(And, simplify(right), raw)
            parts: list[Formula] = []
            for p in raw:
                if isinstance(p, FalseF):
                    return FALSE
                if not isinstance(p, TrueF) and p not in parts:
                    parts.append(p)
            parts.sort(key=structural_key)
            return _rebuild(And, parts, TRUE)
        case Or(left, right):
            raw = []
            _flat(Or, simplify(left), raw)
            _flat(Or, simplify(right), raw)
            parts = []
            for p in raw:
                if isinstance(p, TrueF):
                    return TRUE
                if not isinstance(p, FalseF) and p not in parts:
                    parts.append(p)
            parts.sort(key=structural_key)
            return _rebuild(Or, parts, FALSE)
        case Implies(left, right):
            l, r = simplify(left), simplify(right)
            if isinstance(l, TrueF):
                return r
            if isinstance(l, FalseF) or isinstance(r, TrueF):
                return TRUE
            if isinstance(r, FalseF):
                return _negate(l)
            return Implies(l, r)
        case Iff(left, right):
            l, r = simplify(left), simplify(right)
            if isinstance(l, TrueF):
                return r
            if isinstance(r, TrueF):
                return l
            if isinstance(l, FalseF):
                return _negate(r)
            if isinstance(r, FalseF):
                return _negate(l)
            return Iff(l, r)
        case Next(child):
            c = simplify(child)
            if isinstance(c, (TrueF, FalseF)):
                return c
            return Next(c)
        case Until(left, right):
            l, r = simplify(left), simplify(right)
            if isinstance(r, (TrueF, FalseF)):
                # A witness is available now, or never will be.
                return r
            if isinstance(l, FalseF):
                # Waiting is impossible, so the witness must be immediate.
                return r
            return Until(l, r)
        case Always(child):
            c = simplify(child)
            if isinstance(c, (TrueF, FalseF)):
                return c
            return Always(c)
        case Eventually(child):
            c = simplify(child)
            if isinstance(c, (TrueF, FalseF)):
                return c
            return Eventually(c)
    raise TypeError(f"not a formula: {f!r}")


def verdict_of(f: Formula) -> Verdict3:
    """Syntactic verdict: TOP for true, BOT for false, UNKNOWN otherwise."""
    if isinstance(f, TrueF):
        return Verdict3.TOP
    if isinstance(f, FalseF):
        return Verdict3.BOT
    return Verdict3.UNKNOWN


def _check_size(f: Formula, limit: int | None) -> None:
    if limit is None:
        return
    size = symbol_count(f)
    if size > limit:
        raise FormulaSizeError(size, limit)


class Monitor:
    """Stateful progression monitor for one formula.

    Stops consuming input once the verdict is definite.  max_symbols bounds
    the simplified formula after each step (None disables the bound).
    """

    def __init__(self, formula: Formula, max_symbols: int | None = DEFAULT_MAX_SYMBOLS):
        self._limit = max_symbols
        self.formula = simplify(formula)
        _check_size(self.formula, max_symbols)
        self.verdict = verdict_of(self.formula)

    def step(self, sample) -> Verdict3:
        if self.verdict.is_definite:
            return self.verdict
        nxt = simplify(progress(self.formula, sample))
        _check_size(nxt, self._limit)
        self.formula = nxt
        self.verdict = verdict_of(nxt)
        return self.verdict


@dataclass(frozen=True)
class MonitorStep:
    sample: frozenset[str]
    formula: Formula
    verdict: Verdict3


@dataclass(frozen=True)
class MonitorRun:
    initial: Formula
    steps: tuple[MonitorStep, ...]

    @property
    def final_formula(self) -> Formula:
        return self.steps[-1].formula if self.steps else self.initial

    @property
    def final_verdict(self) -> Verdict3:
        return self.steps[-1].verdict if self.steps else verdict_of(self.initial)


def monitor_trace(f: Formula, trace, max_symbols: int | None = DEFAULT_MAX_SYMBOLS) -> MonitorRun:
    """Run the progression monitor over a finite trace.

    Samples after the first definite verdict are not consumed.
    """
    mon = Monitor(f, max_symbols)
    initial = mon.formula
    steps: list[MonitorStep] = []
    for sample in trace:
        if mon.verdict.is_definite:
            break
        verdict = mon.step(sample)
        steps.append(MonitorStep(frozenset(sample), mon.formula, verdict))
    return MonitorRun(initial, tuple(steps))


class TraceFormatError(ValueError):
    """Raised on malformed trace input; message names the offending line."""


def parse_trace_lines(lines, alphabet=None) -> list[frozenset[str]]:
    """Parse JSON-lines trace data: one {"props": [...]} object per line."""
    alpha = frozenset(alphabet) if alphabet is not None else None
    trace: list[frozenset[str]] = []
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text:
            continue
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise TraceFormatError(f"line {lineno}: invalid JSON: {exc}") from exc
        if not isinstance(obj, dict) or "props" not in obj:
            raise TraceFormatError(f'line {lineno}: expected an object with a "props" list')
        props = obj["props"]
        if not isinstance(props, list) or not all(isinstance(p, str) for p in props):
            raise TraceFormatError(f'line {lineno}: "props" must be a list of strings')
        if alpha is not None:
            for p in props:
                if p not in alpha:
                    raise TraceFormatError(f"line {lineno}: unknown proposition {p!r}")
        trace.append(frozenset(props))
    return trace


def load_trace_jsonl(path, alphabet=None) -> list[frozenset[str]]:
    with open(Path(path), "r", encoding="utf-8") as fh:
        return parse_trace_lines(fh, alphabet)
