"""Exact LTL semantics over ultimately periodic words, plus a bounded verdict oracle.

A lasso ``stem . loop^omega`` has finitely many distinct suffixes, one per
position of stem and loop, so every formula denotes a boolean table over
those positions.  Until / F are least fixpoints and G is a greatest
fixpoint of their one-step expansions; two backward sweeps over the loop
followed by one over the stem reach the fixpoint because a satisfying
witness never needs to wrap the loop more than once.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .formula import (
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
    atoms,
)
from .verdicts import Verdict3

Sample = frozenset

def as_sample(props) -> frozenset[str]:
    return frozenset(props)


def as_trace(samples) -> tuple[frozenset[str], ...]:
    return tuple(frozenset(s) for s in samples)


@dataclass(frozen=True)
class LassoWord:
    """Ultimately periodic word stem . loop^omega; the loop must be non-empty."""

    stem: tuple[frozenset[str], ...]
    loop: tuple[frozenset[str], ...]

    def __post_init__(self):
        object.__setattr__(self, "stem", as_trace(self.stem))
        object.__setattr__(self, "loop", as_trace(self.loop))
        if not self.loop:
            raise ValueError("lasso loop must be non-empty")

    def prepend(self, prefix) -> "LassoWord":
        return LassoWord(as_trace(prefix) + self.stem, self.loop)


def eval_lasso(f: Formula, w: LassoWord) -> bool:
    """Whether w satisfies f at position 0."""
    word = w.stem + w.loop
    n_stem = len(w.stem)
    n = len(word)

    def succ(i: int) -> int:
        return i + 1 if i + 1 < n else n_stem

    memo: dict[Formula, list[bool]] = {}

    def table(g: Formula) -> list[bool]:
        cached = memo.get(g)
        if cached is not None:
            return cached
        match g:
            case TrueF():
                t = [True] * n
            case FalseF():
                t = [False] * n
            case Atom(name):
                t = [name in word[i] for i in range(n)]
            case Not(child):
                tc = table(child)
                t = [not v for v in tc]
            case And(left, right):
                tl, tr = table(left), table(right)
                t = [a and b for a, b in zip(tl, tr)]
            case Or(left, right):
                tl, tr = table(left), table(right)
                t = [a or b for a, b in zip(tl, tr)]
            case Implies(left, right):
                tl, tr = table(left), table(right)
                t = [(not a) or b for a, b in zip(tl, tr)]
            case Iff(left, right):
                tl, tr = table(left), table(right)
                t = [a == b for a, b in zip(tl, tr)]
            case Next(child):
                tc = table(child)
                t = [tc[succ(i)] for i in range(n)]
            case Until(left, right):
                tl, tr = table(left), table(right)
                t = [False] * n
                for _ in range(2):
                    for i in reversed(range(n_stem, n)):
                        t[i] = tr[i] or (tl[i] and t[succ(i)])
                for i in reversed(range(n_stem)):
                    t[i] = tr[i] or (tl[i] and t[i + 1])
            case Eventually(child):
                tc = table(child)
                t = [False] * n
                for _ in range(2):
                    for i in reversed(range(n_stem, n)):
                        t[i] = tc[i] or t[succ(i)]
                for i in reversed(range(n_stem)):
                    t[i] = tc[i] or t[i + 1]
            case Always(child):
                tc = table(child)
                t = [True] * n
                for _ in range(2):
                    for i in reversed(range(n_stem, n)):
                        t[i] = tc[i] and t[succ(i)]
                for i in reversed(range(n_stem)):
                    t[i] = tc[i] and t[i + 1]
            case _:
                raise TypeError(f"not a formula: {g!r}")
        memo[g] = t
        return t

    if n == 0:
        raise ValueError("empty word")
    return table(f)[0]


class OracleBudgetError(RuntimeError):
    """Raised when bounded enumeration would exceed the evaluation budget."""


def semantic_verdict_oracle(
    f: Formula,
    prefix,
    stem_bound: int,
    loop_bound: int,
    alphabet=None,
    budget: int = 1_000_000,
) -> Verdict3:
    """Verdict of f on prefix, decided by enumerating lasso continuations.

    Every continuation ``prefix . stem . loop^omega`` with stem length up to
    stem_bound and loop length 1..loop_bound over the alphabet's powerset is
    evaluated exactly.  All satisfy: TOP.  All falsify: BOT.  Mixed: UNKNOWN.
    A definite answer is sound only if it is stable when the bounds grow.
    """
    if stem_bound < 0:
        raise ValueError("stem_bound must be >= 0")
    if loop_bound < 1:
        raise ValueError("loop_bound must be >= 1")
    names = sorted(atoms(f) if alphabet is None else set(alphabet))
    letters = [
        frozenset(name for bit, name in enumerate(names) if mask >> bit & 1)
        for mask in range(1 << len(names))
    ]
    total = sum(
        len(letters) ** (s + l)
        for s in range(stem_bound + 1)
        for l in range(1, loop_bound + 1)
    )
    if total > budget:
        raise OracleBudgetError(
            f"{total} lasso continuations exceed the budget of {budget}"
        )
    base = as_trace(prefix)
    seen_true = seen_false = False
    for s in range(stem_bound + 1):
        for stem in product(letters, repeat=s):
            for l in range(1, loop_bound + 1):
                for loop in product(letters, repeat=l):
                    if eval_lasso(f, LassoWord(base + stem, loop)):
                        seen_true = True
                    else:
                        seen_false = True
                    if seen_true and seen_false:
                        return Verdict3.UNKNOWN
    return Verdict3.TOP if seen_true else Verdict3.BOT
