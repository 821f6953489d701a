"""LTL abstract syntax, a concrete grammar, and derived-operator expansion.

Core connectives are true, false, atoms, !, &, X and U.  The remaining
operators (|, ->, <->, G, F) are kept as first-class AST nodes so that
formulas print the way they were written, but ``expand_derived`` rewrites
them into the core fragment:

    a | b    ==  !(!a & !b)
    a -> b   ==  !a | b
    a <-> b  ==  (a -> b) & (b -> a)
    G a      ==  !(true U !a)
    F a      ==  true U a
"""

from __future__ import annotations

import re
from dataclasses import dataclass


class Formula:
    """Base class for all formula nodes.  Instances are immutable."""

    __slots__ = ()

    def __str__(self) -> str:
        return format_formula(self)


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class FalseF(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Not(Formula):
    child: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Next(Formula):
    child: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Always(Formula):
    child: Formula


@dataclass(frozen=True)
class Eventually(Formula):
    child: Formula


TRUE = TrueF()
FALSE = FalseF()

RESERVED_WORDS = frozenset({"true", "false", "G", "F", "X", "U"})

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class ParseError(ValueError):
    """Raised on malformed formula text; carries the 0-based input position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownAtomError(ParseError):
    """Raised when an atom is not in the declared alphabet."""

    def __init__(self, atom: str, position: int):
        ParseError.__init__(self, f"unknown atom {atom!r}", position)
        self.atom = atom


_TOKEN_RE = re.compile(r"[ \t\r\n]+|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<sym><->|->|\||&|!|\(|\))")


def _tokenize(text: str) -> list[tuple[str | None, int]]:
    tokens: list[tuple[str | None, int]] = []
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise ParseError(f"unexpected character {text[i]!r}", i)
        if m.lastgroup is not None:
            tokens.append((m.group(m.lastgroup), i))
        i = m.end()
    tokens.append((None, len(text)))
    return tokens


class _Parser:
    """Recursive descent over:  iff -> implies -> or -> and -> until -> unary.

    U, -> and <-> associate to the right; | and & to the left.
    """

    def __init__(self, tokens: list[tuple[str | None, int]], alphabet: frozenset[str] | None):
        self._tokens = tokens
        self._pos = 0
        self._alphabet = alphabet

    def _peek(self) -> tuple[str | None, int]:
        return self._tokens[self._pos]

    def _advance(self) -> tuple[str | None, int]:
        tok = self._tokens[self._pos]
        self._pos += 1
        return tok

    def parse(self) -> Formula:
        f = self._iff()
        value, pos = self._peek()
        if value is not None:
            raise ParseError(f"unexpected token {value!r}", pos)
        return f

    def _iff(self) -> Formula:
        left = self._implies()
        if self._peek()[0] == "<->":
            self._advance()
            return Iff(left, self._iff())
        return left

    def _implies(self) -> Formula:
        left = self._or()
        if self._peek()[0] == "->":
            self._advance()
            return Implies(left, self._implies())
        return left

    def _or(self) -> Formula:
        left = self._and()
        while self._peek()[0] == "|":
            self._advance()
            left = Or(left, self._and())
        return left

    def _and(self) -> Formula:
        left = self._until()
        while self._peek()[0] == "&":
            self._advance()
            left = And(left, self._until())
        return left

    def _until(self) -> Formula:
        left = self._unary()
        if self._peek()[0] == "U":
            self._advance()
            return Until(left, self._until())
        return left

    def _unary(self) -> Formula:
        value, pos = self._advance()
        if value == "!":
            return Not(self._unary())
        if value == "X":
            return Next(self._unary())
        if value == "G":
            return Always(self._unary())
        if value == "F":
            return Eventually(self._unary())
        if value == "(":
            f = self._iff()
            close, cpos = self._advance()
            if close != ")":
                raise ParseError("expected ')'", cpos)
            return f
        if value == "true":
            return TRUE
        if value == "false":
            return FALSE
        if value is not None and _IDENT_RE.match(value):
            if self._alphabet is not None and value not in self._alphabet:
                raise UnknownAtomError(value, pos)
            return Atom(value)
        raise ParseError(f"expected a formula, got {value!r}" if value is not None else "unexpected end of input", pos)


def parse_formula(text: str, alphabet=None) -> Formula:
    """Parse formula text.  With an alphabet, atoms outside it are rejected."""
    alpha = None
    if alphabet is not None:
        alpha = frozenset(alphabet)
        for name in alpha:
            if not _IDENT_RE.match(name) or name in RESERVED_WORDS:
                raise ValueError(f"invalid atom name in alphabet: {name!r}")
    return _Parser(_tokenize(text), alpha).parse()


# Printer precedence levels, loosest binding first.
_PREC_IFF = 1
_PREC_IMPLIES = 2
_PREC_OR = 3
_PREC_AND = 4
_PREC_UNTIL = 5
_PREC_UNARY = 6
_PREC_ATOM = 7


def _wrap(f: Formula, min_prec: int) -> str:
    text, prec = _fmt(f)
    if prec < min_prec:
        return f"({text})"
    return text


def _fmt(f: Formula) -> tuple[str, int]:
    match f:
        case TrueF():
            return "true", _PREC_ATOM
        case FalseF():
            return "false", _PREC_ATOM
        case Atom(name):
            return name, _PREC_ATOM
        case Not(child):
            return "!" + _wrap(child, _PREC_UNARY), _PREC_UNARY
        case Next(child):
            return "X " + _wrap(child, _PREC_UNARY), _PREC_UNARY
        case Always(child):
            return "G " + _wrap(child, _PREC_UNARY), _PREC_UNARY
        case Eventually(child):
            return "F " + _wrap(child, _PREC_UNARY), _PREC_UNARY
        case And(left, right):
            return _wrap(left, _PREC_AND) + " & " + _wrap(right, _PREC_AND + 1), _PREC_AND
        case Or(left, right):
            return _wrap(left, _PREC_OR) + " | " + _wrap(right, _PREC_OR + 1), _PREC_OR
        case Until(left, right):
            return _wrap(left, _PREC_UNTIL + 1) + " U " + _wrap(right, _PREC_UNTIL), _PREC_UNTIL
        case Implies(left, right):
            return _wrap(left, _PREC_IMPLIES + 1) + " -> " + _wrap(right, _PREC_IMPLIES), _PREC_IMPLIES
        case Iff(left, right):
            return _wrap(left, _PREC_IFF + 1) + " <-> " + _wrap(right, _PREC_IFF), _PREC_IFF
    raise TypeError(f"not a formula: {f!r}")


def format_formula(f: Formula) -> str:
    """Render with minimal parentheses; parse_formula(format_formula(f)) == f."""
    return _fmt(f)[0]


def expand_derived(f: Formula) -> Formula:
    """Rewrite |, ->, <->, G and F into the true/false/atom/!/&/X/U core."""
    match f:
        case TrueF() | FalseF() | Atom(_):
            return f
        case Not(child):
            return Not(expand_derived(child))
        case And(left, right):
            return And(expand_derived(left), expand_derived(right))
        case Or(left, right):
            return Not(And(Not(expand_derived(left)), Not(expand_derived(right))))
        case Implies(left, right):
            return expand_derived(Or(Not(left), right))
        case Iff(left, right):
            return expand_derived(And(Implies(left, right), Implies(right, left)))
        case Next(child):
            return Next(expand_derived(child))
        case Until(left, right):
            return Until(expand_derived(left), expand_derived(right))
        case Always(child):
            return Not(Until(TRUE, Not(expand_derived(child))))
        case Eventually(child):
            return Until(TRUE, expand_derived(child))
    raise TypeError(f"not a formula: {f!r}")


def atoms(f: Formula) -> frozenset[str]:
    """The set of atomic proposition names occurring in f."""
    match f:
        case TrueF() | FalseF():
            return frozenset()
        case Atom(name):
            return frozenset((name,))
        case Not(child) | Next(child) | Always(child) | Eventually(child):
            return atoms(child)
        case And(left, right) | Or(left, right) | Implies(left, right) | Iff(left, right) | Until(left, right):
            return atoms(left) | atoms(right)
    raise TypeError(f"not a formula: {f!r}")


def symbol_count(f: Formula) -> int:
    """Number of AST nodes (operators plus leaves).

    Iterative so it stays usable on very deep trees, where it doubles as
    the probe that keeps recursive passes away from the recursion limit.
    """
    count = 0
    stack = [f]
    while stack:
        node = stack.pop()
        count += 1
        match node:
            case TrueF() | FalseF() | Atom(_):
                pass
            case Not(child) | Next(child) | Always(child) | Eventually(child):
                stack.append(child)
            case (
                And(left, right)
                | Or(left, right)
                | Implies(left, right)
                | Iff(left, right)
                | Until(left, right)
            ):
                stack.append(left)
                stack.append(right)
            case _:
                raise TypeError(f"not a formula: {node!r}")
    return count


def structural_key(f: Formula):
    """Total order on formulas, used to sort conjuncts and disjuncts."""
    match f:
        case TrueF():
            return (0,)
        case FalseF():
            return (1,)
        case Atom(name):
            return (2, name)
        case Not(child):
            return (3, structural_key(child))
        case And(left, right):
            return (4, structural_key(left), structural_key(right))
        case Or(left, right):
            return (5, structural_key(left), structural_key(right))
        case Implies(left, right):
            return (6, structural_key(left), structural_key(right))
        case Iff(left, right):
            return (7, structural_key(left), structural_key(right))
        case Next(child):
            return (8, structural_key(child))
        case Until(left, right):
            return (9, structural_key(left), structural_key(right))
        case Always(child):
            return (10, structural_key(child))
        case Eventually(child):
            return (11, structural_key(child))
    raise TypeError(f"not a formula: {f!r}")
