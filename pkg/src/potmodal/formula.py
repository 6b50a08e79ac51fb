"""Modal propositional formulas.

AST nodes are frozen dataclasses, so formulas hash and compare
structurally.  The surface syntax is fixed:

    ~ negation, [] box, <> diamond   (tightest)
    &, |                             (left associative)
    ->                               (right associative)
    <->                              (loosest)

Atoms match ``[a-zA-Z_][a-zA-Z0-9_.]*`` except the reserved words
``true`` and ``false``.  ``render`` produces the canonical text form
(every binary connective parenthesized), and ``parse(render(f)) == f``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Optional

from .errors import ArityError, ParseError

_ATOM_RE = re.compile(r"[a-zA-Z_][a-zA-Z0-9_.]*\Z")
_RESERVED = ("true", "false")


class Formula:
    """Base class for formula nodes."""

    __slots__ = ()

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    name: str

    def __post_init__(self):
        if not _ATOM_RE.match(self.name) or self.name in _RESERVED:
            raise ValueError(f"invalid atom name: {self.name!r}")


@dataclass(frozen=True, slots=True)
class Top(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Bottom(Formula):
    pass


@dataclass(frozen=True, slots=True)
class Not(Formula):
    operand: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Box(Formula):
    operand: Formula


@dataclass(frozen=True, slots=True)
class Diamond(Formula):
    operand: Formula


TOP = Top()
BOTTOM = Bottom()

_BINARY = {And: "&", Or: "|", Implies: "->", Iff: "<->"}
_UNARY = {Not: "~", Box: "[]", Diamond: "<>"}


def render(f: Formula) -> str:
    """Canonical text form of ``f``."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Top):
        return "true"
    if isinstance(f, Bottom):
        return "false"
    op = _UNARY.get(type(f))
    if op is not None:
        return op + render(f.operand)
    op = _BINARY[type(f)]
    return f"({render(f.left)} {op} {render(f.right)})"


_TOKEN_RE = re.compile(r"<->|->|\[\]|<>|[~&|()]|[a-zA-Z_][a-zA-Z0-9_.]*")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        tokens.append((m.group(), pos))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> Optional[str]:
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def take(self) -> tuple[str, int]:
        if self.i >= len(self.tokens):
            raise ParseError("unexpected end of input", len(self.text))
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def iff(self) -> Formula:
        node = self.imp()
        while self.peek() == "<->":
            self.take()
            node = Iff(node, self.imp())
        return node

    def imp(self) -> Formula:
        node = self.disj()
        if self.peek() == "->":
            self.take()
            return Implies(node, self.imp())
        return node

    def disj(self) -> Formula:
        node = self.conj()
        while self.peek() == "|":
            self.take()
            node = Or(node, self.conj())
        return node

    def conj(self) -> Formula:
        node = self.unary()
        while self.peek() == "&":
            self.take()
            node = And(node, self.unary())
        return node

    def unary(self) -> Formula:
        tok, pos = self.take()
        if tok == "~":
            return Not(self.unary())
        if tok == "[]":
            return Box(self.unary())
        if tok == "<>":
            return Diamond(self.unary())
        if tok == "(":
            node = self.iff()
            closing, cpos = self.take()
            if closing != ")":
                raise ParseError(f"expected ')', found {closing!r}", cpos)
            return node
        if tok == "true":
            return TOP
        if tok == "false":
            return BOTTOM
        if _ATOM_RE.match(tok):
            return Atom(tok)
        raise ParseError(f"unexpected token {tok!r}", pos)


def parse(text: str) -> Formula:
    """Parse surface syntax into a formula."""
    parser = _Parser(text)
    node = parser.iff()
    if parser.i < len(parser.tokens):
        tok, pos = parser.tokens[parser.i]
        raise ParseError(f"trailing input {tok!r}", pos)
    return node


def atoms(f: Formula) -> frozenset[str]:
    """Names of all atoms occurring in ``f``."""
    out: set[str] = set()
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, Atom):
            out.add(node.name)
        elif isinstance(node, (Not, Box, Diamond)):
            stack.append(node.operand)
        elif isinstance(node, (And, Or, Implies, Iff)):
            stack.append(node.left)
            stack.append(node.right)
    return frozenset(out)


def modal_depth(f: Formula) -> int:
    """Maximal nesting of [] and <> in ``f``."""
    if isinstance(f, (Atom, Top, Bottom)):
        return 0
    if isinstance(f, (Box, Diamond)):
        return 1 + modal_depth(f.operand)
    if isinstance(f, Not):
        return modal_depth(f.operand)
    return max(modal_depth(f.left), modal_depth(f.right))


def substitute(f: Formula, mapping: Mapping[str, Formula]) -> Formula:
    """Simultaneously replace atoms of ``f`` according to ``mapping``."""
    if isinstance(f, Atom):
        return mapping.get(f.name, f)
    if isinstance(f, (Top, Bottom)):
        return f
    if isinstance(f, Not):
        return Not(substitute(f.operand, mapping))
    if isinstance(f, Box):
        return Box(substitute(f.operand, mapping))
    if isinstance(f, Diamond):
        return Diamond(substitute(f.operand, mapping))
    return type(f)(substitute(f.left, mapping), substitute(f.right, mapping))


class AxiomScheme(Enum):
    """The schemes handled by certification and reporting."""

    K = "K"
    DUAL = "Dual"
    T = "T"
    FOUR = "4"
    DOT2 = ".2"
    DOT3 = ".3"

    @property
    def arity(self) -> int:
        return 2 if self in (AxiomScheme.K, AxiomScheme.DOT3) else 1

    @classmethod
    def from_name(cls, name: str) -> "AxiomScheme":
        for scheme in cls:
            if scheme.value == name:
                return scheme
        raise ValueError(f"unknown scheme {name!r}")


S4_SCHEMES = (AxiomScheme.K, AxiomScheme.DUAL, AxiomScheme.T, AxiomScheme.FOUR)


def instantiate(scheme: AxiomScheme, phi: Formula, psi: Optional[Formula] = None) -> Formula:
    """Build the instance of ``scheme`` at ``phi`` (and ``psi`` for K and .3)."""
    if scheme.arity == 2:
        if psi is None:
            raise ArityError(f"scheme {scheme.value} needs two formulas")
    elif psi is not None:
        raise ArityError(f"scheme {scheme.value} takes a single formula")
    if scheme is AxiomScheme.K:
        return Implies(Box(Implies(phi, psi)), Implies(Box(phi), Box(psi)))
    if scheme is AxiomScheme.DUAL:
        return Iff(Not(Diamond(phi)), Box(Not(phi)))
    if scheme is AxiomScheme.T:
        return Implies(Box(phi), phi)
    if scheme is AxiomScheme.FOUR:
        return Implies(Box(phi), Box(Box(phi)))
    if scheme is AxiomScheme.DOT2:
        return Implies(Diamond(Box(phi)), Box(Diamond(phi)))
    return Implies(
        And(Diamond(phi), Diamond(psi)),
        Diamond(Or(And(phi, Diamond(psi)), And(Diamond(phi), psi))),
    )
