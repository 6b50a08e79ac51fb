"""Ordinal arithmetic below w^w in Cantor normal form.

An ordinal is a tuple of (exponent, coefficient) terms with exponents
strictly decreasing and coefficients positive, so w^2*3 + w + 5 is
((2, 3), (1, 1), (0, 5)).  Comparison is plain tuple comparison, which
agrees with the ordinal order.

Text syntax: terms joined by "+", each term "w", "w*c", "w^e", "w^e*c",
or a bare natural.  Input terms are summed left to right with ordinal
addition, so non-normal spellings like "1 + w" collapse to "w".
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import total_ordering

from .errors import ParseError


@total_ordering
@dataclass(frozen=True)
class OrdinalCNF:
    terms: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        last_exp = None
        for exp, coeff in self.terms:
            if exp < 0 or coeff < 1:
                raise ValueError(f"bad CNF term {(exp, coeff)}")
            if last_exp is not None and exp >= last_exp:
                raise ValueError("CNF exponents must strictly decrease")
            last_exp = exp

    @classmethod
    def from_int(cls, n: int) -> "OrdinalCNF":
        if n < 0:
            raise ValueError("ordinals are not negative")
        return cls(() if n == 0 else ((0, n),))

    @classmethod
    def omega(cls, exponent: int = 1, coefficient: int = 1) -> "OrdinalCNF":
        return cls(((exponent, coefficient),))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_successor(self) -> bool:
        return bool(self.terms) and self.terms[-1][0] == 0

    @property
    def is_limit(self) -> bool:
        return bool(self.terms) and self.terms[-1][0] > 0

    @property
    def finite_part(self) -> int:
        if self.is_successor:
            return self.terms[-1][1]
        return 0

    def __lt__(self, other: "OrdinalCNF") -> bool:
        return self.terms < other.terms

    def __add__(self, other) -> "OrdinalCNF":
        other = _coerce(other)
        if other.is_zero:
            return self
        lead = other.terms[0][0]
        kept = [t for t in self.terms if t[0] > lead]
        if self.terms and any(t[0] == lead for t in self.terms):
            merged = (lead, next(c for e, c in self.terms if e == lead) + other.terms[0][1])
            return OrdinalCNF(tuple(kept) + (merged,) + other.terms[1:])
        return OrdinalCNF(tuple(kept) + other.terms)

    def __mul__(self, other) -> "OrdinalCNF":
        other = _coerce(other)
        if self.is_zero or other.is_zero:
            return ZERO
        e1, c1 = self.terms[0]
        out = ZERO
        for exp, coeff in other.terms:
            if exp > 0:
                part = OrdinalCNF(((e1 + exp, coeff),))
            else:
                part = OrdinalCNF(((e1, c1 * coeff),) + self.terms[1:])
            out = out + part
        return out

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        rendered = []
        for exp, coeff in self.terms:
            if exp == 0:
                rendered.append(str(coeff))
                continue
            body = "w" if exp == 1 else f"w^{exp}"
            rendered.append(body if coeff == 1 else f"{body}*{coeff}")
        return " + ".join(rendered)


def _coerce(value) -> OrdinalCNF:
    if isinstance(value, OrdinalCNF):
        return value
    if isinstance(value, int):
        return OrdinalCNF.from_int(value)
    raise TypeError(f"not an ordinal: {value!r}")


ZERO = OrdinalCNF()
ONE = OrdinalCNF.from_int(1)
OMEGA = OrdinalCNF.omega()
OMEGA_SQUARED = OrdinalCNF.omega(2)


def add(a: OrdinalCNF, b: OrdinalCNF) -> OrdinalCNF:
    return _coerce(a) + b


def mul(a: OrdinalCNF, b: OrdinalCNF) -> OrdinalCNF:
    return _coerce(a) * b


def closed_under_addition_below(lam: OrdinalCNF, gamma: OrdinalCNF) -> bool:
    """Is xi + eta < lam whenever xi < lam and eta < gamma?

    This is closure of ``lam`` under adding ordinals below ``gamma``.
    Decided by case analysis on the normal form: a successor lam only
    absorbs eta = 0, and a limit lam absorbs exactly the eta below
    w^e where e is the smallest exponent in lam's normal form.
    """
    lam, gamma = _coerce(lam), _coerce(gamma)
    if gamma.is_zero or lam.is_zero:
        return True
    if lam.is_successor:
        return gamma <= ONE
    least_exp = lam.terms[-1][0]
    return gamma <= OrdinalCNF.omega(least_exp)


_TERM_RE = re.compile(r"w(?:\^(\d+))?(?:\*(\d+))?\Z|(\d+)\Z")


def parse_ordinal(text: str) -> OrdinalCNF:
    """Parse the text syntax, normalizing via ordinal addition."""
    out = ZERO
    stripped = text.strip()
    if not stripped:
        raise ParseError("empty ordinal expression")
    for chunk in stripped.split("+"):
        chunk = chunk.replace(" ", "")
        m = _TERM_RE.match(chunk)
        if m is None:
            raise ParseError(f"bad ordinal term {chunk!r}")
        if m.group(3) is not None:
            out = out + OrdinalCNF.from_int(int(m.group(3)))
            continue
        exp = int(m.group(1)) if m.group(1) else 1
        coeff = int(m.group(2)) if m.group(2) else 1
        if coeff == 0:
            raise ParseError(f"zero coefficient in {chunk!r}")
        out = out + OrdinalCNF.omega(exp, coeff)
    return out
