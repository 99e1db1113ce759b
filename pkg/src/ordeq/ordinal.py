"""Ordinals below epsilon_0 in recursive Cantor normal form.

An :class:`Ordinal` is the sum ``w^e1*c1 + ... + w^ek*ck`` with strictly
decreasing exponents (themselves ordinals) and positive integer coefficients.
Values are immutable and always canonical.
"""

from __future__ import annotations

import re
from typing import Iterable, Optional, Union

__all__ = [
    "Ordinal",
    "OrdinalParseError",
    "ZERO",
    "ONE",
    "OMEGA",
    "nat",
    "omega_power",
    "ord_cmp",
    "ord_add",
    "ord_omega_mul",
    "degree",
    "valuation",
    "length",
    "split_at",
    "ord_parse",
    "ord_print",
    "is_canonical",
]


class OrdinalParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class Ordinal:
    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Iterable[tuple[Union["Ordinal", int], int]] = ()):
        # Arbitrary (exponent, coefficient) pairs are read as a left-to-right sum.
        result = ZERO
        for exp, coeff in terms:
            if isinstance(exp, int):
                exp = nat(exp)
            if not isinstance(coeff, int) or coeff < 0:
                raise ValueError(f"coefficient must be a natural number, got {coeff!r}")
            if coeff == 0:
                continue
            result = ord_add(result, Ordinal._make(((exp, coeff),)))
        object.__setattr__(self, "terms", result.terms)
        object.__setattr__(self, "_hash", None)

    @classmethod
    def _make(cls, terms: tuple) -> "Ordinal":
        obj = object.__new__(cls)
        object.__setattr__(obj, "terms", terms)
        object.__setattr__(obj, "_hash", None)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("Ordinal is immutable")

    def __reduce__(self):
        return (Ordinal._make, (self.terms,))

    # -- predicates -------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.terms)

    @property
    def is_finite(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not self.terms[0][0].terms)

    def to_int(self) -> int:
        if not self.is_finite:
            raise ValueError(f"{self} is not a natural number")
        return self.terms[0][1] if self.terms else 0

    # -- ordering ---------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, int):
            other = nat(other) if other >= 0 else None
        if not isinstance(other, Ordinal):
            return NotImplemented
        return self is other or self.terms == other.terms

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(self.terms)
            object.__setattr__(self, "_hash", h)
        return h

    def _coerce(self, other):
        if isinstance(other, int) and other >= 0:
            return nat(other)
        if isinstance(other, Ordinal):
            return other
        return None

    def __lt__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return ord_cmp(self, other) < 0

    def __le__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return ord_cmp(self, other) <= 0

    def __gt__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return ord_cmp(self, other) > 0

    def __ge__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return ord_cmp(self, other) >= 0

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return ord_add(self, other)

    def __radd__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return ord_add(other, self)

    def omega_mul(self, times: int = 1) -> "Ordinal":
        result = self
        for _ in range(times):
            result = ord_omega_mul(result)
        return result

    def __str__(self):
        return ord_print(self)

    def __repr__(self):
        return f"Ordinal({ord_print(self)!r})"


ZERO = Ordinal._make(())
ONE = Ordinal._make(((ZERO, 1),))
OMEGA = Ordinal._make(((ONE, 1),))

_NAT_CACHE = [ZERO] + [Ordinal._make(((ZERO, n),)) for n in range(1, 64)]


def nat(n: int) -> Ordinal:
    if n < 0:
        raise ValueError("ordinals are nonnegative")
    if n < len(_NAT_CACHE):
        return _NAT_CACHE[n]
    return Ordinal._make(((ZERO, n),))


def omega_power(exp: Union[Ordinal, int], coeff: int = 1) -> Ordinal:
    """``w^exp * coeff``."""
    if isinstance(exp, int):
        exp = nat(exp)
    if coeff == 0:
        return ZERO
    return Ordinal._make(((exp, coeff),))


def ord_cmp(a: Ordinal, b: Ordinal) -> int:
    """Return -1, 0 or 1 as ``a`` is less than, equal to or greater than ``b``."""
    if a is b:
        return 0
    ta, tb = a.terms, b.terms
    for (ea, ca), (eb, cb) in zip(ta, tb):
        c = ord_cmp(ea, eb)
        if c:
            return c
        if ca != cb:
            return -1 if ca < cb else 1
    if len(ta) == len(tb):
        return 0
    return -1 if len(ta) < len(tb) else 1


def ord_add(a: Ordinal, b: Ordinal) -> Ordinal:
    if not b.terms:
        return a
    if not a.terms:
        return b
    lead, lead_coeff = b.terms[0]
    kept = []
    for exp, coeff in a.terms:
        c = ord_cmp(exp, lead)
        if c > 0:
            kept.append((exp, coeff))
        else:
            if c == 0:
                kept.append((exp, coeff + lead_coeff))
                kept.extend(b.terms[1:])
                return Ordinal._make(tuple(kept))
            break
    kept.extend(b.terms)
    return Ordinal._make(tuple(kept))


def _one_plus(e: Ordinal) -> Ordinal:
    if e.is_finite:
        return nat(e.to_int() + 1)
    return e


def ord_omega_mul(a: Ordinal) -> Ordinal:
    """Left multiplication by omega: ``w * sum w^e c = sum w^(1+e) c``."""
    return Ordinal._make(tuple((_one_plus(e), c) for e, c in a.terms))


def degree(a: Ordinal) -> Optional[Ordinal]:
    return a.terms[0][0] if a.terms else None


def valuation(a: Ordinal) -> Optional[Ordinal]:
    return a.terms[-1][0] if a.terms else None


def length(a: Ordinal) -> int:
    return sum(c for _, c in a.terms)


def split_at(a: Ordinal, threshold: Union[Ordinal, int]) -> tuple[Ordinal, Ordinal]:
    """Split ``a`` into ``high + low``: exponents of ``high`` are >= threshold,
    exponents of ``low`` are below it."""
    if isinstance(threshold, int):
        threshold = nat(threshold)
    terms = a.terms
    i = 0
    while i < len(terms) and ord_cmp(terms[i][0], threshold) >= 0:
        i += 1
    return Ordinal._make(terms[:i]), Ordinal._make(terms[i:])


def is_canonical(a: Ordinal) -> bool:
    """Validate the representation invariants recursively."""
    prev = None
    for exp, coeff in a.terms:
        if not isinstance(exp, Ordinal) or not isinstance(coeff, int) or coeff < 1:
            return False
        if not is_canonical(exp):
            return False
        if prev is not None and ord_cmp(prev, exp) <= 0:
            return False
        prev = exp
    return True


# -- text format ----------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(w)|([+*^()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            bad = len(text) - len(text[pos:].lstrip())
            raise OrdinalParseError(f"unexpected character {text[bad]!r}", bad)
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("nat", m.group(1), start))
        elif m.group(2):
            tokens.append(("w", "w", start))
        else:
            tokens.append((m.group(3), m.group(3), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _OrdParser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind: str):
        tok = self.tokens[self.i]
        if tok[0] != kind:
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            raise OrdinalParseError(f"expected {kind!r}, found {what}", tok[2])
        self.i += 1
        return tok

    def ordinal(self) -> Ordinal:
        result = self.term()
        while self.peek()[0] == "+":
            self.i += 1
            result = ord_add(result, self.term())
        return result

    def term(self) -> Ordinal:
        tok = self.peek()
        if tok[0] == "nat":
            self.i += 1
            return nat(int(tok[1]))
        if tok[0] != "w":
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            raise OrdinalParseError(f"expected a number or 'w', found {what}", tok[2])
        self.i += 1
        exp = ONE
        if self.peek()[0] == "^":
            self.i += 1
            exp = self.exponent()
        coeff = 1
        if self.peek()[0] == "*":
            self.i += 1
            coeff = int(self.take("nat")[1])
        return omega_power(exp, coeff)

    def exponent(self) -> Ordinal:
        tok = self.peek()
        if tok[0] == "nat":
            self.i += 1
            return nat(int(tok[1]))
        if tok[0] == "w":
            self.i += 1
            return OMEGA
        self.take("(")
        inner = self.ordinal()
        self.take(")")
        return inner


def ord_parse(text: str) -> Ordinal:
    """Parse an ordinal literal such as ``"w^(w+1)*2 + w^3 + 5"``.

    Summands need not be in normal form; they are added left to right.
    """
    parser = _OrdParser(text)
    result = parser.ordinal()
    parser.take("end")
    return result


def _print_exponent(e: Ordinal) -> str:
    if e.is_finite:
        return str(e.to_int())
    if e == OMEGA:
        return "w"
    return f"({ord_print(e)})"


def ord_print(a: Ordinal) -> str:
    if not a.terms:
        return "0"
    parts = []
    for exp, coeff in a.terms:
        if not exp.terms:
            parts.append(str(coeff))
            continue
        s = "w" if exp == ONE else f"w^{_print_exponent(exp)}"
        if coeff != 1:
            s += f"*{coeff}"
        parts.append(s)
    return " + ".join(parts)
