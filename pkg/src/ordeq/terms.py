"""Terms over ``{0, +, x -> w x}``: syntax trees, parsing, printing, evaluation.

Concrete syntax (``w`` is omega, ``+`` is left-associative, ``w`` binds
tighter than ``+``)::

    Term := Atom ('+' Atom)*
    Atom := '0' | Var | 'w' ('^' Nat)? Arg
    Arg  := Var | '0' | '(' Term ')' | Atom-starting-with-'w'

Trees can be very deep (a sum of a million monomials is a left spine of a
million ``Sum`` nodes), so every traversal here is iterative.
"""

from __future__ import annotations

import re
from typing import Iterator, Mapping

from .ordinal import (
    ZERO,
    Ordinal,
    OrdinalParseError,
    ord_add,
    ord_omega_mul,
    ord_parse,
)

__all__ = [
    "Term",
    "Zero",
    "Var",
    "Sum",
    "OmegaMul",
    "ZERO_TERM",
    "TermParseError",
    "ReservedIdentifierError",
    "UnboundVariableError",
    "parse_term",
    "print_term",
    "eval_term",
    "variables",
    "omega_k",
    "sum_of",
    "left_assoc",
    "term_size",
    "parse_assignment",
    "print_assignment",
]

RESERVED = "w"
_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


class TermParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class ReservedIdentifierError(TermParseError):
    pass


class UnboundVariableError(KeyError):
    pass


class Term:
    __slots__ = ("_hash",)

    def children(self) -> tuple["Term", ...]:
        return ()

    def _shallow(self):
        return type(self)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Term):
            return NotImplemented
        stack = [(self, other)]
        while stack:
            a, b = stack.pop()
            if a is b:
                continue
            if a._shallow() != b._shallow():
                return False
            stack.extend(zip(a.children(), b.children()))
        return True

    def __hash__(self):
        h = getattr(self, "_hash", None)
        if h is not None:
            return h
        # post-order over nodes whose hash is not cached yet
        stack = [(self, False)]
        while stack:
            node, ready = stack.pop()
            if getattr(node, "_hash", None) is not None:
                continue
            if ready:
                node._hash = hash((node._shallow(),) + tuple(c._hash for c in node.children()))
            else:
                stack.append((node, True))
                stack.extend((c, False) for c in node.children())
        return self._hash

    def __str__(self):
        return print_term(self)

    def __repr__(self):
        return f"parse_term({print_term(self)!r})"

    def __add__(self, other: "Term") -> "Term":
        return Sum(self, other)


class Zero(Term):
    __slots__ = ()


class Var(Term):
    __slots__ = ("name",)

    def __init__(self, name: str):
        if not _IDENT.match(name):
            raise ValueError(f"invalid variable name {name!r}")
        if name == RESERVED:
            raise ReservedIdentifierError("'w' is reserved for omega and cannot name a variable", 0)
        self.name = name

    def _shallow(self):
        return (Var, self.name)


class Sum(Term):
    __slots__ = ("left", "right")

    def __init__(self, left: Term, right: Term):
        self.left = left
        self.right = right

    def children(self):
        return (self.left, self.right)


class OmegaMul(Term):
    __slots__ = ("inner",)

    def __init__(self, inner: Term):
        self.inner = inner

    def children(self):
        return (self.inner,)


ZERO_TERM = Zero()


def omega_k(k: int, t: Term) -> Term:
    """``w^k t``; ``w^0 t`` is ``t`` itself."""
    for _ in range(k):
        t = OmegaMul(t)
    return t


def sum_of(parts) -> Term:
    """Left-associated sum of ``parts``; the empty sum is ``0``."""
    result = None
    for p in parts:
        result = p if result is None else Sum(result, p)
    return ZERO_TERM if result is None else result


def _iter_nodes(t: Term) -> Iterator[Term]:
    stack = [t]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children()))


def term_size(t: Term) -> int:
    return sum(1 for _ in _iter_nodes(t))


def variables(t: Term) -> list[str]:
    """Variables of ``t`` in order of first occurrence."""
    seen: dict[str, None] = {}
    for node in _iter_nodes(t):
        if isinstance(node, Var):
            seen.setdefault(node.name, None)
    return list(seen)


def summands(t: Term) -> list[Term]:
    """The top-level sum spine of ``t`` read left to right (zeros included)."""
    out = []
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Sum):
            stack.append(node.right)
            stack.append(node.left)
        else:
            out.append(node)
    return out


def left_assoc(t: Term) -> Term:
    """Re-associate every sum to the left (the shape the parser produces)."""
    spine = summands(t)
    parts = []
    for s in spine:
        if isinstance(s, OmegaMul):
            k = 0
            while isinstance(s, OmegaMul):
                s, k = s.inner, k + 1
            parts.append(omega_k(k, left_assoc(s)))
        else:
            parts.append(s)
    return sum_of(parts)


# -- evaluation -------------------------------------------------------------


def eval_term(t: Term, assignment: Mapping[str, Ordinal]) -> Ordinal:
    """Evaluate ``t`` with ``+`` as ordinal sum and ``w`` as left omega-multiplication."""
    values: list[Ordinal] = []
    stack: list[tuple[Term, bool]] = [(t, False)]
    while stack:
        node, done = stack.pop()
        if isinstance(node, Sum):
            if done:
                right = values.pop()
                values.append(ord_add(values.pop(), right))
            else:
                stack.append((node, True))
                stack.append((node.right, False))
                stack.append((node.left, False))
        elif isinstance(node, OmegaMul):
            if done:
                values.append(ord_omega_mul(values.pop()))
            else:
                stack.append((node, True))
                stack.append((node.inner, False))
        elif isinstance(node, Var):
            try:
                values.append(assignment[node.name])
            except KeyError:
                raise UnboundVariableError(node.name) from None
        else:
            values.append(ZERO)
    return values[0]


# -- parsing ----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|([+^()]))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            bad = len(text) - len(text[pos:].lstrip())
            raise TermParseError(f"unexpected character {text[bad]!r}", bad)
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            tokens.append(("nat", m.group(1), start))
        elif m.group(2) is not None:
            kind = "w" if m.group(2) == RESERVED else "id"
            tokens.append((kind, m.group(2), start))
        else:
            tokens.append((m.group(3), m.group(3), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


def _describe(tok) -> str:
    return "end of input" if tok[0] == "end" else repr(tok[1])


def parse_term(text: str) -> Term:
    """Parse a term such as ``"w^3 x + w(y + w z)"``."""
    tokens = _tokenize(text)
    i = 0
    # Explicit stack of open parenthesised sums: each frame holds the partial
    # sum and the pending omega power to apply when the group closes.
    frames: list[tuple[Term | None, int, int]] = []
    acc: Term | None = None
    while True:
        # parse one atom: a run of 'w' prefixes followed by an argument
        k = 0
        tok = tokens[i]
        while tok[0] == "w":
            w_tok = tok
            i += 1
            power = 1
            if tokens[i][0] == "^":
                i += 1
                if tokens[i][0] != "nat":
                    raise TermParseError(f"expected exponent, found {_describe(tokens[i])}", tokens[i][2])
                power = int(tokens[i][1])
                i += 1
            k += power
            tok = tokens[i]
            if tok[0] in ("+", ")", "end", "^"):
                raise ReservedIdentifierError(
                    "'w' is reserved for omega and cannot be used as a variable", w_tok[2]
                )
        if tok[0] == "id":
            atom: Term = omega_k(k, Var(tok[1]))
            i += 1
        elif tok[0] == "nat":
            if tok[1] != "0":
                raise TermParseError(f"only the constant 0 is allowed, found {tok[1]}", tok[2])
            atom = omega_k(k, ZERO_TERM)
            i += 1
        elif tok[0] == "(":
            frames.append((acc, k, tok[2]))
            acc = None
            i += 1
            continue
        else:
            raise TermParseError(f"expected a term, found {_describe(tok)}", tok[2])

        acc = atom if acc is None else Sum(acc, atom)
        # close any finished groups, then expect '+' or the end
        while True:
            tok = tokens[i]
            if tok[0] == ")":
                if not frames:
                    raise TermParseError("unbalanced ')'", tok[2])
                outer, power, _ = frames.pop()
                group = omega_k(power, acc)
                acc = group if outer is None else Sum(outer, group)
                i += 1
                continue
            break
        if tok[0] == "+":
            i += 1
            continue
        if tok[0] == "end":
            if frames:
                raise TermParseError("unclosed '('", frames[-1][2])
            return acc
        raise TermParseError(f"expected '+' or end of term, found {_describe(tok)}", tok[2])


# -- printing ---------------------------------------------------------------


def print_term(t: Term) -> str:
    """Print with flattened sums and explicit ``w^k`` powers."""
    out: list[str] = []
    # work items: a Term to render as a sum, or a literal string
    stack: list[Term | str] = [t]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        parts = summands(item)
        rendered: list[Term | str] = []
        for j, s in enumerate(parts):
            if j:
                rendered.append(" + ")
            k = 0
            while isinstance(s, OmegaMul):
                s, k = s.inner, k + 1
            if k:
                prefix = "w" if k == 1 else f"w^{k}"
                rendered.append(prefix if isinstance(s, Sum) else prefix + " ")
            if isinstance(s, Var):
                rendered.append(s.name)
            elif isinstance(s, Zero):
                rendered.append("0")
            else:
                rendered.extend(["(", s, ")"])
        stack.extend(reversed(rendered))
    return "".join(out)


# -- assignments ------------------------------------------------------------


def parse_assignment(text: str) -> dict[str, Ordinal]:
    """Parse ``"x=w^2*3+1,y=0"``."""
    result: dict[str, Ordinal] = {}
    text = text.strip()
    if not text:
        return result
    offset = 0
    for chunk in text.split(","):
        name, sep, value = chunk.partition("=")
        if not sep:
            raise TermParseError(f"expected 'var=ordinal' in {chunk.strip()!r}", offset)
        name = name.strip()
        if name == RESERVED:
            raise ReservedIdentifierError("'w' is reserved for omega and cannot name a variable", offset)
        if not _IDENT.match(name):
            raise TermParseError(f"invalid variable name {name!r}", offset)
        try:
            result[name] = ord_parse(value)
        except OrdinalParseError as exc:
            raise TermParseError(f"bad ordinal for {name}: {exc}", offset + len(name) + 1 + exc.pos) from None
        offset += len(chunk) + 1
    return result


def print_assignment(assignment: Mapping[str, Ordinal]) -> str:
    return ",".join(f"{k}={v}" for k, v in assignment.items())
