"""Monomial sequences, their normal forms and block decompositions.

A term flattens (by distributing ``w`` over ``+`` and dropping zeros) into a
sequence of monomials ``w^e x``.  Two normal forms are built on top of it:

* flat (ordinals below ``w^w``): a monomial is deleted when a later monomial
  of the same variable has a larger exponent;
* pseudo-flat (all ordinals): such a monomial is instead demoted to exponent
  0.  An exponent-0 occurrence followed later by a positive-exponent monomial
  of the same variable is *hidden*.

Decompositions cut a normalized sequence into blocks ending, scanning from
the right, at the first occurrence of each distinct monomial (NMD) or of each
distinct variable (NVD).  Blocks are stored leftmost-first as half-open index
ranges; the block *number* used in reports counts from the right, starting
at 1 for the rightmost block.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence

from .terms import OmegaMul, Sum, Term, Var, omega_k, parse_term, sum_of

__all__ = [
    "Monomial",
    "MonomialSeq",
    "Decomposition",
    "RAW",
    "S_FLAT",
    "ORD_PSEUDO_FLAT",
    "flatten_raw",
    "normalize_s",
    "normalize_ord",
    "normalize",
    "nmd",
    "nvd",
    "content",
    "subalphabet_factorization",
    "restrict",
    "hidden_counts",
    "nonhidden_right_of",
    "hidden_right_of",
    "without_hidden",
    "is_s_flat",
    "is_pseudo_flat",
    "seq_to_term",
    "seq_from_text",
]

RAW = "raw"
S_FLAT = "s"
ORD_PSEUDO_FLAT = "ord"


class Monomial(NamedTuple):
    var: str
    exp: int

    def __str__(self):
        if self.exp == 0:
            return self.var
        if self.exp == 1:
            return f"w {self.var}"
        return f"w^{self.exp} {self.var}"


@dataclass(frozen=True)
class MonomialSeq:
    monos: tuple[Monomial, ...]
    structure: str = RAW
    hidden: tuple[bool, ...] = ()

    def __post_init__(self):
        if not self.hidden:
            object.__setattr__(self, "hidden", (False,) * len(self.monos))
        elif len(self.hidden) != len(self.monos):
            raise ValueError("hidden flags must match the monomials one to one")

    def __len__(self):
        return len(self.monos)

    def __iter__(self):
        return iter(self.monos)

    def __getitem__(self, i):
        return self.monos[i]

    def variables(self) -> list[str]:
        """Variables in order of first occurrence."""
        return list(dict.fromkeys(m.var for m in self.monos))

    def render(self, mark_hidden: bool = True) -> str:
        if not self.monos:
            return "0"
        return " + ".join(
            str(m) + ("!" if mark_hidden and h else "") for m, h in zip(self.monos, self.hidden)
        )

    def __str__(self):
        return self.render()


@dataclass(frozen=True)
class Decomposition:
    seq: MonomialSeq
    kind: str
    bounds: tuple[tuple[int, int], ...]

    def __len__(self):
        return len(self.bounds)

    def blocks(self) -> list[tuple[Monomial, ...]]:
        return [self.seq.monos[lo:hi] for lo, hi in self.bounds]

    def new_monomials(self) -> list[Monomial]:
        """The distinguished rightmost monomial of each block, leftmost block first."""
        return [self.seq.monos[hi - 1] for _, hi in self.bounds]

    def number(self, k: int) -> int:
        """Block number (1 = rightmost) of the ``k``-th stored block."""
        return len(self.bounds) - k

    def block(self, j: int) -> tuple[int, int]:
        """Index range of block number ``j`` (1 = rightmost)."""
        return self.bounds[len(self.bounds) - j]

    def render(self, mark_hidden: bool = True) -> str:
        if not self.bounds:
            return "0"
        groups = []
        for lo, hi in self.bounds:
            parts = [
                str(self.seq.monos[i]) + ("!" if mark_hidden and self.seq.hidden[i] else "")
                for i in range(lo, hi)
            ]
            groups.append("(" + " + ".join(parts) + ")")
        return " + ".join(groups)


def flatten_raw(t: Term) -> MonomialSeq:
    """Distribute every ``w`` down to the variables, reading left to right."""
    out: list[Monomial] = []
    stack: list[tuple[Term, int]] = [(t, 0)]
    pop, push, emit = stack.pop, stack.append, out.append
    while stack:
        node, k = pop()
        cls = type(node)
        if cls is Sum:
            push((node.right, k))
            push((node.left, k))
        elif cls is OmegaMul:
            push((node.inner, k + 1))
        elif cls is Var:
            emit(Monomial(node.name, k))
    return MonomialSeq(tuple(out), RAW)


def normalize_s(seq: MonomialSeq) -> MonomialSeq:
    best: dict[str, int] = {}
    kept: list[Monomial] = []
    for m in reversed(seq.monos):
        top = best.get(m.var, -1)
        if m.exp >= top:
            kept.append(m)
            best[m.var] = m.exp
    kept.reverse()
    return MonomialSeq(tuple(kept), S_FLAT)


def normalize_ord(seq: MonomialSeq) -> MonomialSeq:
    best: dict[str, int] = {}
    monos: list[Monomial] = []
    hidden: list[bool] = []
    for m in reversed(seq.monos):
        top = best.get(m.var, 0)
        if 0 < m.exp < top:
            m = Monomial(m.var, 0)
        elif m.exp > top:
            best[m.var] = m.exp
        monos.append(m)
        hidden.append(m.exp == 0 and top > 0)
    monos.reverse()
    hidden.reverse()
    return MonomialSeq(tuple(monos), ORD_PSEUDO_FLAT, tuple(hidden))


def normalize(seq: MonomialSeq, structure: str) -> MonomialSeq:
    if structure == S_FLAT:
        return normalize_s(seq)
    if structure == ORD_PSEUDO_FLAT:
        return normalize_ord(seq)
    raise ValueError(f"unknown structure {structure!r}")


def is_s_flat(seq: MonomialSeq) -> bool:
    best: dict[str, int] = {}
    for m in reversed(seq.monos):
        if m.exp < best.get(m.var, 0):
            return False
        best[m.var] = m.exp
    return True


def is_pseudo_flat(seq: MonomialSeq) -> bool:
    best: dict[str, int] = {}
    for m in reversed(seq.monos):
        if m.exp > 0:
            if m.exp < best.get(m.var, 0):
                return False
            best[m.var] = m.exp
    return True


def without_hidden(seq: MonomialSeq) -> MonomialSeq:
    """Drop hidden occurrences; on a pseudo-flat sequence this is its flat form."""
    monos = tuple(m for m, h in zip(seq.monos, seq.hidden) if not h)
    return MonomialSeq(monos, S_FLAT)


def _decompose(seq: MonomialSeq, key, kind: str) -> Decomposition:
    seen = set()
    cuts: list[int] = []
    monos = seq.monos
    for i in range(len(monos) - 1, -1, -1):
        k = key(monos[i])
        if k not in seen:
            seen.add(k)
            cuts.append(i + 1)
    cuts.reverse()
    bounds = []
    lo = 0
    for hi in cuts:
        bounds.append((lo, hi))
        lo = hi
    return Decomposition(seq, kind, tuple(bounds))


def nmd(seq: MonomialSeq) -> Decomposition:
    """New monomial decomposition.  Hidden occurrences count as ordinary monomials."""
    return _decompose(seq, lambda m: m, "nmd")


def nvd(seq: MonomialSeq) -> Decomposition:
    """New variable decomposition."""
    return _decompose(seq, lambda m: m.var, "nvd")


def content(monos: Iterable[Monomial]) -> set[Monomial]:
    return set(monos)


def subalphabet_factorization(seq: MonomialSeq) -> Decomposition:
    """Factor ``u = u_n ... u_1`` where each ``u_i`` is the longest word adding
    exactly one letter to the content of ``u_{i-1} ... u_1``."""
    monos = seq.monos
    seen: set[Monomial] = set()
    bounds = []
    end = len(monos)
    while end > 0:
        start = end
        fresh = None
        while start > 0:
            letter = monos[start - 1]
            if letter not in seen and fresh is not None and letter != fresh:
                break
            if letter not in seen:
                fresh = letter
            start -= 1
        seen |= content(monos[start:end])
        bounds.append((start, end))
        end = start
    bounds.reverse()
    return Decomposition(seq, "subalphabet", tuple(bounds))


def restrict(seq: MonomialSeq, keep: Sequence[str], strict: bool = True) -> MonomialSeq:
    """Keep only the monomials of the variables in ``keep`` and re-normalize."""
    wanted = set(keep)
    if strict:
        present = {m.var for m in seq.monos}
        missing = sorted(wanted - present)
        if missing:
            raise KeyError(f"variable(s) not in sequence: {', '.join(missing)}")
    sub = MonomialSeq(tuple(m for m in seq.monos if m.var in wanted), RAW)
    if seq.structure == RAW:
        return sub
    return normalize(sub, seq.structure)


def hidden_counts(seq: MonomialSeq, d: Optional[Decomposition] = None) -> dict[tuple[int, str], int]:
    """Hidden occurrences per (NVD block number, variable); every pair is present."""
    if d is None:
        d = nvd(seq)
    names = seq.variables()
    table = {}
    for k, (lo, hi) in enumerate(d.bounds):
        j = d.number(k)
        row = dict.fromkeys(names, 0)
        for i in range(lo, hi):
            if seq.hidden[i]:
                row[seq.monos[i].var] += 1
        for name in names:
            table[(j, name)] = row[name]
    return table


def _after_last(seq: MonomialSeq, j: Optional[str]) -> int:
    if j is None:
        return 0
    for p in range(len(seq.monos) - 1, -1, -1):
        if seq.monos[p].var == j:
            return p + 1
    return 0


def nonhidden_right_of(seq: MonomialSeq, i: str, j: Optional[str]) -> int:
    """Non-hidden ``i``-monomials strictly right of the last ``j``-monomial."""
    start = _after_last(seq, j)
    return sum(
        1 for p in range(start, len(seq.monos)) if seq.monos[p].var == i and not seq.hidden[p]
    )


def hidden_right_of(seq: MonomialSeq, i: str, j: Optional[str]) -> int:
    """Hidden ``i``-occurrences strictly right of the last ``j``-monomial."""
    start = _after_last(seq, j)
    return sum(1 for p in range(start, len(seq.monos)) if seq.monos[p].var == i and seq.hidden[p])


def seq_to_term(seq: Iterable[Monomial]) -> Term:
    return sum_of(omega_k(m.exp, Var(m.var)) for m in seq)


def seq_from_text(text: str) -> MonomialSeq:
    """Raw sequence of a term given in concrete syntax."""
    return flatten_raw(parse_term(text))
