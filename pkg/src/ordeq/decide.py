"""Equivalence decisions for ordinals below ``w^w`` (``"s"``) and for all ordinals (``"ord"``).

Both procedures work on normal forms in one right-to-left pass per side.

Below ``w^w`` two flat terms are equivalent iff their new monomial
decompositions announce the same new monomials in the same order and,
block by block, hold the same multiset of monomials.

Over all ordinals a pseudo-flat term splits into its non-hidden part (which
is exactly its flat form) and its hidden occurrences.  Equivalence holds iff
the flat forms are equivalent as above and, in every block of the new
variable decomposition, each variable has the same number of hidden
occurrences.  Hidden occurrences take no part in deciding which monomials
are new: they can move within their NVD block (``x + y + w x + w y = y + x
+ w x + w y``), so treating them as new monomials would separate equivalent
terms.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

from .normal_form import (
    MonomialSeq,
    flatten_raw,
    normalize_ord,
    normalize_s,
    restrict,
    without_hidden,
)
from .terms import Term

__all__ = [
    "Detail",
    "Verdict",
    "STRUCTURES",
    "equiv_s",
    "equiv_ord",
    "equiv",
    "equiv_by_pairs",
    "compare_flat",
    "compare_pseudo_flat",
    "nmd_with_hidden_conditions",
]

STRUCTURES = ("s", "ord")

MONOMIAL_MULTISET = "monomial-multiset"
NMD_NEW_MONOMIAL = "nmd-new-monomial"
BLOCK_MULTISET = "block-multiset"
NVD = "nvd"
HIDDEN_COUNT = "hidden-count"


@dataclass(frozen=True)
class Detail:
    check: str
    block: Optional[int] = None

    def to_json(self) -> dict:
        out: dict = {"check": self.check}
        if self.block is not None:
            out["block"] = self.block
        return out


@dataclass(frozen=True)
class Verdict:
    equivalent: bool
    structure: str
    detail: Optional[Detail] = None

    def __post_init__(self):
        if self.equivalent == (self.detail is not None):
            raise ValueError("a verdict carries a detail exactly when it is negative")

    def __bool__(self):
        return self.equivalent

    def to_json(self) -> dict:
        out: dict = {"structure": self.structure, "equivalent": self.equivalent}
        if self.detail is not None:
            out["detail"] = self.detail.to_json()
        return out


def _blocks_right_to_left(monos, key):
    """Yield ``(new_item, Counter of block)`` from the rightmost block leftwards."""
    seen = set()
    block: Counter = Counter()
    for i in range(len(monos) - 1, -1, -1):
        m = monos[i]
        k = key(m)
        if k not in seen:
            if i != len(monos) - 1:
                yield new, block
            seen.add(k)
            new = k
            block = Counter()
        block[m] += 1
    if monos:
        yield new, block


def compare_flat(e: MonomialSeq, f: MonomialSeq) -> Optional[Detail]:
    """``None`` when two flat sequences are equivalent, else the first failing check."""
    be = list(_blocks_right_to_left(e.monos, lambda m: m))
    bf = list(_blocks_right_to_left(f.monos, lambda m: m))
    for j, ((ne, _), (nf, _)) in enumerate(zip(be, bf), start=1):
        if ne != nf:
            return Detail(NMD_NEW_MONOMIAL, j)
    if len(be) != len(bf):
        return Detail(NMD_NEW_MONOMIAL, min(len(be), len(bf)) + 1)
    failing = None
    for j, ((_, ce), (_, cf)) in enumerate(zip(be, bf), start=1):
        if ce != cf:
            failing = j
    if failing is not None:
        return Detail(BLOCK_MULTISET, failing)
    # implied by the block checks; kept as a cheap guard
    if Counter(e.monos) != Counter(f.monos):
        return Detail(MONOMIAL_MULTISET)
    return None


def _hidden_profile(seq: MonomialSeq):
    """Per NVD block, rightmost first: (new variable, Counter of hidden variables)."""
    monos, hidden = seq.monos, seq.hidden
    out = []
    seen = set()
    for i in range(len(monos) - 1, -1, -1):
        v = monos[i].var
        if v not in seen:
            seen.add(v)
            out.append((v, Counter()))
        if hidden[i]:
            out[-1][1][v] += 1
    return out


def compare_pseudo_flat(e: MonomialSeq, f: MonomialSeq) -> Optional[Detail]:
    detail = compare_flat(without_hidden(e), without_hidden(f))
    if detail is not None:
        return detail
    pe, pf = _hidden_profile(e), _hidden_profile(f)
    for j, ((ve, _), (vf, _)) in enumerate(zip(pe, pf), start=1):
        if ve != vf:
            return Detail(NVD, j)
    if len(pe) != len(pf):
        return Detail(NVD, min(len(pe), len(pf)) + 1)
    failing = None
    for j, ((_, he), (_, hf)) in enumerate(zip(pe, pf), start=1):
        if he != hf:
            failing = j
    if failing is not None:
        return Detail(HIDDEN_COUNT, failing)
    return None


def equiv_s(e: Term, f: Term) -> Verdict:
    detail = compare_flat(normalize_s(flatten_raw(e)), normalize_s(flatten_raw(f)))
    return Verdict(detail is None, "s", detail)


def equiv_ord(e: Term, f: Term) -> Verdict:
    detail = compare_pseudo_flat(normalize_ord(flatten_raw(e)), normalize_ord(flatten_raw(f)))
    return Verdict(detail is None, "ord", detail)


def equiv(e: Term, f: Term, structure: str = "s") -> Verdict:
    if structure == "s":
        return equiv_s(e, f)
    if structure == "ord":
        return equiv_ord(e, f)
    raise ValueError(f"unknown structure {structure!r}")


def equiv_by_pairs(e: Term, f: Term, structure: str = "s") -> Verdict:
    """Decide through the restrictions of both terms to every pair of variables."""
    if structure == "s":
        norm, compare = normalize_s, compare_flat
    elif structure == "ord":
        norm, compare = normalize_ord, compare_pseudo_flat
    else:
        raise ValueError(f"unknown structure {structure!r}")
    se, sf = norm(flatten_raw(e)), norm(flatten_raw(f))
    names = list(dict.fromkeys(se.variables() + sf.variables()))
    groups = list(combinations(names, 2)) if len(names) >= 2 else [tuple(names)]
    for group in groups:
        detail = compare(restrict(se, group, strict=False), restrict(sf, group, strict=False))
        if detail is not None:
            return Verdict(False, structure, detail)
    return Verdict(True, structure)


def nmd_with_hidden_conditions(e: Term, f: Term) -> bool:
    """The stricter block conditions in which hidden occurrences take part in
    the new monomial decomposition: same new monomials, same non-hidden
    multiset per NMD block, same hidden counts per NVD block.

    Sound but not complete over all ordinals (it rejects ``x + y + w x + w y``
    against ``y + x + w x + w y``).  Kept for comparison only; verdicts come
    from :func:`equiv_ord`.
    """
    pe, pf = normalize_ord(flatten_raw(e)), normalize_ord(flatten_raw(f))

    def nmd_profile(seq):
        out = []
        seen = set()
        for i in range(len(seq) - 1, -1, -1):
            m = seq.monos[i]
            if m not in seen:
                seen.add(m)
                out.append((m, Counter()))
            if not seq.hidden[i]:
                out[-1][1][m] += 1
        return out

    if nmd_profile(pe) != nmd_profile(pf):
        return False
    return _hidden_profile(pe) == _hidden_profile(pf)
