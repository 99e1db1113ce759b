"""The two axiom systems as data.

Each side of an axiom is a list of *items*.  An item is ``(exp, body)``
where ``exp`` is a natural number or the name of a schema parameter
(``p``, ``q``, ``r``) and ``body`` is an axiom variable name, ``None`` for
the constant 0, or a nested item list for a parenthesised sum.  The item
``(e, body)`` stands for ``w^e body``; a side is the sum of its items.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Union

from .terms import Term, Var, ZERO_TERM, omega_k, sum_of

__all__ = [
    "Axiom",
    "AXIOMS",
    "SYSTEMS",
    "SYSTEM_REVISION",
    "get_axiom",
    "in_system",
    "side_term",
    "side_text",
    "instance_terms",
]

SYSTEM_REVISION = "s-7+c/ord-9"

Exp = Union[int, str]
Item = tuple  # (Exp, str | None | list[Item])


@dataclass(frozen=True)
class Axiom:
    id: str
    lhs: tuple
    rhs: tuple
    params: tuple[str, ...] = ()
    condition: Callable[..., bool] = lambda **_: True
    condition_text: str = ""
    systems: frozenset = frozenset()
    derived: bool = False

    def variables(self) -> list[str]:
        out: dict[str, None] = {}

        def walk(items):
            for _, body in items:
                if isinstance(body, str):
                    out.setdefault(body, None)
                elif isinstance(body, (list, tuple)):
                    walk(body)

        walk(self.lhs)
        walk(self.rhs)
        return list(out)

    def holds_for(self, params: Mapping[str, int]) -> bool:
        if set(params) != set(self.params):
            return False
        if any(not isinstance(v, int) or isinstance(v, bool) or v < 0 for v in params.values()):
            return False
        return bool(self.condition(**params))

    def side(self, direction: str) -> tuple[tuple, tuple]:
        """``(source, target)`` items for a rewrite in ``direction``."""
        if direction == "ltr":
            return self.lhs, self.rhs
        if direction == "rtl":
            return self.rhs, self.lhs
        raise ValueError(f"unknown direction {direction!r}")

    def __str__(self):
        generic = {p: p for p in self.params}
        text = f"{side_text(self.lhs, generic)} = {side_text(self.rhs, generic)}"
        if self.condition_text:
            text += f"   ({self.condition_text})"
        return text


def _resolve(e: Exp, params: Mapping[str, object]):
    return params[e] if isinstance(e, str) else e


def side_term(items, subst: Mapping[str, Term], params: Mapping[str, int]) -> Term:
    """Instantiate a side with terms for the variables and naturals for the parameters."""
    parts = []
    for e, body in items:
        if body is None:
            inner = ZERO_TERM
        elif isinstance(body, str):
            inner = subst[body]
        else:
            inner = side_term(body, subst, params)
        parts.append(omega_k(_resolve(e, params), inner))
    return sum_of(parts)


def side_text(items, params: Mapping[str, object]) -> str:
    parts = []
    for e, body in items:
        e = _resolve(e, params)
        if body is None:
            inner = "0"
        elif isinstance(body, str):
            inner = body
        else:
            inner = "(" + side_text(body, params) + ")"
        if e == 0:
            parts.append(inner)
        elif e == 1:
            parts.append(f"w {inner}" if not inner.startswith("(") else f"w{inner}")
        else:
            parts.append(f"w^{e} {inner}" if not inner.startswith("(") else f"w^{e}{inner}")
    return " + ".join(parts) if parts else "0"


S, O = "s", "ord"
BOTH = frozenset({S, O})


def _v(name: str, e: Exp = 0) -> Item:
    return (e, name)


AXIOMS: dict[str, Axiom] = {}


def _register(ax: Axiom) -> None:
    AXIOMS[ax.id] = ax


_register(Axiom(
    "assoc",
    (_v("x"), (0, [_v("y"), _v("z")])),
    ((0, [_v("x"), _v("y")]), _v("z")),
    systems=BOTH,
))
_register(Axiom(
    "omega-distrib",
    ((1, [_v("x"), _v("y")]),),
    (_v("x", 1), _v("y", 1)),
    systems=BOTH,
))
_register(Axiom(
    "left-domination",
    (_v("x"), _v("y"), _v("x", 1)),
    (_v("y"), _v("x", 1)),
    systems=frozenset({S}),
))
_register(Axiom(
    "guarded-comm",
    (_v("x"), _v("y"), _v("z"), _v("x"), _v("t"), _v("y")),
    (_v("y"), _v("x"), _v("z"), _v("x"), _v("t"), _v("y")),
    systems=BOTH,
))
_register(Axiom("unit-right", (_v("x"), (0, None)), (_v("x"),), systems=BOTH))
_register(Axiom("unit-left", ((0, None), _v("x")), (_v("x"),), systems=BOTH))
_register(Axiom("omega-zero", ((1, None),), (), systems=BOTH))
_register(Axiom(
    "c-domination",
    (_v("x", "p"), _v("y"), _v("x", "q")),
    (_v("y"), _v("x", "q")),
    params=("p", "q"),
    condition=lambda p, q: p < q,
    condition_text="p < q",
    systems=frozenset({S}),
    derived=True,
))
_register(Axiom(
    "domination1",
    (_v("x", "p"), _v("y"), _v("x", "q")),
    (_v("x"), _v("y"), _v("x", "q")),
    params=("p", "q"),
    condition=lambda p, q: 0 < p < q,
    condition_text="0 < p < q",
    systems=frozenset({O}),
))
_register(Axiom(
    "hidden-old-1",
    (_v("x"), _v("y", "r"), _v("t"), _v("x", "p"), _v("u"), _v("y", "q")),
    (_v("y", "r"), _v("x"), _v("t"), _v("x", "p"), _v("u"), _v("y", "q")),
    params=("p", "q", "r"),
    condition=lambda p, q, r: p > 0 or q == r,
    condition_text="p > 0 or q = r",
    systems=frozenset({O}),
))
_register(Axiom(
    "hidden-old-2",
    (_v("x"), _v("y", "r"), _v("t"), _v("y", "q"), _v("u"), _v("x", "p")),
    (_v("y", "r"), _v("x"), _v("t"), _v("y", "q"), _v("u"), _v("x", "p")),
    params=("p", "q", "r"),
    condition=lambda p, q, r: p > 0 or q == r,
    condition_text="p > 0 or q = r",
    systems=frozenset({O}),
))

SYSTEMS: dict[str, tuple[str, ...]] = {
    S: tuple(a.id for a in AXIOMS.values() if S in a.systems and not a.derived),
    O: tuple(a.id for a in AXIOMS.values() if O in a.systems),
}


def get_axiom(axiom_id: str) -> Axiom:
    try:
        return AXIOMS[axiom_id]
    except KeyError:
        raise KeyError(f"unknown axiom {axiom_id!r}") from None


def in_system(axiom_id: str, structure: str, allow_derived: bool = True) -> bool:
    ax = AXIOMS.get(axiom_id)
    if ax is None or structure not in ax.systems:
        return False
    return allow_derived or not ax.derived


def instance_terms(axiom_id: str, subst: Mapping[str, Term], params: Mapping[str, int]) -> tuple[Term, Term]:
    """Both sides of an axiom instance as terms."""
    ax = get_axiom(axiom_id)
    full = {v: subst.get(v, Var(v)) for v in ax.variables()}
    return side_term(ax.lhs, full, params), side_term(ax.rhs, full, params)
