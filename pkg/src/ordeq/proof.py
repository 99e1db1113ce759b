"""Axiom-level derivations: construction, replay and serialization.

Terms are handled as *spines*: a spine is a tuple of summands, each summand
either a variable name or ``("w", spine)``.  Sums are flattened and zero
summands dropped, so associativity and the two unit axioms are applied
implicitly.  ``w 0`` is the summand ``("w", ())`` and is only removed by an
explicit ``omega-zero`` step.

A :class:`RewriteStep` names an axiom, a direction, a path of summand
indices leading to a nested spine (each index must point at a ``w``
summand), the half-open range ``[lo, hi)`` of that spine being rewritten,
and the substitution.  Replaying a step instantiates the source side,
checks it against the range and splices in the instantiated target side.
"""

from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Sequence

from .axioms import AXIOMS, get_axiom, in_system
from .decide import equiv
from .normal_form import Monomial
from .terms import OmegaMul, Sum, Term, Var, ZERO_TERM, parse_term, print_term, sum_of, summands

__all__ = [
    "RewriteStep",
    "Derivation",
    "VerifyResult",
    "StepError",
    "NotEquivalentError",
    "ProofSearchError",
    "to_spine",
    "from_spine",
    "apply_step",
    "reverse_step",
    "expand_c_domination",
    "positions",
    "verify",
    "prove_equiv",
    "match_instances",
    "parse_derivation",
]


class StepError(ValueError):
    pass


class NotEquivalentError(ValueError):
    pass


class ProofSearchError(RuntimeError):
    pass


# -- spines -------------------------------------------------------------------

W = "w"


def to_spine(t: Term) -> tuple:
    out = []
    for s in summands(t):
        if isinstance(s, Var):
            out.append(s.name)
        elif isinstance(s, OmegaMul):
            out.append((W, to_spine(s.inner)))
        # Zero summands vanish
    return tuple(out)


def from_spine(spine: Sequence) -> Term:
    parts = []
    for s in spine:
        parts.append(Var(s) if isinstance(s, str) else OmegaMul(from_spine(s[1])))
    return sum_of(parts)


def _wrap(inner: tuple, k: int):
    s = (W, inner)
    for _ in range(k - 1):
        s = (W, (s,))
    return s


def _mono_summand(m: Monomial):
    return m.var if m.exp == 0 else _wrap((m.var,), m.exp)


def _summand_monomial(s) -> Monomial:
    k = 0
    while not isinstance(s, str):
        if len(s[1]) != 1:
            raise ValueError("not a monomial")
        s, k = s[1][0], k + 1
    return Monomial(s, k)


def _instantiate(items, subst: Mapping[str, tuple], params: Mapping[str, int]) -> tuple:
    out: list = []
    for e, body in items:
        k = params[e] if isinstance(e, str) else e
        if body is None:
            inner: tuple = ()
        elif isinstance(body, str):
            inner = subst[body]
        else:
            inner = _instantiate(body, subst, params)
        if k == 0:
            out.extend(inner)
        else:
            out.append(_wrap(inner, k))
    return tuple(out)


def _get(spine: tuple, path: Sequence[int]) -> tuple:
    for idx in path:
        if not 0 <= idx < len(spine) or isinstance(spine[idx], str):
            raise StepError(f"path component {idx} does not lead to a 'w' summand")
        spine = spine[idx][1]
    return spine


def _put(spine: tuple, path: Sequence[int], lo: int, hi: int, repl: tuple) -> tuple:
    if not path:
        return spine[:lo] + repl + spine[hi:]
    idx = path[0]
    inner = _put(spine[idx][1], path[1:], lo, hi, repl)
    return spine[:idx] + ((W, inner),) + spine[idx + 1:]


# -- steps ----------------------------------------------------------------------


@dataclass(frozen=True)
class RewriteStep:
    axiom_id: str
    direction: str
    path: tuple[int, ...]
    lo: int
    hi: int
    substitution: Mapping[str, Term] = field(default_factory=dict)
    params: Mapping[str, int] = field(default_factory=dict)

    def spines(self) -> dict[str, tuple]:
        return {k: to_spine(v) for k, v in self.substitution.items()}

    def sides(self) -> tuple[tuple, tuple]:
        """Instantiated (source, target) spines."""
        ax = get_axiom(self.axiom_id)
        src, tgt = ax.side(self.direction)
        sub = self.spines()
        return _instantiate(src, sub, self.params), _instantiate(tgt, sub, self.params)

    def render(self, n: int) -> str:
        where = f"[{self.lo},{self.hi}]"
        if self.path:
            where = ".".join(map(str, self.path)) + ":" + where
        binds = [f"{k}:={print_term(v)}" for k, v in self.substitution.items()]
        binds += [f"{k}:={v}" for k, v in self.params.items()]
        return f"step {n}: {self.axiom_id} {self.direction} @ {where} with {{{', '.join(binds)}}}"

    def to_json(self) -> dict:
        return {
            "axiom": self.axiom_id,
            "direction": self.direction,
            "path": list(self.path),
            "range": [self.lo, self.hi],
            "substitution": {k: print_term(v) for k, v in self.substitution.items()},
            "params": dict(self.params),
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "RewriteStep":
        return cls(
            obj["axiom"],
            obj["direction"],
            tuple(obj.get("path", ())),
            int(obj["range"][0]),
            int(obj["range"][1]),
            {k: parse_term(v) for k, v in obj.get("substitution", {}).items()},
            {k: int(v) for k, v in obj.get("params", {}).items()},
        )


def apply_step(spine: tuple, step: RewriteStep) -> tuple:
    """Replay one step on a spine; raises :class:`StepError` on any mismatch."""
    ax = AXIOMS.get(step.axiom_id)
    if ax is None:
        raise StepError(f"unknown axiom {step.axiom_id!r}")
    if step.direction not in ("ltr", "rtl"):
        raise StepError(f"unknown direction {step.direction!r}")
    if set(step.substitution) != set(ax.variables()):
        raise StepError(f"substitution must bind exactly {', '.join(ax.variables()) or 'nothing'}")
    if not ax.holds_for(dict(step.params)):
        cond = ax.condition_text or "no parameters"
        raise StepError(f"parameters {dict(step.params)} violate {cond}")
    target_spine = _get(spine, step.path)
    if not 0 <= step.lo <= step.hi <= len(target_spine):
        raise StepError(f"range [{step.lo},{step.hi}] outside a spine of length {len(target_spine)}")
    src, tgt = step.sides()
    if target_spine[step.lo:step.hi] != src:
        raise StepError("the instantiated axiom side does not match the designated range")
    return _put(spine, step.path, step.lo, step.hi, tgt)


def reverse_step(step: RewriteStep) -> RewriteStep:
    """The step undoing ``step`` (applied to the spine ``step`` produced)."""
    _, tgt = step.sides()
    back = "rtl" if step.direction == "ltr" else "ltr"
    return RewriteStep(step.axiom_id, back, step.path, step.lo, step.lo + len(tgt),
                       dict(step.substitution), dict(step.params))


def expand_c_domination(step: RewriteStep) -> list[RewriteStep]:
    """Primitive left-domination steps with the same overall effect.

    ``w^p x + y + w^q x``: first grow the chain ``w^(p+1) x ... w^(q-1) x``
    in front of ``w^q x``, then drop ``w^p x`` against ``w^(p+1) x``, then
    collapse the chain again.
    """
    if step.axiom_id != "c-domination":
        return [step]
    if step.direction == "rtl":
        return [reverse_step(s) for s in reversed(expand_c_domination(reverse_step(step)))]
    p, q = step.params["p"], step.params["q"]
    x, y = step.substitution["x"], step.substitution["y"]
    xs, ys = to_spine(x), to_spine(y)

    def width(k: int) -> int:
        return 1 if k > 0 else len(xs)

    def ld(direction: str, lo: int, hi: int, xk: int, yterm: Term) -> RewriteStep:
        return RewriteStep("left-domination", direction, step.path, lo, hi,
                           {"x": _omega_pow(xk, x), "y": yterm}, {})

    lo = step.lo
    out: list[RewriteStep] = []
    s0 = lo + width(p) + len(ys)
    for k in range(q - 1, p, -1):
        # "0 + w^(k+1) x" becomes "w^k x + 0 + w^(k+1) x"
        out.append(ld("rtl", s0, s0 + 1, k, ZERO_TERM))
    out.append(ld("ltr", lo, s0 + 1, p, y))
    s1 = lo + len(ys)
    for k in range(p + 1, q):
        out.append(ld("ltr", s1, s1 + 2, k, ZERO_TERM))
    return out


def _omega_pow(k: int, t: Term) -> Term:
    for _ in range(k):
        t = OmegaMul(t)
    return t


# -- derivations ------------------------------------------------------------------


@dataclass
class Derivation:
    start: Term
    steps: list[RewriteStep]
    end: Term
    structure: str

    def render(self) -> str:
        lines = [f"structure: {self.structure}", f"start: {print_term(self.start)}"]
        lines += [s.render(n) for n, s in enumerate(self.steps, start=1)]
        lines.append(f"end: {print_term(self.end)}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "structure": self.structure,
            "start": print_term(self.start),
            "end": print_term(self.end),
            "steps": [s.to_json() for s in self.steps],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, obj) -> "Derivation":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(
            parse_term(obj["start"]),
            [RewriteStep.from_json(s) for s in obj["steps"]],
            parse_term(obj["end"]),
            obj["structure"],
        )


_STEP_LINE = re.compile(
    r"step\s+(\d+):\s+(\S+)\s+(ltr|rtl)\s+@\s+(?:([\d.]+):)?\[(\d+),(\d+)\]\s+with\s+\{(.*)\}\s*$"
)


def parse_derivation(text: str) -> Derivation:
    """Inverse of :meth:`Derivation.render`."""
    structure = start = end = None
    steps = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("structure:"):
            structure = line.split(":", 1)[1].strip()
        elif line.startswith("start:"):
            start = parse_term(line.split(":", 1)[1])
        elif line.startswith("end:"):
            end = parse_term(line.split(":", 1)[1])
        else:
            m = _STEP_LINE.match(line)
            if not m:
                raise ValueError(f"unrecognised derivation line: {line!r}")
            _, ax, direction, path, lo, hi, body = m.groups()
            subst: dict[str, Term] = {}
            params: dict[str, int] = {}
            for chunk in filter(None, (c.strip() for c in body.split(","))):
                name, _, value = chunk.partition(":=")
                name = name.strip()
                if name in ("p", "q", "r"):
                    params[name] = int(value)
                else:
                    subst[name] = parse_term(value)
            steps.append(RewriteStep(ax, direction,
                                     tuple(int(i) for i in path.split(".")) if path else (),
                                     int(lo), int(hi), subst, params))
    if structure is None or start is None or end is None:
        raise ValueError("derivation text needs structure, start and end lines")
    return Derivation(start, steps, end, structure)


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    step: Optional[int] = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def verify(d: Derivation, strict: bool = False) -> VerifyResult:
    """Replay ``d``.  With ``strict`` the derived c-domination shortcut is
    expanded into primitive left-domination steps before replay."""
    if d.structure not in ("s", "ord"):
        return VerifyResult(False, None, f"unknown structure {d.structure!r}")
    spine = to_spine(d.start)
    for n, step in enumerate(d.steps, start=1):
        if step.axiom_id not in AXIOMS:
            return VerifyResult(False, n, f"unknown axiom {step.axiom_id!r}")
        if not in_system(step.axiom_id, d.structure):
            return VerifyResult(False, n, f"{step.axiom_id} is not an axiom for structure {d.structure}")
        try:
            if strict and get_axiom(step.axiom_id).derived:
                if not get_axiom(step.axiom_id).holds_for(dict(step.params)):
                    raise StepError("parameters violate the side condition")
                for sub in expand_c_domination(step):
                    spine = apply_step(spine, sub)
            else:
                spine = apply_step(spine, step)
        except (StepError, KeyError) as exc:
            return VerifyResult(False, n, str(exc))
    if spine != to_spine(d.end):
        return VerifyResult(False, len(d.steps), "replay does not end at the declared end term")
    return VerifyResult(True)


# -- proof construction ----------------------------------------------------------------


class _Builder:
    """A spine plus the steps that produced it; every step is replayed as it is added."""

    def __init__(self, spine: tuple):
        self.spine = spine
        self.steps: list[RewriteStep] = []

    def emit(self, step: RewriteStep) -> None:
        self.spine = apply_step(self.spine, step)
        self.steps.append(step)


def _flatten(b: _Builder, path: tuple = ()) -> None:
    i = 0
    while True:
        seq = _get(b.spine, path)
        if i >= len(seq):
            return
        if isinstance(seq[i], str):
            i += 1
            continue
        _flatten(b, path + (i,))
        inner = _get(b.spine, path)[i][1]
        if not inner:
            b.emit(RewriteStep("omega-zero", "ltr", path, i, i + 1, {}, {}))
            continue
        if len(inner) > 1:
            b.emit(RewriteStep("omega-distrib", "ltr", path, i, i + 1,
                               {"x": from_spine(inner[:1]), "y": from_spine(inner[1:])}, {}))
        i += 1


def _mono_term(m: Monomial) -> Term:
    return _omega_pow(m.exp, Var(m.var))


def _seq_term(monos: Sequence[Monomial]) -> Term:
    return sum_of(_mono_term(m) for m in monos)


def _dominate(b: _Builder, structure: str) -> list[Monomial]:
    """Delete (flat) or demote (pseudo-flat) every dominated monomial, rightmost first."""
    monos = [_summand_monomial(s) for s in b.spine]
    best: dict[str, int] = {}
    i = len(monos) - 1
    while i >= 0:
        m = monos[i]
        top = best.get(m.var, -1)
        if m.exp < top and not (structure == "ord" and m.exp == 0):
            j = next(k for k in range(i + 1, len(monos)) if monos[k].var == m.var and monos[k].exp > m.exp)
            subst = {"x": Var(m.var), "y": _seq_term(monos[i + 1:j])}
            params = {"p": m.exp, "q": monos[j].exp}
            if structure == "s":
                b.emit(RewriteStep("c-domination", "ltr", (), i, j + 1, subst, params))
                del monos[i]
            else:
                b.emit(RewriteStep("domination1", "ltr", (), i, j + 1, subst, params))
                monos[i] = Monomial(m.var, 0)
        else:
            best[m.var] = max(top, m.exp)
        i -= 1
    return monos


def _swap_step(monos: Sequence[Monomial], j: int, structure: str) -> Optional[RewriteStep]:
    """An axiom instance exchanging ``monos[j]`` and ``monos[j+1]``, if one exists."""
    a, b = monos[j], monos[j + 1]
    n = len(monos)
    rest = range(j + 2, n)
    pa = [k for k in rest if monos[k] == a]
    pb = [k for k in rest if monos[k] == b]
    if pa and pb:
        if pb[-1] > pa[0]:
            x, y, px = a, b, pa[0]
            py = next(k for k in pb if k > px)
            direction = "ltr"
        else:
            x, y, px = b, a, pb[0]
            py = next(k for k in pa if k > px)
            direction = "rtl"
        subst = {"x": _mono_term(x), "y": _mono_term(y),
                 "z": _seq_term(monos[j + 2:px]), "t": _seq_term(monos[px + 1:py])}
        return RewriteStep("guarded-comm", direction, (), j, py + 1, subst, {})
    if structure != "ord":
        return None
    for hid, other, direction in ((a, b, "ltr"), (b, a, "rtl")):
        if hid.exp != 0:
            continue
        p1 = next((k for k in rest if monos[k].var == hid.var and monos[k].exp > 0), None)
        if p1 is None:
            continue
        p2 = next((k for k in rest if monos[k].var == other.var and k != p1), None)
        if p2 is None:
            continue
        first, second = sorted((p1, p2))
        subst = {"x": Var(hid.var), "y": Var(other.var),
                 "t": _seq_term(monos[j + 2:first]), "u": _seq_term(monos[first + 1:second])}
        params = {"p": monos[p1].exp, "q": monos[p2].exp, "r": other.exp}
        axiom = "hidden-old-1" if p1 < p2 else "hidden-old-2"
        return RewriteStep(axiom, direction, (), j, second + 1, subst, params)
    return None


def _swap(monos: list[Monomial], j: int) -> None:
    monos[j], monos[j + 1] = monos[j + 1], monos[j]


def _align_greedy(b: _Builder, monos: list[Monomial], goal: Sequence[Monomial], structure: str) -> bool:
    """Fix positions right to left, bubbling the rightmost usable copy into place."""
    for k in range(len(goal) - 1, -1, -1):
        if monos[k] == goal[k]:
            continue
        i = next((i for i in range(k - 1, -1, -1) if monos[i] == goal[k]), None)
        if i is None:
            return False
        for j in range(i, k):
            if monos[j] == monos[j + 1]:
                continue
            step = _swap_step(monos, j, structure)
            if step is None:
                return False
            b.emit(step)
            _swap(monos, j)
    return True


def _align_search(b: _Builder, monos: list[Monomial], goal: Sequence[Monomial], structure: str,
                  max_states: int) -> bool:
    """Breadth-first search over adjacent swaps."""
    start, target = tuple(monos), tuple(goal)
    parent: dict[tuple, Optional[tuple]] = {start: None}
    queue = deque([start])
    while queue and target not in parent:
        cur = queue.popleft()
        for j in range(len(cur) - 1):
            if cur[j] == cur[j + 1] or _swap_step(cur, j, structure) is None:
                continue
            nxt = cur[:j] + (cur[j + 1], cur[j]) + cur[j + 2:]
            if nxt not in parent:
                parent[nxt] = (cur, j)
                if len(parent) > max_states:
                    return False
                queue.append(nxt)
    if target not in parent:
        return False
    moves = []
    node = target
    while parent[node] is not None:
        prev, j = parent[node]
        moves.append(j)
        node = prev
    cur_list = list(start)
    for j in reversed(moves):
        b.emit(_swap_step(cur_list, j, structure))
        _swap(cur_list, j)
    monos[:] = cur_list
    return True


def _normal_trace(t: Term, structure: str) -> tuple[_Builder, list[Monomial]]:
    b = _Builder(to_spine(t))
    _flatten(b)
    monos = _dominate(b, structure)
    return b, monos


def prove_equiv(e: Term, f: Term, structure: str = "s", max_states: int = 200_000) -> Derivation:
    """A derivation of ``e = f`` from the structure's axioms.

    Raises :class:`NotEquivalentError` when the decision procedure rejects the
    pair and :class:`ProofSearchError` when no derivation is found.
    """
    verdict = equiv(e, f, structure)
    if not verdict.equivalent:
        raise NotEquivalentError(f"terms are not equivalent in {structure} ({verdict.detail.check})")
    if to_spine(e) == to_spine(f):
        return Derivation(e, [], f, structure)
    be, me = _normal_trace(e, structure)
    bf, mf = _normal_trace(f, structure)
    if len(me) != len(mf):
        raise ProofSearchError("normal forms differ in length; no length-preserving derivation exists")
    saved_spine, saved_steps, saved = be.spine, list(be.steps), list(me)
    if not _align_greedy(be, me, mf, structure):
        be.spine, be.steps, me = saved_spine, saved_steps, saved
        if not _align_search(be, me, mf, structure, max_states):
            raise ProofSearchError(
                f"no derivation found between the normal forms {_seq_term(saved)} and {_seq_term(mf)}"
            )
    if be.spine != bf.spine:
        raise ProofSearchError("internal: aligned normal forms differ")
    steps = be.steps + [reverse_step(s) for s in reversed(bf.steps)]
    return Derivation(e, steps, f, structure)


# -- matching (used to generate random rewrites) ------------------------------------------


def _peel(s, k: int) -> Optional[tuple]:
    cur = s
    for layer in range(k):
        if isinstance(cur, str):
            return None
        inner = cur[1]
        if layer < k - 1:
            if len(inner) != 1:
                return None
            cur = inner[0]
    return inner


def _depth(s) -> int:
    k = 0
    while not isinstance(s, str):
        k += 1
        if len(s[1]) != 1:
            break
        s = s[1][0]
    return k


def _match(items, seq: tuple, pos: int, end: int, env: dict, params: dict,
           exact: bool) -> Iterator[tuple[dict, dict, int]]:
    """Match ``items`` against ``seq[pos:end]``; yields ``(env, params, stop)``.
    With ``exact`` the match must consume the whole range, otherwise any prefix."""
    if not items:
        if pos == end or not exact:
            yield env, params, pos
        return
    (e, body), rest = items[0], items[1:]
    if isinstance(e, int):
        choices = [e]
    elif e in params:
        choices = [params[e]]
    else:
        choices = list(range(0, (_depth(seq[pos]) if pos < end else 0) + 1))
    for k in choices:
        p2 = params if not isinstance(e, str) or e in params else {**params, e: k}
        if k == 0:
            if body is None:
                yield from _match(rest, seq, pos, end, env, p2, exact)
            elif not isinstance(body, str):
                yield from _match(tuple(body) + tuple(rest), seq, pos, end, env, p2, exact)
            elif body in env:
                b = env[body]
                if pos + len(b) <= end and seq[pos:pos + len(b)] == b:
                    yield from _match(rest, seq, pos + len(b), end, env, p2, exact)
            else:
                for stop in range(pos, end + 1):
                    yield from _match(rest, seq, stop, end, {**env, body: seq[pos:stop]}, p2, exact)
            continue
        if pos >= end:
            continue
        inner = _peel(seq[pos], k)
        if inner is None:
            continue
        if body is None:
            if not inner:
                yield from _match(rest, seq, pos + 1, end, env, p2, exact)
        elif isinstance(body, str):
            if body in env:
                if env[body] == inner:
                    yield from _match(rest, seq, pos + 1, end, env, p2, exact)
            else:
                yield from _match(rest, seq, pos + 1, end, {**env, body: inner}, p2, exact)
        else:
            for env2, p3, _ in _match(tuple(body), inner, 0, len(inner), env, p2, True):
                yield from _match(rest, seq, pos + 1, end, env2, p3, exact)


def _all_paths(spine: tuple, path: tuple = ()) -> Iterator[tuple[tuple, tuple]]:
    yield path, spine
    for i, s in enumerate(spine):
        if not isinstance(s, str):
            yield from _all_paths(s[1], path + (i,))


def match_instances(spine: tuple, axiom_id: str, direction: str, max_len: int = 8,
                    limit: int = 10_000, starts=None) -> Iterator[tuple[tuple, int, int, dict, dict]]:
    """Every ``(path, lo, hi, substitution spines, bound params)`` where the
    source side of the axiom matches a range of at most ``max_len`` summands.
    Parameters occurring only on the target side are left unbound.
    ``starts`` optionally fixes the ``(path, lo)`` positions to try, in order."""
    ax = get_axiom(axiom_id)
    src, _ = ax.side(direction)
    if starts is None:
        starts = [(path, lo) for path, seq in _all_paths(spine) for lo in range(len(seq) + 1)]
    count = 0
    for path, lo in starts:
        seq = _get(spine, path)
        end = min(len(seq), lo + max_len)
        for env, params, hi in _match(tuple(src), seq, lo, end, {}, {}, False):
            yield path, lo, hi, env, params
            count += 1
            if count >= limit:
                return


def positions(spine: tuple) -> list[tuple[tuple, int]]:
    """All ``(path, lo)`` insertion points of a spine."""
    return [(path, lo) for path, seq in _all_paths(spine) for lo in range(len(seq) + 1)]
