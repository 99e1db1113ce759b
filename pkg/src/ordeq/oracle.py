"""Semantic machinery that is independent of the decision procedures.

Everything here works by evaluating terms on concrete ordinals: bounded
witness families, counterexample search, evaluation-based occurrence
counters, axiom soundness fuzzing, and random term / rewrite generation.
"""

from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .axioms import get_axiom, instance_terms
from .normal_form import Monomial, MonomialSeq, seq_to_term
from .ordinal import (
    OMEGA,
    ONE,
    ZERO,
    Ordinal,
    length,
    nat,
    omega_power,
    ord_add,
    split_at,
)
from .proof import RewriteStep, apply_step, from_spine, match_instances, positions, to_spine
from .terms import OmegaMul, Sum, Term, Var, Zero, ZERO_TERM, eval_term, variables

log = logging.getLogger(__name__)

__all__ = [
    "TestFamily",
    "witness_family",
    "find_witness",
    "count_nonhidden_by_eval",
    "count_hidden_by_eval",
    "random_ordinal_s",
    "random_ordinal_ord",
    "random_assignment",
    "max_exponent",
    "Violation",
    "AxiomReport",
    "axiom_check",
    "random_term",
    "random_flat_term",
    "random_rewrite",
    "random_sound_rewrite",
    "rewrite_chain",
]


def max_exponent(*terms: Term) -> int:
    """Largest number of nested ``w`` above any variable."""
    best = 0
    for t in terms:
        stack = [(t, 0)]
        while stack:
            node, k = stack.pop()
            if isinstance(node, OmegaMul):
                stack.append((node.inner, k + 1))
            elif isinstance(node, Sum):
                stack.append((node.left, k))
                stack.append((node.right, k))
            elif isinstance(node, Var):
                best = max(best, k)
    return best


@dataclass(frozen=True)
class TestFamily:
    structure: str
    bound: int
    values: tuple[Ordinal, ...] = field(default=())

    __test__ = False  # not a pytest class


def witness_family(structure: str, bound: int) -> TestFamily:
    """Values ``0, 1, 2, w^a, w^a*2`` for ``a <= bound``; over all ordinals also
    ``w^w, w^w + 1, w^(w+1)``."""
    vals = [ZERO, ONE, nat(2)]
    for a in range(1, bound + 1):
        vals.append(omega_power(a))
        vals.append(omega_power(a, 2))
    if structure == "ord":
        w_w = omega_power(OMEGA)
        vals += [w_w, ord_add(w_w, ONE), omega_power(ord_add(OMEGA, ONE))]
    elif structure != "s":
        raise ValueError(f"unknown structure {structure!r}")
    return TestFamily(structure, bound, tuple(vals))


def _candidate_assignments(names: Sequence[str], values: Sequence[Ordinal], budget: int) -> Iterator[dict]:
    nonzero = [v for v in values if v]
    n = len(names)
    seen = 0
    # at most two non-zero variables first
    for k in (1, 2):
        for chosen in itertools.combinations(range(n), k):
            for vals in itertools.product(nonzero, repeat=k):
                a = dict.fromkeys(names, ZERO)
                for idx, v in zip(chosen, vals):
                    a[names[idx]] = v
                seen += 1
                yield a
    if n <= 2:
        return
    for vals in itertools.product(values, repeat=n):
        if sum(1 for v in vals if v) <= 2:
            continue
        if seen >= budget:
            return
        seen += 1
        yield dict(zip(names, vals))


def find_witness(
    e: Term,
    f: Term,
    structure: str = "s",
    family: Optional[TestFamily] = None,
    budget: int = 200_000,
) -> Optional[dict[str, Ordinal]]:
    """Search the bounded family for an assignment separating ``e`` and ``f``."""
    if family is None:
        family = witness_family(structure, 2 + max_exponent(e, f))
    names = list(dict.fromkeys(variables(e) + variables(f)))
    if not names:
        return None
    for a in _candidate_assignments(names, family.values, budget):
        if eval_term(e, a) != eval_term(f, a):
            return a
    return None


def _single_var_term(seq: MonomialSeq) -> Term:
    return seq_to_term(seq.monos)


def count_nonhidden_by_eval(seq: MonomialSeq, i: str, j: Optional[str], a: Optional[int] = None) -> int:
    """Non-hidden ``i``-monomials right of the last ``j``-monomial, read off
    ``phi(x_i) = 1, phi(x_j) = w^a``: the part of the value below ``w^a``
    has length equal to that count."""
    i_exps = [m.exp for m in seq.monos if m.var == i]
    if a is None:
        a = max(i_exps, default=0) + 1
    if i_exps and a <= max(i_exps):
        raise ValueError(f"a={a} must exceed every exponent of {i}-monomials")
    if j == i:
        raise ValueError("i and j must be distinct variables")
    phi = {v: ZERO for v in seq.variables()}
    phi[i] = ONE
    if j is not None:
        phi[j] = omega_power(a)
    value = eval_term(_single_var_term(seq), phi)
    _, low = split_at(value, a)
    return length(low)


def count_hidden_by_eval(seq: MonomialSeq, i: str, j: Optional[str]) -> int:
    """Hidden ``i``-occurrences right of the last ``j``-monomial, from
    ``phi(x_i) = w^w, phi(x_j) = w^(w+1)``: the value is ``w^(w+1) c + w^w d``
    and the count is ``d`` minus the non-hidden count."""
    if j == i:
        raise ValueError("i and j must be distinct variables")
    phi = {v: ZERO for v in seq.variables()}
    phi[i] = omega_power(OMEGA)
    if j is not None:
        phi[j] = omega_power(ord_add(OMEGA, ONE))
    value = eval_term(_single_var_term(seq), phi)
    d = 0
    for exp, coeff in value.terms:
        if exp == OMEGA:
            d = coeff
    return d - count_nonhidden_by_eval(seq, i, j)


# -- random ordinals -------------------------------------------------------


def random_ordinal_s(rng: random.Random, max_degree: int = 6, max_coeff: int = 9, zero_prob: float = 0.15) -> Ordinal:
    """A random ordinal below ``w^w`` with bounded degree and coefficients."""
    if rng.random() < zero_prob:
        return ZERO
    exps = sorted(rng.sample(range(max_degree + 1), rng.randint(1, min(3, max_degree + 1))), reverse=True)
    return Ordinal._make(tuple((nat(e), rng.randint(1, max_coeff)) for e in exps))


def _random_exponent_big(rng: random.Random) -> Ordinal:
    # exponents at or above w: w + k, w*2 + k, w^2, w^w, ...
    choices = [
        lambda: ord_add(OMEGA, nat(rng.randint(0, 3))),
        lambda: ord_add(omega_power(1, 2), nat(rng.randint(0, 2))),
        lambda: omega_power(2),
        lambda: ord_add(omega_power(2), OMEGA),
        lambda: omega_power(OMEGA),
    ]
    return rng.choice(choices)()


def random_ordinal_ord(rng: random.Random, max_degree: int = 6, max_coeff: int = 9) -> Ordinal:
    """Mixed sampling: half the time below ``w^w``, half the time at or above it."""
    if rng.random() < 0.5:
        return random_ordinal_s(rng, max_degree, max_coeff)
    exps = {_random_exponent_big(rng) for _ in range(rng.randint(1, 3))}
    big = Ordinal._make(tuple((e, rng.randint(1, max_coeff)) for e in sorted(exps, reverse=True)))
    tail = random_ordinal_s(rng, max_degree, max_coeff, zero_prob=0.5)
    return ord_add(big, tail)


def random_assignment(rng: random.Random, names: Sequence[str], structure: str) -> dict[str, Ordinal]:
    gen = random_ordinal_s if structure == "s" else random_ordinal_ord
    return {n: gen(rng) for n in names}


# -- axiom soundness fuzzing -------------------------------------------------------


@dataclass
class Violation:
    trial: int
    params: dict
    assignment: dict
    lhs: Ordinal
    rhs: Ordinal

    def to_json(self) -> dict:
        return {
            "trial": self.trial,
            "params": dict(self.params),
            "assignment": {k: str(v) for k, v in self.assignment.items()},
            "lhs": str(self.lhs),
            "rhs": str(self.rhs),
        }


@dataclass
class AxiomReport:
    axiom_id: str
    structure: str
    trials: int
    seed: int
    violations: list[Violation]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "axiom_id": self.axiom_id,
            "structure": self.structure,
            "trials": self.trials,
            "seed": self.seed,
            "violations": [v.to_json() for v in self.violations],
        }


def _sample_params(rng: random.Random, ax, bound: int = 5) -> dict:
    if not ax.params:
        return {}
    while True:
        params = {p: rng.randint(0, bound) for p in ax.params}
        if ax.holds_for(params):
            return params


def axiom_check(axiom_id: str, structure: str, trials: int = 1000, seed: int = 0,
                param_bound: int = 5) -> AxiomReport:
    """Evaluate both sides of an axiom on ``trials`` random assignments."""
    ax = get_axiom(axiom_id)
    rng = random.Random(f"{axiom_id}/{structure}/{seed}")
    names = ax.variables()
    generic = {v: Var(v) for v in names}
    violations = []
    for trial in range(trials):
        params = _sample_params(rng, ax, param_bound)
        lhs, rhs = instance_terms(axiom_id, generic, params)
        phi = random_assignment(rng, names, structure)
        a, b = eval_term(lhs, phi), eval_term(rhs, phi)
        if a != b:
            violations.append(Violation(trial, params, phi, a, b))
    return AxiomReport(axiom_id, structure, trials, seed, violations)


# -- random terms and rewrites ----------------------------------------------------

VAR_NAMES = ("x", "y", "z", "t", "u", "v", "s", "r")


def random_term(seed, size: int = 8, var_count: int = 2, omega_prob: float = 0.3,
                zero_prob: float = 0.05) -> Term:
    """A random term with ``size`` leaves over the first ``var_count`` names of
    :data:`VAR_NAMES` (``x1, x2, ...`` beyond those)."""
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    names = list(VAR_NAMES[:var_count]) + [f"x{i}" for i in range(len(VAR_NAMES), var_count)]
    if size <= 1:
        return ZERO_TERM if rng.random() < zero_prob else Var(rng.choice(names))
    # build bottom-up: a pool of subterms merged at random until one is left
    pool: list[Term] = []
    for _ in range(size):
        leaf: Term = ZERO_TERM if rng.random() < zero_prob else Var(rng.choice(names))
        while rng.random() < omega_prob:
            leaf = OmegaMul(leaf)
        pool.append(leaf)
    while len(pool) > 1:
        i = rng.randrange(len(pool) - 1)
        node: Term = Sum(pool[i], pool[i + 1])
        while rng.random() < omega_prob / 2:
            node = OmegaMul(node)
        pool[i:i + 2] = [node]
    return pool[0]


def random_flat_term(rng: random.Random, length: int, var_count: int, max_exp: int) -> Term:
    names = [VAR_NAMES[i] if i < len(VAR_NAMES) else f"x{i}" for i in range(var_count)]
    return seq_to_term(Monomial(rng.choice(names), rng.randint(0, max_exp)) for _ in range(length))


def _nodes_with_paths(t: Term) -> list[tuple[tuple, Term]]:
    out = []
    stack = [((), t)]
    while stack:
        path, node = stack.pop()
        out.append((path, node))
        for i, c in enumerate(node.children()):
            stack.append((path + (i,), c))
    return out


def _replace(t: Term, path: tuple, new: Term) -> Term:
    if not path:
        return new
    i = path[0]
    if isinstance(t, Sum):
        if i == 0:
            return Sum(_replace(t.left, path[1:], new), t.right)
        return Sum(t.left, _replace(t.right, path[1:], new))
    return OmegaMul(_replace(t.inner, path[1:], new))


def _term_level_rewrites(t: Term) -> list[tuple[str, tuple, Term]]:
    """Instances of the axioms invisible on spines (units, associativity, ``w 0``)."""
    out = []
    for path, node in _nodes_with_paths(t):
        out.append(("unit-right", path, Sum(node, ZERO_TERM)))
        out.append(("unit-left", path, Sum(ZERO_TERM, node)))
        if isinstance(node, Zero):
            out.append(("omega-zero", path, OmegaMul(ZERO_TERM)))
        if isinstance(node, OmegaMul) and isinstance(node.inner, Zero):
            out.append(("omega-zero", path, ZERO_TERM))
        if isinstance(node, Sum):
            if isinstance(node.right, Zero):
                out.append(("unit-right", path, node.left))
            if isinstance(node.left, Zero):
                out.append(("unit-left", path, node.right))
            if isinstance(node.right, Sum):
                r = node.right
                out.append(("assoc", path, Sum(Sum(node.left, r.left), r.right)))
            if isinstance(node.left, Sum):
                lft = node.left
                out.append(("assoc", path, Sum(lft.left, Sum(lft.right, node.right))))
    return out


_SPINE_AXIOMS = {
    "s": ("omega-distrib", "left-domination", "guarded-comm", "omega-zero", "c-domination"),
    "ord": ("omega-distrib", "guarded-comm", "omega-zero", "domination1", "hidden-old-1", "hidden-old-2"),
}


def random_rewrite(t: Term, structure: str, rng: random.Random, term_level_prob: float = 0.2,
                   max_len: int = 8) -> tuple[Term, str]:
    """Apply one random axiom instance of the structure's system somewhere in
    ``t``, in a random direction.  Returns the new term and the axiom id."""
    if structure not in _SPINE_AXIOMS:
        raise ValueError(f"unknown structure {structure!r}")
    if rng.random() < term_level_prob:
        axiom_id, path, new = rng.choice(_term_level_rewrites(t))
        return _replace(t, path, new), axiom_id
    spine = to_spine(t)
    starts = positions(spine)
    choices = [(a, d) for a in _SPINE_AXIOMS[structure] for d in ("ltr", "rtl")]
    rng.shuffle(choices)
    for axiom_id, direction in choices:
        ax = get_axiom(axiom_id)
        rng.shuffle(starts)
        found = []
        for path, lo, hi, env, params in match_instances(spine, axiom_id, direction, max_len,
                                                         limit=64, starts=starts):
            params = dict(params)
            for p in ax.params:
                if p not in params:
                    # parameters bound only by the target side
                    q = params.get("q", 0)
                    low = 1 if axiom_id == "domination1" else 0
                    if q <= low:
                        break
                    params[p] = rng.randrange(low, q)
            else:
                if not ax.holds_for(params):
                    continue
                step = RewriteStep(axiom_id, direction, path, lo, hi,
                                   {k: from_spine(env.get(k, ())) for k in ax.variables()}, params)
                src, tgt = step.sides()
                if src != tgt:
                    found.append(step)
        if found:
            step = rng.choice(found)
            return from_spine(apply_step(spine, step)), axiom_id
    axiom_id, path, new = rng.choice(_term_level_rewrites(t))
    return _replace(t, path, new), axiom_id


def random_sound_rewrite(t: Term, structure: str, seed) -> Term:
    """One random sound rewrite of ``t`` (see :func:`random_rewrite`)."""
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    return random_rewrite(t, structure, rng)[0]


def rewrite_chain(start: Term, structure: str, length: int, seed) -> list[Term]:
    rng = random.Random(seed)
    chain = [start]
    for _ in range(length):
        chain.append(random_rewrite(chain[-1], structure, rng)[0])
    return chain
