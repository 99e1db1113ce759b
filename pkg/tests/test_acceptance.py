"""Acceptance criteria 1-10.  Each test records one PASS/FAIL line, repeated in
the terminal summary.  Every bound used below is pinned as a module constant."""

from __future__ import annotations

import random
import time

from corpus import sequences, terms
from ordeq.axioms import SYSTEMS, instance_terms
from ordeq.cli import bench_decision
from ordeq.decide import equiv, equiv_by_pairs
from ordeq.normal_form import (
    Monomial,
    flatten_raw,
    hidden_right_of,
    nmd,
    nonhidden_right_of,
    normalize_ord,
    nvd,
    seq_from_text,
    seq_to_term,
)
from ordeq.oracle import (
    _candidate_assignments,
    axiom_check,
    count_hidden_by_eval,
    count_nonhidden_by_eval,
    find_witness,
    random_flat_term,
    random_rewrite,
    random_term,
    witness_family,
)
from ordeq.ordinal import OMEGA, ZERO, omega_power
from ordeq.proof import RewriteStep, prove_equiv, verify
from ordeq.terms import Var, eval_term, variables

# criterion 1
FUZZ_TRIALS = 1000
FUZZ_PARAM_BOUND = 5
FUZZ_TIME_LIMIT_S = 60.0
# criterion 4
EXHAUSTIVE_TIME_LIMIT_S = 600.0
WITNESS_SAMPLE = 3000
# criteria 5 and 6
CHAINS = 500
CHAIN_LENGTH = 10
# criteria 7 and 8
PAIRS = 1000
MAX_VARS = 5
MAX_MONOMIALS = 30
# criterion 9
LINEAR_SIZES = (10_000, 100_000, 1_000_000)
MAX_DECADE_RATIO = 13.0
# criterion 10
COUNTER_TERMS = 500

STRUCTURES = ("s", "ord")


def _system(structure: str) -> list[str]:
    ids = list(SYSTEMS[structure])
    if structure == "s":
        ids.append("c-domination")
    return ids


def test_criterion_1_axiom_soundness_fuzz(record) -> None:
    t0 = time.perf_counter()
    bad = []
    checked = 0
    for structure in STRUCTURES:
        for axiom_id in _system(structure):
            report = axiom_check(axiom_id, structure, FUZZ_TRIALS, seed=1, param_bound=FUZZ_PARAM_BOUND)
            checked += 1
            bad += [(axiom_id, structure, v) for v in report.violations]
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < FUZZ_TIME_LIMIT_S
    record(1, ok, f"{checked} axiom/structure checks x {FUZZ_TRIALS} trials, "
                  f"{len(bad)} violations, {elapsed:.1f}s (limit {FUZZ_TIME_LIMIT_S:.0f}s)")
    assert not bad, bad[:3]
    assert elapsed < FUZZ_TIME_LIMIT_S


def test_criterion_2_left_domination_refuted_over_all_ordinals(record) -> None:
    report = axiom_check("left-domination", "ord", FUZZ_TRIALS, seed=1)
    lhs, rhs = instance_terms("left-domination", {"x": Var("x"), "y": Var("y")}, {})
    phi = {"x": omega_power(OMEGA), "y": ZERO}
    a, b = eval_term(lhs, phi), eval_term(rhs, phi)
    exact = a == omega_power(OMEGA, 2) and b == omega_power(OMEGA)
    ok = bool(report.violations) and exact
    record(2, ok, f"fuzzer found {len(report.violations)} violations; x=w^w, y=0 gives {a} vs {b}")
    assert report.violations
    assert a == omega_power(OMEGA, 2)
    assert b == omega_power(OMEGA)


def test_criterion_3_worked_example_blocks(record) -> None:
    seq = normalize_ord(seq_from_text("z + w x + x + y + w y + w x + y + w x + y + x"))
    hidden = [i for i, h in enumerate(seq.hidden) if h]
    expected_hidden = [2, 3]  # leftmost x and leftmost y
    nmd_blocks = [[str(m) for m in b] for b in nmd(seq).blocks()]
    nvd_blocks = [[str(m) for m in b] for b in nvd(seq).blocks()]
    expected_nmd = [["z"], ["w x", "x", "y", "w y"], ["w x", "y", "w x"], ["y"], ["x"]]
    expected_nvd = [["z"], ["w x", "x", "y", "w y", "w x", "y", "w x", "y"], ["x"]]
    ok = hidden == expected_hidden and nmd_blocks == expected_nmd and nvd_blocks == expected_nvd
    record(3, ok, f"hidden at {hidden}; NMD {nmd(seq).render()}; NVD {nvd(seq).render()}")
    assert seq.monos[2] == Monomial("x", 0) and seq.monos[3] == Monomial("y", 0)
    assert hidden == expected_hidden
    assert nmd_blocks == expected_nmd
    assert nvd_blocks == expected_nvd


def test_criterion_4_exhaustive_cross_validation(record) -> None:
    t0 = time.perf_counter()
    seqs, ts = sequences(), terms()
    top = [max((m.exp for m in s), default=0) for s in seqs]
    bounds = sorted({2 + e for e in top})
    summary = []
    failures = []
    for structure in STRUCTURES:
        # value vectors over the family searched for each exponent bound; two
        # terms are separated by a family exactly when their vectors differ
        vectors = {}
        for bound in bounds:
            family = witness_family(structure, bound)
            assignments = list(_candidate_assignments(["x", "y"], family.values, 10 ** 9))
            vectors[bound] = [tuple(eval_term(t, a) for a in assignments) for t in ts]
        full = vectors[max(bounds)]
        eq = neq = 0
        for i in range(len(ts)):
            for j in range(i, len(ts)):
                decided = equiv(ts[i], ts[j], structure).equivalent
                searched = vectors[2 + max(top[i], top[j])]
                if decided == (searched[i] != searched[j]):
                    failures.append((structure, seqs[i], seqs[j], decided))
                if decided and full[i] != full[j]:
                    failures.append((structure, seqs[i], seqs[j], "unequal on full family"))
                eq += decided
                neq += not decided
        # the search itself, on a seeded sample, must match the vectors
        rng = random.Random(f"witness-sample/{structure}")
        for _ in range(WITNESS_SAMPLE):
            i, j = rng.randrange(len(ts)), rng.randrange(len(ts))
            searched = vectors[2 + max(top[i], top[j])]
            w = find_witness(ts[i], ts[j], structure)
            if (w is not None) != (searched[i] != searched[j]):
                failures.append((structure, seqs[i], seqs[j], "search"))
            if w is not None and eval_term(ts[i], w) == eval_term(ts[j], w):
                failures.append((structure, seqs[i], seqs[j], "bogus witness"))
        summary.append(f"{structure}: {eq} equivalent / {neq} inequivalent pairs")
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < EXHAUSTIVE_TIME_LIMIT_S
    record(4, ok, f"{len(seqs)} terms; {'; '.join(summary)}; {len(failures)} disagreements; "
                  f"{elapsed:.0f}s (limit {EXHAUSTIVE_TIME_LIMIT_S:.0f}s)")
    assert not failures, failures[:5]
    assert elapsed < EXHAUSTIVE_TIME_LIMIT_S


def _chains(structure: str):
    for i in range(CHAINS):
        rng = random.Random(f"chain/{structure}/{i}")
        start = random_term(rng, rng.randint(3, 9), rng.randint(1, 3))
        chain = [start]
        for _ in range(CHAIN_LENGTH):
            chain.append(random_rewrite(chain[-1], structure, rng)[0])
        yield chain


def test_criterion_5_rewrite_closure(record) -> None:
    failures = 0
    checked = 0
    for structure in STRUCTURES:
        for chain in _chains(structure):
            for t in chain[1:]:
                checked += 1
                failures += not equiv(chain[0], t, structure).equivalent
    record(5, failures == 0, f"{checked} chain elements over {CHAINS} chains x {CHAIN_LENGTH} "
                             f"rewrites per structure, {failures} failures")
    assert failures == 0


def _tamper(step: RewriteStep) -> RewriteStep:
    # move the start of the range: the slice length no longer fits the instance
    return RewriteStep(step.axiom_id, step.direction, step.path, step.lo + 1, step.hi,
                       dict(step.substitution), dict(step.params))


def test_criterion_6_proof_round_trip_and_tampering(record) -> None:
    proved = failed = tamper_missed = steps = 0
    for structure in STRUCTURES:
        for chain in _chains(structure):
            try:
                d = prove_equiv(chain[0], chain[-1], structure)
            except Exception:
                failed += 1
                continue
            if not verify(d):
                failed += 1
                continue
            proved += 1
            for k in range(len(d.steps)):
                steps += 1
                bad = list(d.steps)
                bad[k] = _tamper(bad[k])
                d.steps, saved = bad, d.steps
                res = verify(d)
                d.steps = saved
                if res or res.step != k + 1:
                    tamper_missed += 1
    ok = failed == 0 and tamper_missed == 0
    record(6, ok, f"{proved} derivations verified, {failed} failed; {steps} single-step tamperings, "
                  f"{tamper_missed} undetected")
    assert failed == 0
    assert tamper_missed == 0


def _pair_corpus():
    """Seeded pairs: independent terms, rewrite-chain pairs in each structure,
    and chain pairs with one monomial perturbed.  Draws exceeding the monomial
    bound are skipped."""
    out = []
    i = 0
    while len(out) < PAIRS:
        rng = random.Random(f"pairs/{i}")
        kind = i % 4
        i += 1
        nvars = rng.randint(1, MAX_VARS)
        e = random_flat_term(rng, rng.randint(1, 20), nvars, 3) if i % 2 else \
            random_term(rng, rng.randint(1, 20), nvars)
        if kind == 0:
            f = random_term(rng, rng.randint(1, 20), nvars)
        else:
            f = e
            structure = "ord" if kind == 1 else "s"
            for _ in range(rng.randint(1, 4)):
                f = random_rewrite(f, structure, rng)[0]
            if kind == 3:
                mono = list(flatten_raw(f).monos)
                if mono:
                    k = rng.randrange(len(mono))
                    mono[k] = Monomial(rng.choice(variables(f)), rng.randint(0, 3))
                    f = seq_to_term(mono)
        if len(flatten_raw(e)) <= MAX_MONOMIALS and len(flatten_raw(f)) <= MAX_MONOMIALS:
            out.append((e, f))
    return out


def test_criterion_7_pairwise_restrictions(record) -> None:
    pairs = _pair_corpus()
    disagreements = 0
    equivalent = {"s": 0, "ord": 0}
    for e, f in pairs:
        for structure in STRUCTURES:
            direct = equiv(e, f, structure).equivalent
            equivalent[structure] += direct
            disagreements += direct != equiv_by_pairs(e, f, structure).equivalent
    record(7, disagreements == 0 and len(pairs) == PAIRS,
           f"{len(pairs)} pairs (s: {equivalent['s']} equivalent, ord: {equivalent['ord']} equivalent), "
           f"{disagreements} disagreements")
    assert len(pairs) == PAIRS
    assert disagreements == 0


def test_criterion_8_monotonicity(record) -> None:
    pairs = _pair_corpus()
    ord_equivalent = violations = 0
    for e, f in pairs:
        if equiv(e, f, "ord").equivalent:
            ord_equivalent += 1
            violations += not equiv(e, f, "s").equivalent
    record(8, violations == 0, f"{ord_equivalent} of {len(pairs)} pairs equivalent in ord, "
                               f"{violations} not equivalent in s")
    assert ord_equivalent > 0
    assert violations == 0


def test_criterion_9_linear_time(record) -> None:
    worst = 0.0
    lines = []
    for structure in STRUCTURES:
        rows = bench_decision(LINEAR_SIZES, structure, seed=9, repeat=3)
        ratios = [r["ratio"] for r in rows[1:]]
        worst = max(worst, *ratios)
        lines.append(f"{structure}: " + ", ".join(f"{r['size']}:{r['seconds']:.3f}s" for r in rows)
                     + " ratios " + "/".join(f"{x:.1f}" for x in ratios))
    ok = worst <= MAX_DECADE_RATIO
    record(9, ok, f"{'; '.join(lines)}; worst per-decade ratio {worst:.1f} (limit {MAX_DECADE_RATIO})")
    assert worst <= MAX_DECADE_RATIO


def test_criterion_10_oracle_counters(record) -> None:
    mismatches = checks = 0
    for i in range(COUNTER_TERMS):
        rng = random.Random(f"counters/{i}")
        seq = normalize_ord(flatten_raw(random_term(rng, rng.randint(1, 14), rng.randint(1, 4))))
        names = seq.variables()
        for a in names:
            for b in [None] + [n for n in names if n != a]:
                checks += 1
                mismatches += count_nonhidden_by_eval(seq, a, b) != nonhidden_right_of(seq, a, b)
                mismatches += count_hidden_by_eval(seq, a, b) != hidden_right_of(seq, a, b)
    record(10, mismatches == 0, f"{COUNTER_TERMS} pseudo-flat terms, {checks} (i, j) pairs, "
                                f"{mismatches} mismatches")
    assert mismatches == 0
