"""Command-line interface: ``ordeq <subcommand> ...``.

Exit codes: 0 equivalent / success, 1 inequivalent / violation found,
2 parse or usage error, 3 internal error.
"""

from __future__ import annotations

import argparse
import gc
import json
import random
import sys
import time
from typing import Optional, Sequence

from . import __version__
from .axioms import SYSTEM_REVISION, SYSTEMS
from .decide import equiv
from .normal_form import flatten_raw, normalize, nmd, nvd, restrict, seq_to_term
from .oracle import (
    axiom_check,
    find_witness,
    random_flat_term,
    random_rewrite,
    random_term,
    random_assignment,
)
from .ordinal import OrdinalParseError
from .proof import NotEquivalentError, ProofSearchError, prove_equiv, verify
from .terms import (
    TermParseError,
    UnboundVariableError,
    eval_term,
    parse_assignment,
    parse_term,
    print_assignment,
    variables,
)

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _read_inputs(arg: str) -> list[str]:
    """A literal term, or ``@path`` naming a UTF-8 file with one term per line."""
    if arg.startswith("@"):
        try:
            with open(arg[1:], encoding="utf-8") as fh:
                return [line.strip() for line in fh if line.strip()]
        except OSError as exc:
            raise UsageError(f"cannot read {arg[1:]}: {exc.strerror}") from None
    return [arg]


def _emit(args, human: str, payload) -> None:
    if args.json:
        print(json.dumps(payload))
    else:
        print(human)


# -- check ------------------------------------------------------------------------


def cmd_check(args) -> int:
    lefts, rights = _read_inputs(args.left), _read_inputs(args.right)
    if len(lefts) != len(rights):
        raise UsageError(f"batch sizes differ: {len(lefts)} vs {len(rights)} terms")
    code = EXIT_OK
    for lt, rt in zip(lefts, rights):
        e, f = parse_term(lt), parse_term(rt)
        verdict = equiv(e, f, args.structure)
        report = verdict.to_json()
        lines = [f"{'equivalent' if verdict.equivalent else 'inequivalent'} in {args.structure}"]
        if verdict.detail is not None:
            detail = verdict.detail
            where = f" at block {detail.block}" if detail.block is not None else ""
            lines[0] += f" ({detail.check}{where})"
        if not verdict.equivalent:
            code = EXIT_NO
            if args.witness:
                phi = find_witness(e, f, args.structure)
                if phi is None:
                    report["witness"] = None
                    lines.append("witness: none found in the bounded family")
                else:
                    a, b = eval_term(e, phi), eval_term(f, phi)
                    report["witness"] = {k: str(v) for k, v in phi.items()}
                    report["values"] = [str(a), str(b)]
                    lines.append(f"witness: {print_assignment(phi)}")
                    lines.append(f"values: {a} vs {b}")
        elif args.prove:
            try:
                d = prove_equiv(e, f, args.structure)
            except ProofSearchError as exc:
                print(f"error: {exc}", file=sys.stderr)
                return EXIT_INTERNAL
            result = verify(d, strict=args.strict)
            if not result:
                print(f"error: derivation failed to verify at step {result.step}: {result.reason}",
                      file=sys.stderr)
                return EXIT_INTERNAL
            report["derivation"] = d.to_json()
            lines.append(d.render())
            lines.append(f"verified: {len(d.steps)} steps")
        _emit(args, "\n".join(lines), report)
    return code


# -- normalize / eval / restrict ------------------------------------------------------


def _normal_seq(text: str, structure: str):
    seq = flatten_raw(parse_term(text))
    return seq if structure == "raw" else normalize(seq, structure)


def cmd_normalize(args) -> int:
    for text in _read_inputs(args.term):
        seq = _normal_seq(text, args.structure)
        if args.blocks == "none":
            rendered = seq.render()
        else:
            rendered = (nmd(seq) if args.blocks == "nmd" else nvd(seq)).render()
        payload = {
            "structure": args.structure,
            "monomials": [{"var": m.var, "exp": m.exp, "hidden": h} for m, h in zip(seq.monos, seq.hidden)],
            "text": rendered,
        }
        if args.blocks != "none":
            d = nmd(seq) if args.blocks == "nmd" else nvd(seq)
            payload["blocks"] = [[lo, hi] for lo, hi in d.bounds]
        _emit(args, rendered, payload)
    return EXIT_OK


def cmd_eval(args) -> int:
    phi = parse_assignment(args.assign or "")
    for text in _read_inputs(args.term):
        t = parse_term(text)
        missing = [v for v in variables(t) if v not in phi]
        if missing:
            raise UsageError(f"no value given for {', '.join(missing)}")
        value = eval_term(t, phi)
        _emit(args, str(value), {"term": text, "value": str(value)})
    return EXIT_OK


def cmd_restrict(args) -> int:
    keep = [v.strip() for v in args.vars.split(",") if v.strip()]
    if not keep:
        raise UsageError("--vars needs at least one variable")
    for text in _read_inputs(args.term):
        seq = _normal_seq(text, args.structure)
        try:
            sub = restrict(seq, keep)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
        rendered = seq_to_term(sub.monos) if args.structure == "raw" else sub.render()
        _emit(args, str(rendered), {"structure": args.structure, "vars": keep, "text": str(rendered)})
    return EXIT_OK


# -- fuzz -------------------------------------------------------------------------------


def cmd_fuzz(args) -> int:
    ids = [args.axiom] if args.axiom else list(SYSTEMS[args.structure])
    if args.structure == "s" and not args.axiom:
        ids.append("c-domination")
    violations = []
    reports = []
    for axiom_id in ids:
        try:
            rep = axiom_check(axiom_id, args.structure, args.iters, args.seed)
        except KeyError as exc:
            raise UsageError(exc.args[0]) from None
        reports.append({"axiom_id": axiom_id, "trials": rep.trials, "violations": len(rep.violations)})
        for v in rep.violations:
            violations.append({"axiom_id": axiom_id, **v.to_json()})
    # rewrite fuzz: random rewrites must keep both the value and the verdict
    rng = random.Random(f"rewrites/{args.structure}/{args.seed}")
    rewrite_failures = 0
    if not args.axiom:
        for i in range(args.iters):
            t = random_term(rng, args.size, rng.randint(1, 3))
            t2, axiom_id = random_rewrite(t, args.structure, rng)
            phi = random_assignment(rng, sorted(set(variables(t)) | set(variables(t2))), args.structure)
            a, b = eval_term(t, phi), eval_term(t2, phi)
            if a != b or not equiv(t, t2, args.structure):
                rewrite_failures += 1
                violations.append({"axiom_id": axiom_id, "trial": i, "term": str(t), "rewritten": str(t2),
                                   "assignment": {k: str(v) for k, v in phi.items()},
                                   "lhs": str(a), "rhs": str(b)})
    payload = {"structure": args.structure, "seed": args.seed, "axioms": reports,
               "rewrites": 0 if args.axiom else args.iters, "violations": violations}
    lines = [f"{r['axiom_id']}: {r['trials']} trials, {r['violations']} violations" for r in reports]
    if not args.axiom:
        lines.append(f"random rewrites: {args.iters} trials, {rewrite_failures} failures")
    for v in violations[:10]:
        lines.append(f"violation {v['axiom_id']}: {v.get('assignment')} -> {v['lhs']} vs {v['rhs']}")
    _emit(args, "\n".join(lines), payload)
    return EXIT_NO if violations else EXIT_OK


# -- bench ------------------------------------------------------------------------------

DEFAULT_SIZES = [15625 * 2 ** k for k in range(7)]


def bench_decision(sizes: Sequence[int], structure: str, seed: int, repeat: int = 3,
                   var_count: int = 8, max_exp: int = 3) -> list[dict]:
    """Time the decision on pairs of equal flat terms of each size (best of ``repeat``)."""
    rows = []
    for n in sizes:
        e = random_flat_term(random.Random(f"{seed}/{n}"), n, var_count, max_exp)
        f = random_flat_term(random.Random(f"{seed}/{n}"), n, var_count, max_exp)
        best = None
        for _ in range(repeat):
            # same convention as timeit: no cyclic collection inside the timed region
            gc_was_enabled = gc.isenabled()
            gc.disable()
            try:
                t0 = time.perf_counter()
                verdict = equiv(e, f, structure)
                elapsed = time.perf_counter() - t0
            finally:
                if gc_was_enabled:
                    gc.enable()
            best = elapsed if best is None else min(best, elapsed)
        if not verdict.equivalent:
            raise RuntimeError("benchmark pair unexpectedly inequivalent")
        rows.append({"size": n, "seconds": best})
    for prev, row in zip(rows, rows[1:]):
        row["ratio"] = row["seconds"] / prev["seconds"] if prev["seconds"] else None
    return rows


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",")] if args.sizes else DEFAULT_SIZES
    if any(s <= 0 for s in sizes):
        raise UsageError("sizes must be positive")
    rows = bench_decision(sizes, args.structure, args.seed, args.repeat)
    ratios = [r["ratio"] for r in rows[1:] if r.get("ratio")]
    summary = {"min_ratio": min(ratios), "max_ratio": max(ratios)} if ratios else {}
    lines = [f"{'monomials':>10}  {'seconds':>10}  {'ratio':>6}"]
    for r in rows:
        ratio = f"{r['ratio']:.2f}" if r.get("ratio") else "-"
        lines.append(f"{r['size']:>10}  {r['seconds']:>10.4f}  {ratio:>6}")
    if summary:
        lines.append(f"ratio per step: min {summary['min_ratio']:.2f}, max {summary['max_ratio']:.2f}")
    _emit(args, "\n".join(lines), {"structure": args.structure, "rows": rows, "summary": summary})
    return EXIT_OK


# -- entry point ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ordeq",
        description="Decide equivalence of terms over {0, +, x -> w x} below w^w (s) or over all ordinals (ord).",
    )
    parser.add_argument("--version", action="version",
                        version=f"ordeq {__version__} (axioms {SYSTEM_REVISION})")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, structures=("s", "ord")):
        p.add_argument("--structure", choices=structures, default="s")
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("check", help="decide whether two terms are equivalent")
    p.add_argument("left", help="term or @file")
    p.add_argument("right", help="term or @file")
    common(p)
    p.add_argument("--witness", action="store_true", help="print a distinguishing assignment")
    p.add_argument("--prove", action="store_true", help="print a verified derivation")
    p.add_argument("--strict", action="store_true", help="verify with c-domination expanded")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("normalize", help="print a normal form, optionally with blocks")
    p.add_argument("term")
    common(p, ("raw", "s", "ord"))
    p.add_argument("--blocks", choices=("none", "nmd", "nvd"), default="none")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("eval", help="evaluate a term under an assignment")
    p.add_argument("term")
    p.add_argument("--assign", default="", help="e.g. x=w^2*3+1,y=0")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("restrict", help="restrict a normal form to some variables")
    p.add_argument("term")
    p.add_argument("--vars", required=True, help="comma-separated variable names")
    common(p, ("raw", "s", "ord"))
    p.set_defaults(func=cmd_restrict)

    p = sub.add_parser("fuzz", help="check axiom soundness on random assignments")
    common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--size", type=int, default=8, help="leaves of the random terms for rewrite fuzzing")
    p.add_argument("--axiom", help="check a single axiom (also those outside the system)")
    p.set_defaults(func=cmd_fuzz)

    p = sub.add_parser("bench", help="time the decision on large flat terms")
    common(p)
    p.add_argument("--sizes", help="comma-separated monomial counts")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeat", type=int, default=3)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (TermParseError, OrdinalParseError, UnboundVariableError, UsageError) as exc:
        msg = exc.args[0] if isinstance(exc, (UsageError, UnboundVariableError)) else str(exc)
        if isinstance(exc, UnboundVariableError):
            msg = f"no value given for {msg}"
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_USAGE
    except (NotEquivalentError, ProofSearchError, RuntimeError, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
