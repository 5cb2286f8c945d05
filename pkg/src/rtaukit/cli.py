"""Command-line front end.

Exit codes: 0 success, 2 parse error, 3 precondition violation,
4 search-cap exhaustion, 5 internal ledger violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from . import construct, rtau
from .construct import DiffTuple, check_S, diff_tuple
from .errors import NotInS, ParseError, RTauError
from .ntheory import vp
from .polyq import RTauElem, format_intpoly, parse_poly

__all__ = ["main", "parse_diffs", "parse_poly"]


def parse_diffs(text: str, strict: bool = False) -> list[DiffTuple]:
    """``"2;6,12"`` -> [(2,), (6, 12)]. With ``strict`` every tuple must lie in S."""
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            raise ParseError(f"empty difference tuple in {text!r}")
        try:
            values = [int(v) for v in chunk.split(",")]
        except ValueError as exc:
            raise ParseError(f"not a list of integers: {chunk!r}") from exc
        d = diff_tuple(values)
        if strict and not check_S(d):
            raise NotInS(f"{d} covers every residue class modulo some prime")
        out.append(d)
    return out


def _emit_state(state: rtau.TauState, out: str | None) -> None:
    if out:
        rtau.save(state, out)
        print(f"wrote {out}: {state.builder_kind}, stage {state.stage}, "
              f"{len(state.components)} components, {len(state.ledger)} ledger entries")
    else:
        sys.stdout.write(rtau.dumps(state))


def _cmd_build_sparse(args) -> None:
    _emit_state(construct.build_sparse(args.stages, args.seed), args.out)


def _cmd_build_main(args) -> None:
    diffs = parse_diffs(args.diffs, strict=True) if args.diffs else []
    _emit_state(construct.build_main(diffs, args.stages, args.seed), args.out)


def _cmd_build_justprimes(args) -> None:
    _emit_state(construct.build_justprimes(args.count, args.quota, args.bound), args.out)


def _cmd_build_exact(args) -> None:
    _emit_state(rtau.exact_state(args.value), args.out)


def _verdict_doc(label: str, v: rtau.Verdict) -> dict:
    doc = {"verdict": str(v.certainty), "valuations": {str(p): e for p, e in v.valuations.items()}}
    if v.promise is not None:
        doc["promise"] = {"coeffs": list(v.promise.f.coeffs), "n": v.promise.n, "stage": v.promise.stage}
    if v.note:
        doc["note"] = v.note
    return {label: doc}


def _cmd_certify(args) -> None:
    state = rtau.load(args.tau)
    f = parse_poly(args.poly)
    member = rtau.membership(f, state)
    prime = rtau.is_prime(f, member.state)
    if args.machine:
        doc = {"poly": str(f), **_verdict_doc("membership", member), **_verdict_doc("prime", prime)}
        print(json.dumps(doc, indent=1))
        return
    print(f"poly: {f}")
    print(f"membership: {member.certainty}")
    print(f"prime: {prime.certainty}")
    quiet = 0
    for p, e in sorted(prime.valuations.items()):
        if e == "0" and f.den % p:
            quiet += 1
            continue
        print(f"  v_{p}(num(tau_{p})) = {e}  (v_{p}(den) = {vp(f.den, p)})")
    if quiet:
        print(f"  unit at the remaining {quiet} defined primes")
    if prime.promise is not None:
        e = prime.promise
        print(f"  promise: ledger entry {e.normalized} from stage {e.stage} covers every undefined prime")
    if prime.note:
        print(f"  note: {prime.note}")


def _cmd_primes(args) -> None:
    state = rtau.load(args.tau)
    groups = state.progressions()
    singles = [e for e in state.ledger if e.progression is None]
    if args.machine:
        doc = {
            "progressions": [
                {"stage": g[0].stage, "diffs": list(g[0].progression.diffs),
                 "members": [str(e.normalized) for e in g]}
                for g in groups
            ],
        }
        if not args.progressions_only:
            doc["isolated"] = [{"stage": e.stage, "prime": str(e.normalized), "n": e.n} for e in singles]
        print(json.dumps(doc, indent=1))
        return
    for g in groups:
        members = ", ".join(str(e.normalized) for e in g)
        print(f"stage {g[0].stage} progression d={g[0].progression.diffs}: {members}")
    if not args.progressions_only:
        for e in singles:
            print(f"stage {e.stage} prime: {e.normalized}")


def _cmd_check_s(args) -> None:
    for d in parse_diffs(args.diffs):
        ok = check_S(d)
        if not ok:
            print(f"warning: {d} covers all residues modulo some prime", file=sys.stderr)
        label = ",".join(map(str, d))
        print(f"{label}: in S: {str(ok).lower()}")


def _cmd_sf(args) -> None:
    f = parse_poly(args.poly)
    primes = sorted(construct.sf_primes(f.num, args.limit))
    print(" ".join(map(str, primes)))


def _cmd_oracle_r0(args) -> None:
    f = parse_poly(args.poly)
    print(f"{f}: prime in R_0: {str(rtau.r0_prime_oracle(f)).lower()}")


def _cmd_show(args) -> None:
    state = rtau.load(args.tau)
    if args.machine:
        sys.stdout.write(rtau.dumps(state))
        return
    print(f"builder: {state.builder_kind}  seed: {state.seed}  stage: {state.stage}  s_m: {state.s_m}")
    if state.default is not None:
        print(f"undefined primes: Exact({state.default})")
    for p, c in sorted(state.components.items()):
        print(f"  tau_{p} = {c}")
    for e in state.ledger:
        tag = " [progression]" if e.progression else ""
        print(f"  stage {e.stage}: {format_intpoly(e.f)}  n={e.n}{tag}")
    if state.builder_kind in ("sparse", "main"):
        report = rtau.pid_report(state)
        print(f"pid report: {len(report.entries)} entries, no ledger violations")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rtau", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-sparse", help="build a tau with a sparse set of primes")
    p.add_argument("--stages", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_build_sparse)

    p = sub.add_parser("build-main", help="build a tau with prescribed prime progressions")
    p.add_argument("--diffs", default="", help='e.g. "2;6,12"')
    p.add_argument("--stages", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_build_main)

    p = sub.add_parser("build-justprimes", help="integer tau whose only primes are standard")
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--quota", type=int, default=2)
    p.add_argument("--bound", type=int, default=1000)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_build_justprimes)

    p = sub.add_parser("build-exact", help="tau with every coordinate equal to an integer")
    p.add_argument("--value", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_build_exact)

    p = sub.add_parser("certify", help="membership and primality of an element")
    p.add_argument("--tau", required=True)
    p.add_argument("--poly", required=True)
    p.add_argument("--machine", action="store_true")
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("primes", help="list the normalized primes fixed by the ledger")
    p.add_argument("--tau", required=True)
    p.add_argument("--progressions-only", action="store_true")
    p.add_argument("--machine", action="store_true")
    p.set_defaults(func=_cmd_primes)

    p = sub.add_parser("check-s", help="test difference tuples for membership in S")
    p.add_argument("--diffs", required=True)
    p.set_defaults(func=_cmd_check_s)

    p = sub.add_parser("sf", help="primes p <= limit where the polynomial has a root mod p")
    p.add_argument("--poly", required=True)
    p.add_argument("--limit", type=int, required=True)
    p.set_defaults(func=_cmd_sf)

    p = sub.add_parser("oracle-r0", help="closed-form primality in R_0")
    p.add_argument("--poly", required=True)
    p.set_defaults(func=_cmd_oracle_r0)

    p = sub.add_parser("show", help="print a serialized state")
    p.add_argument("--tau", required=True)
    p.add_argument("--machine", action="store_true")
    p.set_defaults(func=_cmd_show)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except RTauError as exc:
        print(f"error: {exc.category}: {exc}", file=sys.stderr)
        return exc.exit_code
    except BrokenPipeError:
        sys.stdout = None
        return 0
    except OSError as exc:
        print(f"error: PreconditionError: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
