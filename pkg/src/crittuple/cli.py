"""Command-line front end.

Subcommands: check | reduce qbf | reduce graphhom | oracle qbf |
oracle graphhom | crosscheck | counterexample.

The verdict travels in JSON (schema 1), not in the exit code: exit 0 means
the run completed regardless of the decision.  Exit 1 is an input error,
exit 2 a resource limit or size guard, exit 3 an internal invariant
violation (a result failed its independent re-verification).
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone

from . import kernel
from .criticality import Verdict, is_critical, is_critical_relative
from .errors import (
    BudgetExceededError,
    CrittupleError,
    GuardError,
    InternalCheckError,
    ModelError,
    ParseError,
    PreconditionError,
)
from .formats import (
    parse_digraph,
    parse_qbf,
    parse_query,
    parse_tuple,
    print_query,
    print_tuple,
)
from .homs import find_hom, verify_hom
from .model import Fact, Instance, Query, instances_isomorphic
from .oracles import eval_qbf, graph_hom_oracle
from .reductions import counterexample_fixture, reduce_graphhom, reduce_qbf
from .crosschecks import crosscheck_graphhom, crosscheck_qbf

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_BUDGET = 2
EXIT_INTERNAL = 3


def _read(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror or exc}")


def _emit(obj: dict, args) -> None:
    if not getattr(args, "reproducible", False):
        obj.setdefault("timestamp", datetime.now(timezone.utc).isoformat())
    print(json.dumps(obj, indent=2, sort_keys=True))


def _witness_json(verdict: Verdict) -> dict | None:
    if not verdict.witness:
        return None
    _candidate, instance = verdict.witness
    return {
        "hom": dict(sorted(verdict.witness_hom.items())),
        "instance": [str(f) for f in instance.sorted_facts()],
    }


def _cli_verify_witness(tau: Fact, query: Query, verdict: Verdict) -> None:
    """Independent verify pass before any witness is printed."""
    if not verdict.critical:
        return
    hom = verdict.witness_hom
    _candidate, instance = verdict.witness
    if not verify_hom(hom, query, instance):
        raise InternalCheckError("emitted witness failed re-verification")
    if tau not in instance:
        raise InternalCheckError("emitted witness instance lacks the tuple")
    if find_hom(query, instance.without(tau), deterministic=False) is not None:
        raise InternalCheckError("emitted witness admits an escape homomorphism")


def _verdict_json(verdict: Verdict, args, relative_to=None) -> dict:
    out = {
        "schema": 1,
        "command": "check",
        "critical": verdict.critical,
        "reason": verdict.reason.value,
        "relative_to": relative_to,
        "via_atom": verdict.via_atom,
        "witness": _witness_json(verdict),
        "stats": verdict.stats.as_dict(
            include_seconds=not getattr(args, "reproducible", False)
        ),
        "kernel": kernel.backend_name(),
    }
    return out


def cmd_check(args) -> int:
    query = parse_query(_read(args.query))
    tau = parse_tuple(args.tuple)
    budget = dict(max_nodes=args.max_nodes, max_seconds=args.max_seconds)
    if args.atom_index is not None:
        if not 0 <= args.atom_index < len(query.atoms):
            raise ModelError(
                f"atom index {args.atom_index} out of range 0..{len(query.atoms) - 1}"
            )
        verdict = is_critical_relative(tau, query, args.atom_index, **budget)
        relative_to = args.atom_index
    else:
        # --parallel forces parallel atom evaluation; --no-deterministic
        # merely permits it (waiving the canonical-least witness).
        parallel = args.parallel or not args.deterministic
        verdict = is_critical(tau, query, parallel=parallel, **budget)
        relative_to = None
    _cli_verify_witness(tau, query, verdict)
    _emit(_verdict_json(verdict, args, relative_to), args)
    return EXIT_OK


def cmd_reduce(args) -> int:
    if args.kind == "qbf":
        phi = parse_qbf(_read(args.input))
        if not phi.normalized:
            raise PreconditionError(
                "formula is not normalized; every universal must occur with "
                "both polarities (see normalize_qbf)"
            )
        out = reduce_qbf(phi)
    else:
        g1 = parse_digraph(_read(args.g1))
        g2 = parse_digraph(_read(args.g2))
        out = reduce_graphhom(g1, g2)
    with open(args.out_query, "w", encoding="utf-8") as fh:
        fh.write(print_query(out.query))
    with open(args.out_tuple, "w", encoding="utf-8") as fh:
        fh.write(print_tuple(out.tau) + "\n")
    with open(args.out_registry, "w", encoding="utf-8") as fh:
        json.dump(out.registry, fh, indent=2, sort_keys=True)
        fh.write("\n")
    summary = {
        "schema": 1,
        "command": "reduce",
        "kind": args.kind,
        "atoms": len(out.query.atoms),
        "variables": len(out.query.variables()),
        "tuple": str(out.tau),
        "outputs": {
            "query": args.out_query,
            "tuple": args.out_tuple,
            "registry": args.out_registry,
        },
    }
    if args.kind == "qbf":
        summary["g_index"] = out.g_index
    _emit(summary, args)
    return EXIT_OK


def cmd_oracle(args) -> int:
    if args.kind == "qbf":
        phi = parse_qbf(_read(args.input))
        res = eval_qbf(phi)
        obj = {
            "schema": 1,
            "command": "oracle",
            "kind": "qbf",
            "valid": res.valid,
            "failing_sigma": (
                {str(k): v for k, v in sorted(res.failing.items())}
                if res.failing is not None
                else None
            ),
        }
        if args.extensions and res.extensions is not None:
            obj["extensions"] = {
                "".join("1" if b else "0" for b in key): {
                    str(k): v for k, v in sorted(ext.items())
                }
                for key, ext in res.extensions.items()
            }
    else:
        g1 = parse_digraph(_read(args.g1))
        g2 = parse_digraph(_read(args.g2))
        hom = graph_hom_oracle(g1, g2)
        obj = {
            "schema": 1,
            "command": "oracle",
            "kind": "graphhom",
            "exists": hom is not None,
            "hom": dict(sorted(hom.items())) if hom is not None else None,
        }
    _emit(obj, args)
    return EXIT_OK


def cmd_crosscheck(args) -> int:
    if args.kind == "qbf":
        report = crosscheck_qbf(
            args.max_universals,
            args.max_existentials,
            args.max_clauses,
            seed=args.seed,
            budget_seconds=args.budget_seconds,
        )
    else:
        report = crosscheck_graphhom(
            args.max_cycle, seed=args.seed, budget_seconds=args.budget_seconds
        )
    report["command"] = "crosscheck"
    _emit(report, args)
    if report["status"] == "budget-exhausted-in-constructive":
        return EXIT_BUDGET
    return EXIT_OK


def cmd_counterexample(args) -> int:
    query, tau, g1_index, g2_index = counterexample_fixture()
    rel_first = is_critical_relative(tau, query, g1_index)
    rel_second = is_critical_relative(tau, query, g2_index)
    absolute = is_critical(tau, query)
    expected_witness = Instance(
        [Fact("R", ("a", "b", "c", "c")), Fact("R", ("a", "a", "b", "b"))]
    )
    witness_ok = absolute.witness is not None and instances_isomorphic(
        absolute.witness[1], expected_witness, {"a", "b"}
    )
    ok = (
        rel_first.critical is False
        and rel_second.critical is True
        and absolute.critical is True
        and absolute.via_atom == g2_index
        and witness_ok
    )
    _cli_verify_witness(tau, query, absolute)
    obj = {
        "schema": 1,
        "command": "counterexample",
        "query": [str(a) for a in query.atoms],
        "tuple": str(tau),
        "verdicts": {
            "relative_to_first_atom": rel_first.critical,
            "relative_to_second_atom": rel_second.critical,
            "critical": absolute.critical,
            "via_atom": absolute.via_atom,
        },
        "witness_matches_expected": witness_ok,
        "ok": ok,
    }
    if args.json:
        obj["witness"] = _witness_json(absolute)
    _emit(obj, args)
    if not ok:
        print("counterexample verdicts deviate from the expected ones", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crittuple",
        description="Critical-tuple deciders, reductions, and oracles "
        "for Boolean conjunctive queries.",
    )
    parser.add_argument("--version", action="version", version="crittuple 0.1.0")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument(
            "--reproducible",
            action="store_true",
            help="suppress timestamps and timings for byte-identical output",
        )
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--max-nodes", type=int, default=0)
        p.add_argument("--max-seconds", type=float, default=0.0)
        p.add_argument(
            "--deterministic",
            action=argparse.BooleanOptionalAction,
            default=True,
            help="sequential evaluation with the canonically least witness "
            "(default); --no-deterministic permits schedule-dependent "
            "witness selection",
        )
        p.add_argument(
            "--parallel",
            action="store_true",
            help="evaluate atoms in parallel (verdict is schedule-independent)",
        )

    p = sub.add_parser("check", help="decide (relative) criticality")
    p.add_argument("query", help="query file")
    p.add_argument("tuple", help="tuple literal, e.g. 'R(a,a,b,b)'")
    p.add_argument("--atom-index", type=int, default=None)
    add_common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("reduce", help="generate a reduction instance")
    rsub = p.add_subparsers(dest="kind", required=True)
    rq = rsub.add_parser("qbf")
    rq.add_argument("input", help="QDIMACS-subset file")
    rg = rsub.add_parser("graphhom")
    rg.add_argument("g1", help="source graph file")
    rg.add_argument("g2", help="target graph file")
    for rp in (rq, rg):
        rp.add_argument("--out-query", default="reduction.query")
        rp.add_argument("--out-tuple", default="reduction.tuple")
        rp.add_argument("--out-registry", default="reduction.registry.json")
        add_common(rp)
        rp.set_defaults(func=cmd_reduce)

    p = sub.add_parser("oracle", help="brute-force ground truth")
    osub = p.add_subparsers(dest="kind", required=True)
    oq = osub.add_parser("qbf")
    oq.add_argument("input")
    oq.add_argument("--extensions", action="store_true")
    og = osub.add_parser("graphhom")
    og.add_argument("g1")
    og.add_argument("g2")
    for op in (oq, og):
        add_common(op)
        op.set_defaults(func=cmd_oracle)

    p = sub.add_parser("crosscheck", help="constructive and decider agreement runs")
    csub = p.add_subparsers(dest="kind", required=True)
    cq = csub.add_parser("qbf")
    cq.add_argument("--max-universals", type=int, default=2)
    cq.add_argument("--max-existentials", type=int, default=1)
    cq.add_argument("--max-clauses", type=int, default=2)
    cg = csub.add_parser("graphhom")
    cg.add_argument("--max-cycle", type=int, default=6)
    for cp in (cq, cg):
        cp.add_argument("--budget-seconds", type=float, default=0.0)
        add_common(cp)
        cp.set_defaults(func=cmd_crosscheck)

    p = sub.add_parser("counterexample", help="run the fixed separating example")
    add_common(p)
    p.set_defaults(func=cmd_counterexample)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ModelError, PreconditionError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (BudgetExceededError, GuardError) as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InternalCheckError as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except CrittupleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
