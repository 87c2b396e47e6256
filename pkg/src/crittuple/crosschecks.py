"""Cross-validation harnesses: constructive checks, decider agreement,
corpus generators.  Shared by the CLI crosscheck command and the
acceptance suite."""

from __future__ import annotations

import random
from itertools import combinations, combinations_with_replacement, product
from time import monotonic
from typing import Iterator, Optional

from .criticality import brute_force_critical, is_critical, is_critical_relative
from .errors import BudgetExceededError
from .formats import print_qbf
from .homs import find_hom
from .model import Atom, Clause, Digraph, Fact, QbfFormula, Query, Term, digraph
from .oracles import eval_qbf, graph_hom_oracle, qbf_sigma_extension
from .reductions import (
    graph_escape_map,
    graph_witness_map,
    qbf_escape_map,
    qbf_witness_map,
    reduce_graphhom,
    reduce_qbf,
)


def directed_cycle(n: int, prefix: str = "v") -> Digraph:
    nodes = [f"{prefix}{i}" for i in range(n)]
    return digraph([(nodes[i], nodes[(i + 1) % n]) for i in range(n)])


def enumerate_qbf_formulas(
    max_universals: int, max_existentials: int, max_clauses: int
) -> Iterator[QbfFormula]:
    """All normalized formulas up to the given sizes, one representative per
    literal-ordering class (clauses are sorted triples, formulas sorted
    clause sets)."""
    for nu in range(max_universals + 1):
        for nv in range(max_existentials + 1):
            universals = tuple(range(1, nu + 1))
            existentials = tuple(range(nu + 1, nu + nv + 1))
            lits = sorted(
                [(v, True) for v in universals + existentials]
                + [(v, False) for v in universals + existentials]
            )
            if not lits:
                continue
            clauses: list[Clause] = [
                tuple(c) for c in combinations_with_replacement(lits, 3)
            ]
            for m in range(1, max_clauses + 1):
                for combo in combinations(clauses, m):
                    phi = QbfFormula(universals, existentials, tuple(combo))
                    if phi.normalized:
                        yield phi


def qbf_constructive_check(phi: QbfFormula) -> dict:
    """Run the witness/escape constructions for every outer assignment.

    For each assignment of the universals: when a satisfying extension
    exists, the escape map must verify into the witness image minus tau
    (the map constructor raises otherwise); when none exists, exhaustive
    search on the witness image minus tau must come back absent.
    """
    out = reduce_qbf(phi)
    rest_failures = []
    forward = backward = 0
    for values in product((False, True), repeat=len(phi.universals)):
        sigma = dict(zip(phi.universals, values))
        h, inst = qbf_witness_map(out, sigma)
        ext = qbf_sigma_extension(phi, sigma)
        if ext is not None:
            sigma_full = dict(sigma)
            sigma_full.update(ext)
            qbf_escape_map(out, h, sigma_full)  # raises if it fails to verify
            forward += 1
        else:
            if find_hom(out.query, inst.without(out.tau), deterministic=False) is not None:
                rest_failures.append(
                    {"formula": print_qbf(phi), "sigma": {str(k): v for k, v in sigma.items()}}
                )
            backward += 1
    return {"forward": forward, "backward": backward, "failures": rest_failures}


def qbf_decider_agreement(phi: QbfFormula, **decider_kwargs) -> dict:
    """Full-decider check: relative criticality iff the formula is invalid."""
    out = reduce_qbf(phi)
    expected = not eval_qbf(phi).valid
    verdict = is_critical_relative(out.tau, out.query, out.g_index, **decider_kwargs)
    return {
        "formula": print_qbf(phi),
        "expected_critical": expected,
        "decided_critical": verdict.critical,
        "agree": verdict.critical == expected,
        "nodes": verdict.stats.nodes,
    }


def crosscheck_qbf(
    max_universals: int = 2,
    max_existentials: int = 1,
    max_clauses: int = 2,
    *,
    seed: int = 0,
    budget_seconds: float = 0.0,
    decider_max_universals: int = 1,
    decider_max_clauses: int = 1,
) -> dict:
    """Mandatory constructive checks over the exhaustive corpus, then
    full-decider agreement on the smaller corpus within the remaining
    budget.  The report is deterministic for a fixed seed."""
    deadline = monotonic() + budget_seconds if budget_seconds else 0.0
    formulas = list(
        enumerate_qbf_formulas(max_universals, max_existentials, max_clauses)
    )
    report = {
        "schema": 1,
        "kind": "qbf",
        "params": {
            "max_universals": max_universals,
            "max_existentials": max_existentials,
            "max_clauses": max_clauses,
        },
        "seed": seed,
        "formulas": len(formulas),
        "constructive": {"forward": 0, "backward": 0, "failures": []},
        "decider": {"checked": 0, "agreements": 0, "disagreements": []},
        "status": "ok",
    }
    for phi in formulas:
        if deadline and monotonic() > deadline:
            report["status"] = "budget-exhausted-in-constructive"
            return report
        r = qbf_constructive_check(phi)
        report["constructive"]["forward"] += r["forward"]
        report["constructive"]["backward"] += r["backward"]
        report["constructive"]["failures"].extend(r["failures"])
    small = [
        phi
        for phi in enumerate_qbf_formulas(
            decider_max_universals, max_existentials, decider_max_clauses
        )
    ]
    rng = random.Random(seed)
    rng.shuffle(small)
    for phi in small:
        if deadline and monotonic() > deadline:
            report["status"] = "decider-phase-truncated"
            break
        try:
            r = qbf_decider_agreement(phi)
        except BudgetExceededError:
            report["status"] = "decider-phase-truncated"
            break
        report["decider"]["checked"] += 1
        if r["agree"]:
            report["decider"]["agreements"] += 1
        else:
            report["decider"]["disagreements"].append(r)
    if report["constructive"]["failures"] or report["decider"]["disagreements"]:
        report["status"] = "disagreement"
    return report


def graph_constructive_check(out, hom: Optional[dict]) -> bool:
    """Witness/escape agreement for one reduction output.

    With a graph homomorphism at hand the escape map must verify (the
    constructor raises otherwise); without one, search on the witness image
    minus tau must be absent."""
    h, inst = graph_witness_map(out)
    if hom is not None:
        graph_escape_map(out, h, hom)
        return True
    return find_hom(out.query, inst.without(out.tau), deterministic=False) is None


def crosscheck_graphhom(
    max_cycle: int = 6,
    *,
    seed: int = 0,
    budget_seconds: float = 0.0,
    constructive_sum_limit: int = 7,
) -> dict:
    """Cycle grid: the reduction of C_n vs C_m is critical iff m does not
    divide n; constructive checks on the small pairs."""
    deadline = monotonic() + budget_seconds if budget_seconds else 0.0
    report = {
        "schema": 1,
        "kind": "graphhom",
        "params": {"max_cycle": max_cycle},
        "seed": seed,
        "pairs": 0,
        "agreements": 0,
        "disagreements": [],
        "constructive_checked": 0,
        "constructive_failures": [],
        "status": "ok",
    }
    for n in range(2, max_cycle + 1):
        for m in range(2, max_cycle + 1):
            if deadline and monotonic() > deadline:
                report["status"] = "budget-exhausted"
                return report
            out = reduce_graphhom(directed_cycle(n, "a"), directed_cycle(m, "b"))
            hom = graph_hom_oracle(out.g1, out.g2)
            expected = n % m != 0  # oracle-side: a hom C_n -> C_m exists iff m | n
            if (hom is None) != expected:
                report["disagreements"].append(
                    {"n": n, "m": m, "stage": "oracle-vs-divisibility"}
                )
            verdict = is_critical(out.tau, out.query)
            report["pairs"] += 1
            if verdict.critical == expected:
                report["agreements"] += 1
            else:
                report["disagreements"].append(
                    {"n": n, "m": m, "stage": "decider", "decided": verdict.critical}
                )
            if n + m <= constructive_sum_limit:
                report["constructive_checked"] += 1
                if not graph_constructive_check(out, hom):
                    report["constructive_failures"].append({"n": n, "m": m})
    if report["disagreements"] or report["constructive_failures"]:
        report["status"] = "disagreement"
    return report


def random_pair(rng: random.Random, max_atoms=3, max_vars=4, max_arity=3):
    """One seeded random (tau, query) pair within the given budgets."""
    preds = ["R", "S"]
    arities = {p: rng.randint(1, max_arity) for p in preds}
    var_pool = [f"x{i}" for i in range(1, max_vars + 1)]
    const_pool = ["0", "1"]
    atoms = []
    for _ in range(rng.randint(1, max_atoms)):
        p = rng.choice(preds)
        args = []
        for _ in range(arities[p]):
            if rng.random() < 0.15:
                args.append(Term(rng.choice(const_pool), False))
            else:
                args.append(Term(rng.choice(var_pool), True))
        atoms.append(Atom(p, tuple(args)))
    query = Query(atoms)
    used = sorted({a.predicate for a in query.atoms})
    if rng.random() < 0.1:
        tau_pred, tau_arity = "T", rng.randint(1, max_arity)
    else:
        tau_pred = rng.choice(used)
        tau_arity = arities[tau_pred]
    tau = Fact(
        tau_pred, tuple(rng.choice(["0", "1", "a"]) for _ in range(tau_arity))
    )
    return tau, query


def pair_corpus(seed: int, count: int, **limits) -> list[tuple[Fact, Query]]:
    rng = random.Random(seed)
    return [random_pair(rng, **limits) for _ in range(count)]


def agreement_run(pairs) -> dict:
    """is_critical vs brute force, the per-atom decomposition identity, and
    relative-implies-absolute, over a corpus of pairs."""
    report = {
        "pairs": len(pairs),
        "oracle_disagreements": [],
        "decomposition_failures": [],
        "relative_implication_failures": [],
    }
    for idx, (tau, query) in enumerate(pairs):
        dec = is_critical(tau, query)
        bf = brute_force_critical(tau, query)
        rel = [
            is_critical_relative(tau, query, g).critical
            for g in range(len(query.atoms))
        ]
        if dec.critical != bf:
            report["oracle_disagreements"].append(idx)
        if dec.critical != any(rel):
            report["decomposition_failures"].append(idx)
        if any(rel) and not dec.critical:
            report["relative_implication_failures"].append(idx)
    return report
