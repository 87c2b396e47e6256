"""Hardness-reduction instance generators and their executable proof maps.

Two constructions are provided:

* ``reduce_qbf``: from a normalized forall-exists 3-CNF to a relative
  criticality instance (tau, Q, g).  The formula is valid iff tau is NOT
  critical for Q relative to g.  Per clause the query carries one clause
  atom, seven satisfying-assignment atoms and eight backup atoms; the
  assignment enumeration runs over the eight value triples of the three
  literal slots.  Slots are independent even when a variable repeats
  within the clause; enumerating only consistent assignments would break
  the construction on tautological clauses.

* ``reduce_graphhom``: from two digraphs to a criticality instance.  tau
  is NOT critical iff a graph homomorphism G1 -> G2 exists; G1 must be
  weakly connected and nonempty.

``qbf_witness_map``/``graph_witness_map`` build the canonical witness
homomorphism and its image instance; ``qbf_escape_map``/``graph_escape_map``
build the escape homomorphism avoiding tau.  Every constructed map is
verified at runtime rather than trusted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Mapping

from .criticality import fresh_namer
from .errors import InternalCheckError, ModelError, PreconditionError
from .homs import apply_hom, verify_hom
from .model import (
    Assignment,
    Atom,
    Clause,
    Digraph,
    Fact,
    Instance,
    QbfFormula,
    Query,
    is_weakly_connected,
    var,
)

TAU_QBF = Fact("R", ("0", "0", "1", "2"))
TAU_GRAPH = Fact("R", ("0", "1"))


def normalize_qbf(phi: QbfFormula) -> QbfFormula:
    """Append the tautological clause u or u or not-u for every universal
    variable that does not occur both positively and negatively."""
    pos, neg = set(), set()
    for cl in phi.clauses:
        for v, pol in cl:
            (pos if pol else neg).add(v)
    extra: list[Clause] = []
    for u in phi.universals:
        if u not in pos or u not in neg:
            extra.append(((u, True), (u, True), (u, False)))
    if not extra:
        return phi
    return QbfFormula(phi.universals, phi.existentials, phi.clauses + tuple(extra))


def _slot_assignments(clause: Clause):
    """All eight value triples of the clause's literal slots, each with its
    b-vector selector and whether it satisfies the clause."""
    for pi in product((False, True), repeat=3):
        satisfied = any(pi[i] == clause[i][1] for i in range(3))
        yield pi, satisfied


@dataclass(frozen=True, eq=False)
class QbfReductionOutput:
    tau: Fact
    query: Query
    g_index: int
    registry: dict = field(repr=False)
    phi: QbfFormula = field(repr=False)


def reduce_qbf(phi: QbfFormula) -> QbfReductionOutput:
    if not phi.normalized:
        raise PreconditionError(
            "formula is not normalized: every universal variable must occur "
            "both positively and negatively (apply normalize_qbf first)"
        )
    base = {
        "z": "z", "z'": "zp", "y": "y", "y'": "yp",
        "s": "s", "s'": "sp", "p": "p", "r": "r", "f": "f", "t": "t",
    }
    uni = {
        u: {
            "x_u": f"x_u{u}_pos",
            "x_not_u": f"x_u{u}_neg",
            "y_u": f"y_u{u}",
            "yp_u": f"yp_u{u}",
            "yp_not_u": f"yp_u{u}_neg",
        }
        for u in phi.universals
    }
    exi = {v: {"x_v": f"x_v{v}"} for v in phi.existentials}
    universal = set(phi.universals)

    def slot_var(lit) -> str:
        v, pol = lit
        if v in universal:
            return uni[v]["x_u"] if pol else uni[v]["x_not_u"]
        return exi[v]["x_v"]

    atoms: list[Atom] = []
    atoms.append(Atom("R", (var("z"), var("zp"), var("y"), var("yp"))))
    atoms.append(Atom("R", (var("s"), var("sp"), var("p"), var("p"))))
    for u in phi.universals:
        n = uni[u]
        atoms.append(Atom("R", (var(n["x_u"]), var(n["x_u"]), var(n["y_u"]), var(n["yp_u"]))))
        atoms.append(Atom("R", (var(n["x_not_u"]), var(n["x_not_u"]), var(n["yp_not_u"]), var(n["y_u"]))))
        atoms.append(Atom("R", (var("f"), var("f"), var(n["y_u"]), var(n["y_u"]))))
    clause_entries = []
    for index, clause in enumerate(phi.clauses):
        pred = f"Cl{index}"
        xs = tuple(var(slot_var(lit)) for lit in clause)
        clause_atom = Atom(pred, xs + (var("r"), var("r"), var("z")))
        atoms.append(clause_atom)
        sat_atoms, backup_atoms = [], []
        for pi, satisfied in _slot_assignments(clause):
            bs = []
            for i in range(3):
                v, pol = clause[i]
                if v in universal:
                    bs.append(var(slot_var(clause[i])) if pi[i] == pol else var("f"))
                else:
                    bs.append(var("t") if pi[i] else var("f"))
            bs = tuple(bs)
            if satisfied:
                sat_atoms.append(Atom(pred, bs + (var("z"), var("zp"), var("s"))))
            backup_atoms.append(Atom(pred, bs + (var("s"), var("sp"), var("s"))))
        atoms.extend(sat_atoms)
        atoms.extend(backup_atoms)
        clause_entries.append((pred, clause_atom, sat_atoms, backup_atoms))

    query = Query(atoms)
    index_of = {a: i for i, a in enumerate(query.atoms)}
    registry = {
        "schema": 1,
        "kind": "qbf",
        "tuple": str(TAU_QBF),
        "g_index": 0,
        "base": dict(base),
        "universals": {str(u): dict(n) for u, n in uni.items()},
        "existentials": {str(v): dict(n) for v, n in exi.items()},
        "clauses": [
            {
                "index": i,
                "predicate": pred,
                "clause_atom": index_of[clause_atom],
                "satisfying_atoms": [index_of[a] for a in sat_atoms],
                "backup_atoms": [index_of[a] for a in backup_atoms],
            }
            for i, (pred, clause_atom, sat_atoms, backup_atoms) in enumerate(clause_entries)
        ],
    }
    return QbfReductionOutput(TAU_QBF, query, 0, registry, phi)


def _check_total(sigma: Mapping[int, bool], scope, what: str) -> None:
    if set(sigma) != set(scope):
        raise PreconditionError(f"assignment must be total over {what}")


def matrix_satisfied(phi: QbfFormula, sigma: Mapping[int, bool]) -> bool:
    return all(any(sigma[v] == pol for v, pol in cl) for cl in phi.clauses)


def qbf_witness_map(
    out: QbfReductionOutput, sigma: Assignment
) -> tuple[dict[str, str], Instance]:
    """The canonical witness homomorphism for an assignment of the universals.

    Sends (z, z', y, y') to (0, 0, 1, 2); for a false universal, its
    positive-side triple to (0, 1, 2); for a true universal, its
    negative-side triple to (0, 1, 2); everything else to pairwise
    distinct fresh constants.  Returns (h, h(Q)).
    """
    phi = out.phi
    _check_total(sigma, phi.universals, "the universal variables")
    reg = out.registry
    h: dict[str, str] = {
        reg["base"]["z"]: "0",
        reg["base"]["z'"]: "0",
        reg["base"]["y"]: "1",
        reg["base"]["y'"]: "2",
    }
    for u in phi.universals:
        n = reg["universals"][str(u)]
        if sigma[u]:
            h[n["x_not_u"]] = "0"
            h[n["yp_not_u"]] = "1"
            h[n["y_u"]] = "2"
        else:
            h[n["x_u"]] = "0"
            h[n["y_u"]] = "1"
            h[n["yp_u"]] = "2"
    namer = fresh_namer({"0", "1", "2"})
    for v in out.query.variables():
        if v not in h:
            h[v] = namer()
    instance = apply_hom(h, out.query)
    g = out.query.atoms[out.g_index]
    if Fact(g.predicate, tuple(h[t.name] for t in g.args)) != out.tau:
        raise InternalCheckError("witness map does not send the pinned atom to tau")
    if not verify_hom(h, out.query, instance):
        raise InternalCheckError("witness map failed verification")
    return h, instance


def qbf_escape_map(
    out: QbfReductionOutput,
    h: Mapping[str, str],
    sigma_full: Assignment,
) -> dict[str, str]:
    """The escape homomorphism avoiding tau, for a satisfying assignment.

    Preconditions: h sends the pinned atom to tau; sigma_full is total over
    all variables, satisfies the matrix, and is aligned with h: a universal
    u is false under sigma_full iff h sends u's positive-side atom to tau.
    The result is verified as a homomorphism into h(Q) minus tau.
    """
    phi = out.phi
    reg = out.registry
    query = out.query
    qvars = set(query.variables())
    for v in qvars:
        if v not in h:
            raise ModelError(f"homomorphism does not bind variable {v}")
    _check_total(sigma_full, phi.universals + phi.existentials, "all variables")
    g = query.atoms[out.g_index]
    if Fact(g.predicate, tuple(h[t.name] for t in g.args)) != out.tau:
        raise PreconditionError("h must send the pinned atom to tau")
    if not matrix_satisfied(phi, sigma_full):
        raise PreconditionError("assignment does not satisfy the matrix")
    for u in phi.universals:
        n = reg["universals"][str(u)]
        pos_atom_image = Fact(
            "R", (h[n["x_u"]], h[n["x_u"]], h[n["y_u"]], h[n["yp_u"]])
        )
        if (not sigma_full[u]) != (pos_atom_image == out.tau):
            raise PreconditionError(
                f"assignment is not aligned with h on universal variable {u}"
            )

    b = reg["base"]
    h_new = dict(h)
    h_new[b["z"]] = h[b["s"]]
    h_new[b["z'"]] = h[b["s'"]]
    h_new[b["y"]] = h[b["p"]]
    h_new[b["y'"]] = h[b["p"]]
    h_new[b["r"]] = h[b["z"]]
    for u in phi.universals:
        n = reg["universals"][str(u)]
        if sigma_full[u]:
            h_new[n["x_not_u"]] = h[b["f"]]
            h_new[n["yp_not_u"]] = h[n["y_u"]]
        else:
            h_new[n["x_u"]] = h[b["f"]]
            h_new[n["yp_u"]] = h[n["y_u"]]
    for v in phi.existentials:
        name = reg["existentials"][str(v)]["x_v"]
        if name in qvars:
            h_new[name] = h[b["t"]] if sigma_full[v] else h[b["f"]]

    target = apply_hom(h, query).without(out.tau)
    if not verify_hom(h_new, query, target):
        raise InternalCheckError("escape map failed verification")
    return h_new


@dataclass(frozen=True, eq=False)
class GraphReductionOutput:
    tau: Fact
    query: Query
    vstar: str
    registry: dict = field(repr=False)
    g1: Digraph = field(repr=False)
    g2: Digraph = field(repr=False)


def reduce_graphhom(g1: Digraph, g2: Digraph) -> GraphReductionOutput:
    """Criticality instance for the homomorphism problem G1 -> G2.

    Node sets are systematically renamed apart.  The anchor node vstar is
    the least node id of G1 (a deterministic choice of "arbitrary").
    """
    if not g1.nodes:
        raise PreconditionError("the source graph must be nonempty")
    if not is_weakly_connected(g1):
        raise PreconditionError("the source graph must be weakly connected")
    names1 = {v: f"x_g1_{v}" for v in g1.sorted_nodes()}
    names2 = {v: f"x_g2_{v}" for v in g2.sorted_nodes()}
    vstar = g1.sorted_nodes()[0]
    atoms: list[Atom] = []
    for a, bnode in g1.sorted_edges():
        atoms.append(Atom("E", (var(names1[a]), var(names1[bnode]))))
    for a, bnode in g2.sorted_edges():
        atoms.append(Atom("E", (var(names2[a]), var(names2[bnode]))))
    anchor = Atom("R", (var(names1[vstar]), var("x")))
    atoms.append(anchor)
    loop_atoms = [Atom("R", (var(names2[v]), var(names2[v]))) for v in g2.sorted_nodes()]
    atoms.extend(loop_atoms)
    query = Query(atoms)
    index_of = {a: i for i, a in enumerate(query.atoms)}
    registry = {
        "schema": 1,
        "kind": "graphhom",
        "tuple": str(TAU_GRAPH),
        "vstar": vstar,
        "x": "x",
        "g1": dict(sorted(names1.items())),
        "g2": dict(sorted(names2.items())),
        "anchor_atom": index_of[anchor],
        "loop_atoms": [index_of[a] for a in loop_atoms],
    }
    return GraphReductionOutput(TAU_GRAPH, query, vstar, registry, g1, g2)


def graph_witness_map(out: GraphReductionOutput) -> tuple[dict[str, str], Instance]:
    """Witness homomorphism: anchor variables to 0 and 1, the rest fresh."""
    names1 = out.registry["g1"]
    h: dict[str, str] = {names1[out.vstar]: "0", "x": "1"}
    namer = fresh_namer({"0", "1"})
    for v in out.query.variables():
        if v not in h:
            h[v] = namer()
    instance = apply_hom(h, out.query)
    if not verify_hom(h, out.query, instance):
        raise InternalCheckError("witness map failed verification")
    if out.tau not in instance:
        raise InternalCheckError("witness instance does not contain tau")
    return h, instance


def graph_escape_map(
    out: GraphReductionOutput,
    h: Mapping[str, str],
    h_graph: Mapping[str, str],
) -> dict[str, str]:
    """Escape homomorphism induced by a graph homomorphism G1 -> G2.

    Routes every G1 variable through its h_graph image (a G2 variable),
    sends x alongside vstar, and fixes all G2 variables.  Verified against
    h(Q) minus tau.
    """
    g1, g2 = out.g1, out.g2
    if set(h_graph) != set(g1.nodes):
        raise PreconditionError("the map must be total over the source nodes")
    for v, w in h_graph.items():
        if w not in g2.nodes:
            raise PreconditionError(f"map sends {v} outside the target graph")
    for a, bnode in g1.edges:
        if (h_graph[a], h_graph[bnode]) not in g2.edges:
            raise PreconditionError(
                f"map does not preserve the edge ({a},{bnode})"
            )
    for v in out.query.variables():
        if v not in h:
            raise ModelError(f"homomorphism does not bind variable {v}")
    names1 = out.registry["g1"]
    names2 = out.registry["g2"]
    h_new = dict(h)
    for v in g1.nodes:
        h_new[names1[v]] = h[names2[h_graph[v]]]
    h_new["x"] = h[names2[h_graph[out.vstar]]]
    target = apply_hom(h, out.query).without(out.tau)
    if not verify_hom(h_new, out.query, target):
        raise InternalCheckError("escape map failed verification")
    return h_new


def counterexample_fixture() -> tuple[Query, Fact, int, int]:
    """The fixed query/tuple pair separating criticality from its relative
    variant: critical overall, yet non-critical relative to the first atom."""
    q = Query(
        [
            Atom("R", (var("x"), var("y"), var("z"), var("z"))),
            Atom("R", (var("x"), var("x"), var("y"), var("y"))),
        ]
    )
    tau = Fact("R", ("a", "a", "b", "b"))
    return q, tau, 0, 1
