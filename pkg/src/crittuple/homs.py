"""Homomorphism engine: unification, application, verification, search.

A homomorphism is a plain dict mapping every variable of a query to a
constant name; constants occurring in the query map to themselves
implicitly.  A pin is a partial such dict (typically the unifier of a
query atom with a target tuple).

``find_hom`` is the workhorse: backtracking with forward pruning over
per-predicate tuple groups.  Deterministic mode fixes the variable order
(first occurrence in the query) and the constant order (lexicographic on
names) and returns the lexicographically least homomorphism; the fast mode
uses most-constrained-variable selection and only promises existence.
Resource limits are explicit and exhausting one raises
:class:`BudgetExceededError`; silent truncation is forbidden.
"""

from __future__ import annotations

from time import monotonic
from typing import Mapping, Optional

from . import kernel
from .errors import BudgetExceededError, ModelError
from .model import Atom, Fact, Instance, Query

Pin = dict[str, str]
Hom = dict[str, str]


def unify_atom_tuple(g: Atom, tau: Fact) -> Optional[Pin]:
    """The unique binding of g's variables making its image equal tau.

    Absent (None) when predicate or arity differ, a constant of g
    disagrees with tau positionally, or a repeated variable would need two
    distinct values.  Absence is a value, not an error.
    """
    if g.predicate != tau.predicate or g.arity != tau.arity:
        return None
    pin: Pin = {}
    for term, value in zip(g.args, tau.args):
        if term.is_var:
            bound = pin.get(term.name)
            if bound is None:
                pin[term.name] = value
            elif bound != value:
                return None
        elif term.name != value:
            return None
    return pin


def apply_hom(h: Mapping[str, str], query: Query) -> Instance:
    """The image instance h(Q): the set of images of Q's atoms."""
    facts = []
    for atom in query.atoms:
        args = []
        for t in atom.args:
            if t.is_var:
                value = h.get(t.name)
                if value is None:
                    raise ModelError(f"homomorphism does not bind variable {t.name}")
                args.append(value)
            else:
                args.append(t.name)
        facts.append(Fact(atom.predicate, tuple(args)))
    return Instance(facts)


def verify_hom(h: Mapping[str, str], query: Query, instance: Instance) -> bool:
    """True iff every atom's image under h is a tuple of the instance."""
    for atom in query.atoms:
        args = []
        for t in atom.args:
            if t.is_var:
                value = h.get(t.name)
                if value is None:
                    raise ModelError(f"homomorphism does not bind variable {t.name}")
                args.append(value)
            else:
                args.append(t.name)
        if Fact(atom.predicate, tuple(args)) not in instance:
            return False
    return True


def _check_joint_arities(query: Query, instance: Instance) -> None:
    arities = dict(query.arities)
    for f in instance.facts:
        known = arities.setdefault(f.predicate, f.arity)
        if known != f.arity:
            raise ModelError(
                f"predicate {f.predicate} used with arities {known} and {f.arity}"
            )


def find_hom(
    query: Query,
    instance: Instance,
    pin: Optional[Pin] = None,
    *,
    deterministic: bool = True,
    max_nodes: int = 0,
    max_seconds: float = 0.0,
) -> Optional[Hom]:
    """Some homomorphism from query to instance extending pin, or None.

    Raises BudgetExceededError when a node or wall-clock budget runs out
    before the search decides.
    """
    pin = pin or {}
    _check_joint_arities(query, instance)
    qvars = query.variables()
    vset = set(qvars)
    for v in pin:
        if v not in vset:
            raise ModelError(f"pin binds {v}, not a variable of the query")
    # Constants of the query missing from the instance decide immediately.
    iconsts = instance.constants()
    if not query.constants() <= iconsts:
        return None
    for value in pin.values():
        if value not in iconsts:
            return None

    consts = sorted(iconsts)
    cid = {c: i for i, c in enumerate(consts)}
    vid = {v: i for i, v in enumerate(qvars)}
    preds = sorted({a.predicate for a in query.atoms} | {f.predicate for f in instance.facts})
    pid = {p: i for i, p in enumerate(preds)}
    atom_preds = [pid[a.predicate] for a in query.atoms]
    atom_args = [
        tuple(-(vid[t.name] + 1) if t.is_var else cid[t.name] for t in a.args)
        for a in query.atoms
    ]
    tuples_by_pred: list[list[tuple[int, ...]]] = [[] for _ in preds]
    for f in instance.sorted_facts():
        tuples_by_pred[pid[f.predicate]].append(tuple(cid[x] for x in f.args))
    pin_arr = [-1] * len(qvars)
    for v, c in pin.items():
        pin_arr[vid[v]] = cid[c]
    deadline = monotonic() + max_seconds if max_seconds else 0.0

    status, assignment, nodes = kernel.get().solve_hom(
        len(qvars),
        len(consts),
        atom_preds,
        atom_args,
        tuples_by_pred,
        pin_arr,
        list(range(len(qvars))),
        not deterministic,
        max_nodes,
        deadline,
    )
    if status == 2:
        raise BudgetExceededError(
            f"homomorphism search exceeded its budget after {nodes} nodes",
            stats={"nodes": nodes},
        )
    if status == 1:
        return None
    return {v: consts[assignment[vid[v]]] for v in qvars}
