"""Deciders for critical and relatively critical tuples.

A tuple tau is critical for a query Q when some instance I satisfies Q but
I minus tau does not; relative criticality additionally requires the
satisfying homomorphism to send a designated atom g onto tau.  The search
space is restricted to image instances h(Q): if any I witnesses, h(Q) also
does, because h(Q) minus tau is contained in I minus tau and tau is in
h(Q).  That restriction is exercised as a tested lemma, not assumed
silently (see the test suite).

Candidates h range over the named constants (those of tau and of Q) plus
fresh constants, one representative per fresh-renaming class: fresh
indices appear in first-use order along the enumeration variable order.
During the depth-first enumeration a subtree is pruned once the partial
image already admits a homomorphism of Q avoiding tau: every extension
only adds tuples, so none below can be a witness.

``brute_force_critical`` is the independent ground truth: a non-canonical
enumeration of all maps with a naive inner search, sharing no code with
the engine.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import product
from time import monotonic
from typing import Iterator, Optional, Union

from . import kernel
from .errors import BudgetExceededError, GuardError, InternalCheckError, ModelError
from .homs import Pin, apply_hom, find_hom, unify_atom_tuple, verify_hom
from .model import Fact, Instance, Query


@dataclass(frozen=True)
class Fresh:
    """A fresh-constant placeholder; indices are 1-based."""

    index: int

    def __str__(self):
        return f"fresh({self.index})"


DomainValue = Union[str, Fresh]


def fresh_namer(avoid: set[str]):
    """Deterministic fresh-constant names c1, c2, ... avoiding collisions.

    If any existing constant looks like c<digits>, the prefix is doubled
    until the whole family is collision-free.
    """
    prefix = "c"
    while any(
        c.startswith(prefix) and c[len(prefix) :].isdigit() for c in avoid
    ):
        prefix += "c"
    counter = 0

    def next_name() -> str:
        nonlocal counter
        counter += 1
        return f"{prefix}{counter}"

    return next_name


@dataclass(frozen=True)
class CandidateAssignment:
    """A canonical total map from query variables to named or fresh constants.

    ``variables`` lists the free variables in enumeration order followed by
    nothing else; pinned variables live in ``pin``.  Two canonical
    candidates are equal iff they induce the same labelled partition of the
    variables.
    """

    variables: tuple[str, ...]
    values: tuple[DomainValue, ...]
    pin: tuple[tuple[str, str], ...]

    def mapping(self) -> dict[str, DomainValue]:
        out: dict[str, DomainValue] = dict(self.pin)
        out.update(zip(self.variables, self.values))
        return out

    def materialize(self, avoid: set[str]) -> dict[str, str]:
        """Concrete homomorphism with fresh placeholders named apart."""
        namer = fresh_namer(set(avoid))
        names: dict[int, str] = {}
        out: dict[str, str] = dict(self.pin)
        for v, value in zip(self.variables, self.values):
            if isinstance(value, Fresh):
                if value.index not in names:
                    names[value.index] = namer()
                out[v] = names[value.index]
            else:
                out[v] = value
        return out

    def fresh_count(self) -> int:
        return len({v.index for v in self.values if isinstance(v, Fresh)})


class Reason(str, enum.Enum):
    WITNESS_FOUND = "witness-found"
    EXHAUSTED = "exhausted"
    PIN_UNSATISFIABLE = "pin-unsatisfiable"


@dataclass
class SearchStats:
    nodes: int = 0
    hom_checks: int = 0
    inner_nodes: int = 0
    memo_hits: int = 0
    seconds: float = 0.0

    def add(self, other: "SearchStats") -> None:
        self.nodes += other.nodes
        self.hom_checks += other.hom_checks
        self.inner_nodes += other.inner_nodes
        self.memo_hits += other.memo_hits
        self.seconds += other.seconds

    def as_dict(self, include_seconds: bool = True) -> dict:
        out = {
            "nodes": self.nodes,
            "hom_checks": self.hom_checks,
            "inner_nodes": self.inner_nodes,
            "memo_hits": self.memo_hits,
        }
        if include_seconds:
            out["seconds"] = round(self.seconds, 6)
        return out


@dataclass
class Verdict:
    critical: bool
    reason: Reason
    witness: Optional[tuple[CandidateAssignment, Instance]] = None
    witness_hom: Optional[dict[str, str]] = None
    via_atom: Optional[int] = None
    stats: SearchStats = field(default_factory=SearchStats)


def named_constants(tau: Fact, query: Query) -> list[str]:
    return sorted(set(tau.args) | query.constants())


def _greedy_cover(
    query: Query, pool: list[int], placed: set[str], order: list[str], tau_pred: str
) -> None:
    """Repeatedly take the pool atom with the fewest unplaced variables and
    append them; ties prefer atoms of the tau predicate (the scarce escape
    targets), then lower atom index."""
    atom_vars = [list(a.variables()) for a in query.atoms]
    while True:
        best_key = None
        best_vars = None
        for i in pool:
            un = [v for v in atom_vars[i] if v not in placed]
            if un:
                key = (len(un), 0 if query.atoms[i].predicate == tau_pred else 1, i)
                if best_key is None or key < best_key:
                    best_key, best_vars = key, un
        if best_vars is None:
            return
        for v in best_vars:
            order.append(v)
            placed.add(v)


def enumeration_order(query: Query, pinned: set[str], tau_pred: str) -> list[str]:
    """Static variable order that grounds atoms as early as possible.

    Greedy set cover over all atoms; early grounding makes the
    image-pruning rule fire high in the candidate tree.  Variables
    occurring in a single atom are deferred to the end: they never unlock
    shared structure, and binding them early only multiplies branches
    below the depth where pruning can start.
    """
    placed = set(pinned)
    occurrences: dict[str, int] = {}
    for a in query.atoms:
        for v in a.variables():
            occurrences[v] = occurrences.get(v, 0) + 1
    order: list[str] = []
    _greedy_cover(query, list(range(len(query.atoms))), placed, order, tau_pred)
    return [v for v in order if occurrences[v] > 1] + [
        v for v in order if occurrences[v] == 1
    ]


def _pattern_class(atom) -> tuple:
    """Equality/constant skeleton of an atom: predicate, repeated-position
    links, and constant positions.  Atoms of one class can host each other's
    escape images, so covering one representative per class early tends to
    complete the pruning support with the fewest bound variables."""
    first: dict[str, int] = {}
    links = []
    consts = []
    for pos, t in enumerate(atom.args):
        if t.is_var:
            if t.name in first:
                links.append((first[t.name], pos))
            else:
                first[t.name] = pos
        else:
            consts.append((pos, t.name))
    return (atom.predicate, tuple(links), tuple(consts))


def class_cover_order(query: Query, pinned: set[str], tau_pred: str) -> list[str]:
    """Alternative static order: cover one representative per pattern class
    of the tau-predicate atoms first, then run the plain greedy cover.

    The escape search must re-home every tau-predicate atom, and their
    images are the scarce targets; grounding one atom per class early
    completes the pruning support with few bound variables, while atoms of
    an already-covered class can ride along later."""
    placed = set(pinned)
    seen_classes: set[tuple] = set()
    reps = []
    for i, a in enumerate(query.atoms):
        if a.predicate != tau_pred:
            continue
        key = _pattern_class(a)
        if key not in seen_classes:
            seen_classes.add(key)
            reps.append(i)
    order: list[str] = []
    _greedy_cover(query, reps, placed, order, tau_pred)
    _greedy_cover(query, list(range(len(query.atoms))), placed, order, tau_pred)
    return order


def candidate_assignments(
    query: Query,
    pin: Optional[Pin],
    tau: Fact,
    var_order: Optional[list[str]] = None,
) -> Iterator[CandidateAssignment]:
    """Stream of canonical candidate maps extending the pin.

    Domain: constants of tau and of Q, plus fresh constants in first-use
    order.  At each variable the values come fresh-first (existing fresh
    ascending, one new fresh, then named constants ascending), which makes
    the stream order the canonical one used by the deciders.
    """
    pin = pin or {}
    named = named_constants(tau, query)
    named_set = set(named)
    qvars = query.variables()
    for v, c in pin.items():
        if v not in set(qvars):
            raise ModelError(f"pin binds {v}, not a variable of the query")
        if c not in named_set:
            raise ModelError(f"pin value {c} is not a constant of the tuple or query")
    if var_order is None:
        free = [v for v in qvars if v not in pin]
    else:
        free = list(var_order)
        if sorted(free) != sorted(v for v in qvars if v not in pin):
            raise ModelError("var_order must list exactly the unpinned variables")
    pin_items = tuple(sorted(pin.items()))

    values: list[DomainValue] = [None] * len(free)  # type: ignore[list-item]

    def rec(i: int, used: int) -> Iterator[CandidateAssignment]:
        if i == len(free):
            yield CandidateAssignment(tuple(free), tuple(values), pin_items)
            return
        for k in range(1, used + 2):
            values[i] = Fresh(k)
            yield from rec(i + 1, max(used, k))
        for c in named:
            values[i] = c
            yield from rec(i + 1, used)

    return rec(0, 0)


def _encode(query: Query, tau: Fact, pin: Pin):
    named = named_constants(tau, query)
    cid = {c: i for i, c in enumerate(named)}
    qvars = query.variables()
    vid = {v: i for i, v in enumerate(qvars)}
    preds = sorted({a.predicate for a in query.atoms})
    pid = {p: i for i, p in enumerate(preds)}
    atom_preds = [pid[a.predicate] for a in query.atoms]
    atom_args = [
        tuple(-(vid[t.name] + 1) if t.is_var else cid[t.name] for t in a.args)
        for a in query.atoms
    ]
    pin_arr = [-1] * len(qvars)
    for v, c in pin.items():
        pin_arr[vid[v]] = cid[c]
    return named, cid, qvars, vid, pid, atom_preds, atom_args, pin_arr


def _reverify_witness(
    tau: Fact,
    query: Query,
    pin: Pin,
    hom: dict[str, str],
    instance: Instance,
) -> None:
    """Independent second pass over a claimed witness; raises on any failure."""
    if not verify_hom(hom, query, instance):
        raise InternalCheckError("witness mapping is not a homomorphism into its image")
    for v, c in pin.items():
        if hom.get(v) != c:
            raise InternalCheckError("witness does not extend the pin")
    if tau not in instance:
        raise InternalCheckError("witness instance does not contain the tuple")
    rest = instance.without(tau)
    if find_hom(query, rest, deterministic=False) is not None:
        raise InternalCheckError("engine re-check found an escape homomorphism")
    nconsts = max(len(rest.constants()), 1)
    if nconsts ** len(query.variables()) <= 2_000_000:
        if _naive_hom_exists(query, rest):
            raise InternalCheckError("naive re-check found an escape homomorphism")


_PORTFOLIO_STEP = 50_000


def is_critical_relative(
    tau: Fact,
    query: Query,
    g_index: int,
    *,
    max_nodes: int = 0,
    max_seconds: float = 0.0,
    inner_budget: int = 200_000,
    use_memo: bool = False,
    reverify: bool = True,
) -> Verdict:
    """Decide whether tau is critical for the query relative to atom g_index.

    True iff some candidate h extending unify(g, tau) has no homomorphism
    of the query into h(Q) minus tau.  When no binding sends g to tau the
    verdict is False with reason pin-unsatisfiable (flagged, not folded
    into exhaustion).

    The pruning power of the candidate search depends heavily on the static
    variable order, and no single heuristic wins on every query shape, so a
    small deterministic portfolio of orders runs under an escalating node
    budget; the first completed run decides.  The reported witness is the
    canonically least under the order that completed.
    """
    if not 0 <= g_index < len(query.atoms):
        raise ModelError(f"atom index {g_index} out of range")
    start = monotonic()
    g = query.atoms[g_index]
    pin = unify_atom_tuple(g, tau)
    if pin is None:
        return Verdict(False, Reason.PIN_UNSATISFIABLE, stats=SearchStats())
    named, cid, qvars, vid, pid, atom_preds, atom_args, pin_arr = _encode(
        query, tau, pin
    )
    orders = [enumeration_order(query, set(pin), tau.predicate)]
    alt = class_cover_order(query, set(pin), tau.predicate)
    if alt != orders[0]:
        orders.append(alt)
    tau_args = tuple(cid[c] for c in tau.args)
    deadline = start + max_seconds if max_seconds else 0.0
    total = SearchStats()

    step = _PORTFOLIO_STEP
    while True:
        for free in orders:
            cap = step
            if max_nodes:
                remaining = max_nodes - total.nodes
                if remaining <= 0:
                    raise BudgetExceededError(
                        f"criticality search exceeded its budget after "
                        f"{total.nodes} candidates",
                        stats=total,
                    )
                cap = min(cap, remaining)
            status, assignment, raw = kernel.get().search_witness(
                len(qvars),
                len(named),
                len(pid),
                atom_preds,
                atom_args,
                pin_arr,
                [vid[v] for v in free],
                pid[tau.predicate],
                tau_args,
                inner_budget,
                cap,
                deadline,
                use_memo,
            )
            total.add(SearchStats(raw[0], raw[1], raw[2], raw[3], 0.0))
            total.seconds = monotonic() - start
            if status == 2:
                if deadline and monotonic() > deadline:
                    raise BudgetExceededError(
                        "criticality search exceeded its time budget",
                        stats=total,
                    )
                continue
            if status == 1:
                return Verdict(False, Reason.EXHAUSTED, stats=total)
            values: list[DomainValue] = []
            for v in free:
                val = assignment[vid[v]]
                values.append(
                    named[val] if val < len(named) else Fresh(val - len(named) + 1)
                )
            candidate = CandidateAssignment(
                tuple(free), tuple(values), tuple(sorted(pin.items()))
            )
            hom = candidate.materialize(set(named))
            instance = apply_hom(hom, query)
            if reverify:
                _reverify_witness(tau, query, pin, hom, instance)
            return Verdict(
                True,
                Reason.WITNESS_FOUND,
                witness=(candidate, instance),
                witness_hom=hom,
                stats=total,
            )
        step *= 4


def is_critical(
    tau: Fact,
    query: Query,
    *,
    max_nodes: int = 0,
    max_seconds: float = 0.0,
    inner_budget: int = 200_000,
    parallel: bool = False,
    reverify: bool = True,
) -> Verdict:
    """Decide criticality by the per-atom decomposition.

    tau is critical iff it is critical relative to some atom: a witnessing
    homomorphism must send some atom to tau (otherwise it survives into
    I minus tau itself), and relative criticality implies criticality.
    via_atom is the first true atom index in deterministic (sequential)
    mode.
    """
    if parallel:
        return _is_critical_parallel(
            tau, query, max_nodes=max_nodes, max_seconds=max_seconds,
            inner_budget=inner_budget, reverify=reverify,
        )
    total = SearchStats()
    deadline = monotonic() + max_seconds if max_seconds else 0.0
    any_exhausted = False
    for g_index in range(len(query.atoms)):
        remaining_nodes = max_nodes - total.nodes if max_nodes else 0
        remaining_seconds = (deadline - monotonic()) if deadline else 0.0
        if max_nodes and remaining_nodes <= 0:
            raise BudgetExceededError("node budget exhausted across atoms", stats=total)
        if deadline and remaining_seconds <= 0:
            raise BudgetExceededError("time budget exhausted across atoms", stats=total)
        try:
            verdict = is_critical_relative(
                tau,
                query,
                g_index,
                max_nodes=remaining_nodes,
                max_seconds=remaining_seconds,
                inner_budget=inner_budget,
                reverify=reverify,
            )
        except BudgetExceededError as exc:
            if exc.stats is not None:
                total.add(exc.stats)
            raise BudgetExceededError(str(exc), stats=total)
        total.add(verdict.stats)
        if verdict.critical:
            return Verdict(
                True,
                Reason.WITNESS_FOUND,
                witness=verdict.witness,
                witness_hom=verdict.witness_hom,
                via_atom=g_index,
                stats=total,
            )
        if verdict.reason is Reason.EXHAUSTED:
            any_exhausted = True
    reason = Reason.EXHAUSTED if any_exhausted else Reason.PIN_UNSATISFIABLE
    return Verdict(False, reason, stats=total)


def _relative_task(args):
    tau, query, g_index, max_nodes, max_seconds, inner_budget, reverify = args
    try:
        return g_index, is_critical_relative(
            tau, query, g_index,
            max_nodes=max_nodes, max_seconds=max_seconds,
            inner_budget=inner_budget, reverify=reverify,
        ), None
    except BudgetExceededError as exc:
        return g_index, None, exc


def _is_critical_parallel(tau, query, *, max_nodes, max_seconds, inner_budget, reverify):
    # Candidate evaluation is embarrassingly parallel over atoms; the boolean
    # verdict is schedule-independent.  Each atom gets the full budget.
    from concurrent.futures import ProcessPoolExecutor

    tasks = [
        (tau, query, g, max_nodes, max_seconds, inner_budget, reverify)
        for g in range(len(query.atoms))
    ]
    total = SearchStats()
    results: dict[int, Verdict] = {}
    budget_error = None
    with ProcessPoolExecutor() as pool:
        for g_index, verdict, exc in pool.map(_relative_task, tasks):
            if exc is not None:
                budget_error = exc
                continue
            results[g_index] = verdict
            total.add(verdict.stats)
    for g_index in sorted(results):
        v = results[g_index]
        if v.critical:
            return Verdict(
                True, Reason.WITNESS_FOUND,
                witness=v.witness, witness_hom=v.witness_hom,
                via_atom=g_index, stats=total,
            )
    if budget_error is not None:
        raise BudgetExceededError(str(budget_error), stats=total)
    if any(v.reason is Reason.EXHAUSTED for v in results.values()):
        return Verdict(False, Reason.EXHAUSTED, stats=total)
    return Verdict(False, Reason.PIN_UNSATISFIABLE, stats=total)


def _naive_hom_exists(query: Query, instance: Instance) -> bool:
    """Naive recursive enumeration with early atom rejection.

    Deliberately dissimilar from the engine: fixed variable order, no
    candidate filtering, no indexes.  Shared by brute_force_critical and
    the witness re-verification pass.
    """
    facts = instance.facts
    qvars = list(query.variables())
    consts = sorted(instance.constants())
    atoms = [(a.predicate, a.args) for a in query.atoms]
    last_var_pos = []
    for pred, args in atoms:
        pos = -1
        for t in args:
            if t.is_var:
                pos = max(pos, qvars.index(t.name))
        last_var_pos.append(pos)
    env: dict[str, str] = {}

    def image_in_facts(i: int) -> bool:
        pred, args = atoms[i]
        vals = tuple(env[t.name] if t.is_var else t.name for t in args)
        return Fact(pred, vals) in facts

    for i, pos in enumerate(last_var_pos):
        if pos == -1 and not image_in_facts(i):
            return False
    ground_at = [[i for i, p in enumerate(last_var_pos) if p == d] for d in range(len(qvars))]

    def rec(d: int) -> bool:
        if d == len(qvars):
            return True
        for c in consts:
            env[qvars[d]] = c
            if all(image_in_facts(i) for i in ground_at[d]) and rec(d + 1):
                return True
        env.pop(qvars[d], None)
        return False

    if not qvars:
        return True
    return rec(0)


def brute_force_critical(
    tau: Fact,
    query: Query,
    max_fresh: Optional[int] = None,
    *,
    guard: int = 5_000_000,
) -> bool:
    """Independent oracle: exhaustive non-canonical witness search.

    Enumerates every map of the query's variables into the constants of
    tau and Q plus max_fresh fresh constants (default: one per variable),
    and checks the defining condition directly with the naive searcher.
    Intended for small queries; raises GuardError beyond the size guard.
    """
    qvars = query.variables()
    named = named_constants(tau, query)
    if max_fresh is None:
        max_fresh = len(qvars)
    namer = fresh_namer(set(named))
    domain = named + [namer() for _ in range(max_fresh)]
    size = max(len(domain), 1) ** len(qvars)
    if size > guard:
        raise GuardError(
            f"{len(domain)}^{len(qvars)} maps exceed the brute-force guard"
        )
    for values in product(domain, repeat=len(qvars)):
        h = dict(zip(qvars, values))
        image = apply_hom(h, query)
        if tau not in image:
            continue
        if not _naive_hom_exists(query, image.without(tau)):
            return True
    return False
