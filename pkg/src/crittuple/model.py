"""Domain types: queries, facts, instances, QBF formulas, digraphs.

All values are immutable after construction and safe to share across
threads.  Queries and instances use set semantics; a query additionally
keeps its atoms in (deduplicated) textual order so atom indices are stable.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from .errors import ModelError


@dataclass(frozen=True)
class Term:
    """A variable or constant argument position.

    Variable names and constant names live in disjoint lexical spaces:
    the text format marks variables with a leading ``?``.
    """

    name: str
    is_var: bool

    def __str__(self):
        return f"?{self.name}" if self.is_var else self.name


def var(name: str) -> Term:
    return Term(name, True)


def const(name: str) -> Term:
    return Term(name, False)


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: tuple[Term, ...]

    @property
    def arity(self) -> int:
        return len(self.args)

    def variables(self) -> tuple[str, ...]:
        """Variable names in first-occurrence order."""
        seen = []
        for t in self.args:
            if t.is_var and t.name not in seen:
                seen.append(t.name)
        return tuple(seen)

    def constants(self) -> frozenset[str]:
        return frozenset(t.name for t in self.args if not t.is_var)

    def is_ground(self) -> bool:
        return all(not t.is_var for t in self.args)

    def __str__(self):
        return f"{self.predicate}({','.join(str(t) for t in self.args)})"


@dataclass(frozen=True)
class Fact:
    """A ground atom (a tuple of the database)."""

    predicate: str
    args: tuple[str, ...]

    @property
    def arity(self) -> int:
        return len(self.args)

    def as_atom(self) -> Atom:
        return Atom(self.predicate, tuple(const(a) for a in self.args))

    def __str__(self):
        return f"{self.predicate}({','.join(self.args)})"


def _check_arities(pairs: Iterable[tuple[str, int]], arities: dict[str, int]) -> None:
    for pred, arity in pairs:
        known = arities.get(pred)
        if known is None:
            arities[pred] = arity
        elif known != arity:
            raise ModelError(
                f"predicate {pred} used with arities {known} and {arity}"
            )


class Query:
    """A Boolean conjunctive query: a nonempty set of atoms.

    Atoms are deduplicated but keep their first-occurrence order; indices
    into :attr:`atoms` are the stable per-atom addresses used everywhere.
    """

    __slots__ = ("atoms", "_arities")

    def __init__(self, atoms: Iterable[Atom]):
        unique: list[Atom] = []
        seen = set()
        for a in atoms:
            if a not in seen:
                seen.add(a)
                unique.append(a)
        if not unique:
            raise ModelError("a query must contain at least one atom")
        arities: dict[str, int] = {}
        _check_arities(((a.predicate, a.arity) for a in unique), arities)
        object.__setattr__(self, "atoms", tuple(unique))
        object.__setattr__(self, "_arities", arities)

    def __setattr__(self, *a):  # immutable
        raise AttributeError("Query is immutable")

    def __reduce__(self):
        return (Query, (list(self.atoms),))

    @property
    def arities(self) -> Mapping[str, int]:
        return dict(self._arities)

    def variables(self) -> tuple[str, ...]:
        """All variable names, in first occurrence order across the atoms."""
        seen: list[str] = []
        for atom in self.atoms:
            for t in atom.args:
                if t.is_var and t.name not in seen:
                    seen.append(t.name)
        return tuple(seen)

    def constants(self) -> frozenset[str]:
        out: set[str] = set()
        for atom in self.atoms:
            out.update(atom.constants())
        return frozenset(out)

    def __eq__(self, other):
        return isinstance(other, Query) and self.atoms == other.atoms

    def __hash__(self):
        return hash(self.atoms)

    def __repr__(self):
        return f"Query({' . '.join(str(a) for a in self.atoms)})"


class Instance:
    """A finite set of facts, arity-consistent per predicate."""

    __slots__ = ("facts",)

    def __init__(self, facts: Iterable[Fact]):
        fs = frozenset(facts)
        arities: dict[str, int] = {}
        _check_arities(((f.predicate, f.arity) for f in fs), arities)
        object.__setattr__(self, "facts", fs)

    def __setattr__(self, *a):
        raise AttributeError("Instance is immutable")

    def __reduce__(self):
        return (Instance, (list(self.facts),))

    def sorted_facts(self) -> list[Fact]:
        return sorted(self.facts, key=lambda f: (f.predicate, f.args))

    def constants(self) -> frozenset[str]:
        out: set[str] = set()
        for f in self.facts:
            out.update(f.args)
        return frozenset(out)

    def without(self, fact: Fact) -> "Instance":
        return Instance(self.facts - {fact})

    def __contains__(self, fact: Fact) -> bool:
        return fact in self.facts

    def __iter__(self):
        return iter(self.sorted_facts())

    def __len__(self):
        return len(self.facts)

    def __eq__(self, other):
        return isinstance(other, Instance) and self.facts == other.facts

    def __hash__(self):
        return hash(self.facts)

    def __repr__(self):
        return f"Instance({{{', '.join(str(f) for f in self.sorted_facts())}}})"


Literal = tuple[int, bool]  # (propositional variable id, polarity)
Clause = tuple[Literal, Literal, Literal]


@dataclass(frozen=True)
class QbfFormula:
    """A forall-exists QBF whose matrix is a conjunction of 3-literal clauses.

    ``universals`` and ``existentials`` are ordered, disjoint, duplicate-free
    lists of positive variable ids; every literal's variable must be
    quantified.  Clause literal order is preserved (it addresses the three
    slots of the clause gadgets).
    """

    universals: tuple[int, ...]
    existentials: tuple[int, ...]
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        u, e = self.universals, self.existentials
        if len(set(u)) != len(u) or len(set(e)) != len(e):
            raise ModelError("duplicate variable in quantifier prefix")
        if set(u) & set(e):
            raise ModelError("universal and existential variables overlap")
        if any(v <= 0 for v in u + e):
            raise ModelError("variable ids must be positive")
        scope = set(u) | set(e)
        for cl in self.clauses:
            if len(cl) != 3:
                raise ModelError("every clause must have exactly 3 literals")
            for v, _pol in cl:
                if v not in scope:
                    raise ModelError(f"unquantified variable {v}")

    @cached_property
    def normalized(self) -> bool:
        """True iff every universal occurs both positively and negatively."""
        pos, neg = set(), set()
        for cl in self.clauses:
            for v, pol in cl:
                (pos if pol else neg).add(v)
        return all(u in pos and u in neg for u in self.universals)


@dataclass(frozen=True)
class Digraph:
    nodes: frozenset[str]
    edges: frozenset[tuple[str, str]]

    def __post_init__(self):
        for a, b in self.edges:
            if a not in self.nodes or b not in self.nodes:
                raise ModelError(f"edge ({a},{b}) uses an undeclared node")

    def sorted_nodes(self) -> list[str]:
        return sorted(self.nodes)

    def sorted_edges(self) -> list[tuple[str, str]]:
        return sorted(self.edges)


def digraph(edges: Iterable[tuple[str, str]], isolated: Iterable[str] = ()) -> Digraph:
    es = frozenset(edges)
    nodes = frozenset(x for e in es for x in e) | frozenset(isolated)
    return Digraph(nodes, es)


def is_weakly_connected(g: Digraph) -> bool:
    """True iff the underlying undirected graph is connected.

    Single nodes and the empty graph count as connected (the reductions
    reject an empty source graph separately).
    """
    if not g.nodes:
        return True
    adj: dict[str, set[str]] = {n: set() for n in g.nodes}
    for a, b in g.edges:
        adj[a].add(b)
        adj[b].add(a)
    start = next(iter(g.nodes))
    seen = {start}
    stack = [start]
    while stack:
        for m in adj[stack.pop()]:
            if m not in seen:
                seen.add(m)
                stack.append(m)
    return len(seen) == len(g.nodes)


Assignment = dict[int, bool]


def instances_isomorphic(a: Instance, b: Instance, fixed: Iterable[str]) -> bool:
    """Equality of two instances up to a bijective renaming of non-fixed constants.

    Constants in ``fixed`` must map to themselves; all others may be renamed
    bijectively.  Used to compare witness instances "up to fresh renaming".
    """
    fixed = set(fixed)
    if len(a) != len(b):
        return False
    ca = sorted(a.constants() - fixed)
    cb = sorted(b.constants() - fixed)
    if len(ca) != len(cb):
        return False
    bf = b.facts

    def apply(fact: Fact, m: dict[str, str]) -> Fact:
        return Fact(fact.predicate, tuple(m.get(x, x) for x in fact.args))

    def rec(i: int, m: dict[str, str], used: set[str]) -> bool:
        if i == len(ca):
            return all(apply(f, m) in bf for f in a.facts)
        for target in cb:
            if target in used:
                continue
            m[ca[i]] = target
            used.add(target)
            if rec(i + 1, m, used):
                return True
            used.discard(target)
            del m[ca[i]]
        return False

    return rec(0, {}, set())
