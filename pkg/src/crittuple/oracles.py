"""Independent brute-force ground truth.

Deliberately naive and structurally dissimilar from the main engine (no
shared search code), so agreement between the two is evidence rather than
tautology.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Optional

from .errors import GuardError
from .model import Assignment, Digraph, QbfFormula


@dataclass(frozen=True)
class QbfEvalResult:
    valid: bool
    failing: Optional[Assignment]
    extensions: Optional[dict[tuple[bool, ...], Assignment]]


def qbf_sigma_extension(phi: QbfFormula, sigma: Assignment) -> Optional[Assignment]:
    """A satisfying assignment of the existentials extending sigma, or None.

    Exhaustive over the 2^|existentials| inner assignments, in lexicographic
    order (False before True), so the returned extension is deterministic.
    """
    exist = phi.existentials
    for values in product((False, True), repeat=len(exist)):
        full = dict(sigma)
        full.update(zip(exist, values))
        if all(any(full[v] == pol for v, pol in cl) for cl in phi.clauses):
            return dict(zip(exist, values))
    return None


def eval_qbf(phi: QbfFormula, *, guard: int = 20) -> QbfEvalResult:
    """Exhaustive validity check of a forall-exists formula.

    Valid iff every assignment of the universals extends to one satisfying
    the matrix.  When invalid, returns the lexicographically least failing
    assignment; when valid, returns one satisfying extension per outer
    assignment.  Guarded to at most ``guard`` variables in total.
    """
    if len(phi.universals) + len(phi.existentials) > guard:
        raise GuardError(
            f"{len(phi.universals)}+{len(phi.existentials)} variables exceed "
            f"the evaluation guard of {guard}"
        )
    extensions: dict[tuple[bool, ...], Assignment] = {}
    for values in product((False, True), repeat=len(phi.universals)):
        sigma = dict(zip(phi.universals, values))
        ext = qbf_sigma_extension(phi, sigma)
        if ext is None:
            return QbfEvalResult(False, sigma, None)
        extensions[values] = ext
    return QbfEvalResult(True, None, extensions)


def graph_hom_oracle(g1: Digraph, g2: Digraph) -> Optional[dict[str, str]]:
    """Some edge-preserving map of nodes G1 -> G2, or None.

    Exhaustive enumeration in lexicographic node order with per-edge early
    rejection; the returned map is the lexicographically least.  Guarded to
    |nodes(G2)| ** |nodes(G1)| <= 10^7.
    """
    n1 = g1.sorted_nodes()
    n2 = g2.sorted_nodes()
    if len(n2) ** len(n1) > 10**7:
        raise GuardError(
            f"{len(n2)}^{len(n1)} maps exceed the graph oracle guard"
        )
    position = {v: i for i, v in enumerate(n1)}
    # edges whose later endpoint is at position i, for incremental checking
    edges_at: list[list[tuple[str, str]]] = [[] for _ in n1]
    for a, b in sorted(g1.edges):
        edges_at[max(position[a], position[b])].append((a, b))
    mapping: dict[str, str] = {}

    def rec(i: int) -> bool:
        if i == len(n1):
            return True
        for target in n2:
            mapping[n1[i]] = target
            if all(
                (mapping[a], mapping[b]) in g2.edges for a, b in edges_at[i]
            ) and rec(i + 1):
                return True
        mapping.pop(n1[i], None)
        return False

    if rec(0):
        return dict(mapping)
    return None
