"""crittuple: critical-tuple deciders for Boolean conjunctive queries.

Decides whether a tuple is critical (or critical relative to an atom) for
a Boolean conjunctive query, generates the two hardness-reduction
instances (from forall-exists 3SAT and from directed graph homomorphism),
executes the constructive witness/escape mappings of both reductions, and
cross-validates everything against independent brute-force oracles.
"""

from .criticality import (
    CandidateAssignment,
    Fresh,
    Reason,
    SearchStats,
    Verdict,
    brute_force_critical,
    candidate_assignments,
    is_critical,
    is_critical_relative,
)
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
    parse_instance,
    parse_qbf,
    parse_query,
    parse_tuple,
    print_digraph,
    print_instance,
    print_qbf,
    print_query,
    print_tuple,
)
from .homs import apply_hom, find_hom, unify_atom_tuple, verify_hom
from .kernel import available_backends, backend_name
from .model import (
    Assignment,
    Atom,
    Digraph,
    Fact,
    Instance,
    QbfFormula,
    Query,
    Term,
    const,
    digraph,
    instances_isomorphic,
    is_weakly_connected,
    var,
)
from .oracles import QbfEvalResult, eval_qbf, graph_hom_oracle, qbf_sigma_extension
from .reductions import (
    GraphReductionOutput,
    QbfReductionOutput,
    counterexample_fixture,
    graph_escape_map,
    graph_witness_map,
    normalize_qbf,
    qbf_escape_map,
    qbf_witness_map,
    reduce_graphhom,
    reduce_qbf,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
