from itertools import product

import pytest

from crittuple.criticality import (
    CandidateAssignment,
    Fresh,
    Reason,
    brute_force_critical,
    candidate_assignments,
    is_critical,
    is_critical_relative,
)
from crittuple.errors import BudgetExceededError, GuardError, ModelError
from crittuple.formats import parse_instance, parse_query, parse_tuple
from crittuple.homs import find_hom, unify_atom_tuple, verify_hom
from crittuple.model import Fact, Instance, instances_isomorphic
from crittuple.crosschecks import pair_corpus
from crittuple.reductions import counterexample_fixture


def canonicalize_map(values, named):
    relabel = {}
    out = []
    for v in values:
        if v in named:
            out.append(v)
        else:
            if v not in relabel:
                relabel[v] = Fresh(len(relabel) + 1)
            out.append(relabel[v])
    return tuple(out)


def brute_canonical_count(nvars, named):
    """Independent canonicalizer: enumerate all maps, canonicalize, count."""
    pool = list(named) + [f"w{i}" for i in range(1, nvars + 1)]
    seen = set()
    for values in product(pool, repeat=nvars):
        seen.add(canonicalize_map(values, set(named)))
    return len(seen)


def test_candidate_count_single_var_two_consts():
    q = parse_query("R(?x,?x)")
    tau = parse_tuple("R(0,1)")
    cands = list(candidate_assignments(q, {}, tau))
    assert len(cands) == 3
    values = {c.values[0] for c in cands}
    assert values == {"0", "1", Fresh(1)}


def test_candidate_count_pinned_fixture():
    q, tau, _, g2 = counterexample_fixture()
    pin = unify_atom_tuple(q.atoms[g2], tau)
    assert pin == {"x": "a", "y": "b"}
    cands = list(candidate_assignments(q, pin, tau))
    assert len(cands) == 3
    assert {c.values[0] for c in cands} == {"a", "b", Fresh(1)}


def test_candidate_count_two_vars_one_const():
    # golden pinned from the brute-force canonicalizer oracle: 5 classes
    q = parse_query("P(?x,?y)")
    tau = parse_tuple("P(0,0)")
    cands = list(candidate_assignments(q, {}, tau))
    assert len(cands) == 5
    assert len(cands) == brute_canonical_count(2, ["0"])
    expected = {
        ("0", "0"),
        ("0", Fresh(1)),
        (Fresh(1), "0"),
        (Fresh(1), Fresh(1)),
        (Fresh(1), Fresh(2)),
    }
    assert {c.values for c in cands} == expected


@pytest.mark.parametrize("nvars,named", [(1, ["0"]), (2, ["0", "1"]), (3, ["a"])])
def test_candidate_counts_match_brute_canonicalizer(nvars, named):
    from crittuple.model import Atom, Query, var

    q = Query([Atom("P", tuple(var(f"x{i}") for i in range(nvars)))])
    tau = Fact("P", tuple((named * nvars)[:nvars]))
    got = sum(1 for _ in candidate_assignments(q, {}, tau))
    assert got == brute_canonical_count(nvars, sorted(set(tau.args)))


def test_candidates_are_canonical_and_unique():
    q = parse_query("P(?x,?y,?z)")
    tau = parse_tuple("P(0,0,0)")
    seen = set()
    for c in candidate_assignments(q, {}, tau):
        assert c not in seen
        seen.add(c)
        # fresh indices appear in first-use order
        max_seen = 0
        for v in c.values:
            if isinstance(v, Fresh):
                assert v.index <= max_seen + 1
                max_seen = max(max_seen, v.index)


def test_candidate_materialize_avoids_collisions():
    c = CandidateAssignment(("x",), (Fresh(1),), ())
    assert c.materialize({"c1", "0"})["x"] == "cc1"


def test_candidate_assignments_custom_var_order():
    q = parse_query("P(?x,?y)")
    tau = parse_tuple("P(0,0)")
    reordered = list(candidate_assignments(q, {}, tau, var_order=["y", "x"]))
    assert len(reordered) == 5
    assert all(c.variables == ("y", "x") for c in reordered)
    with pytest.raises(ModelError):
        list(candidate_assignments(q, {}, tau, var_order=["x"]))
    with pytest.raises(ModelError):
        list(candidate_assignments(q, {"x": "zzz"}, tau))


def test_counterexample_verdicts():
    q, tau, g1, g2 = counterexample_fixture()
    first = is_critical_relative(tau, q, g1)
    assert first.critical is False
    assert first.reason is Reason.EXHAUSTED
    second = is_critical_relative(tau, q, g2)
    assert second.critical is True
    expected = Instance(
        [Fact("R", ("a", "b", "c", "c")), Fact("R", ("a", "a", "b", "b"))]
    )
    assert instances_isomorphic(second.witness[1], expected, {"a", "b"})
    absolute = is_critical(tau, q)
    assert absolute.critical is True
    assert absolute.via_atom == g2


def test_trivial_single_atom_critical():
    q = parse_query("R(?x)")
    tau = parse_tuple("R(0)")
    v = is_critical_relative(tau, q, 0)
    assert v.critical is True
    assert v.witness[1] == parse_instance("R(0)")
    assert is_critical(tau, q).critical is True


def test_pin_unsatisfiable_flagged():
    q = parse_query("R(?x,?x)")
    tau = parse_tuple("R(0,1)")
    v = is_critical(tau, q)
    assert v.critical is False
    assert v.reason is Reason.PIN_UNSATISFIABLE


def test_predicate_absent_from_query():
    q = parse_query("R(?x)")
    tau = parse_tuple("S(0)")
    v = is_critical(tau, q)
    assert v.critical is False
    assert v.reason is Reason.PIN_UNSATISFIABLE


def test_atom_index_validation():
    q = parse_query("R(?x)")
    with pytest.raises(ModelError):
        is_critical_relative(parse_tuple("R(0)"), q, 1)


def test_budget_exceeded_reports_stats():
    q, tau, _, g2 = counterexample_fixture()
    with pytest.raises(BudgetExceededError) as e:
        # impossible budget: the portfolio cannot even start
        is_critical_relative(tau, q, g2, max_nodes=-1)
    assert e.value.stats is not None


def test_brute_force_examples():
    q, tau, _, _ = counterexample_fixture()
    assert brute_force_critical(tau, q) is True
    assert brute_force_critical(parse_tuple("R(0,1)"), parse_query("R(?x,?x)")) is False
    with pytest.raises(GuardError):
        brute_force_critical(
            parse_tuple("R(0)"), parse_query("R(?a,?b,?c,?d,?e,?f,?g,?h,?i,?j)")
        )


def test_witness_reverification_runs():
    q, tau, _, g2 = counterexample_fixture()
    v = is_critical_relative(tau, q, g2)
    hom = v.witness_hom
    assert verify_hom(hom, q, v.witness[1])
    assert tau in v.witness[1]
    assert find_hom(q, v.witness[1].without(tau)) is None


def test_witness_shape_lemma_small():
    """Image-restricted search agrees with a direct search over all
    instances on a bounded domain, tau forced in."""

    def direct(tau, query, fresh_consts):
        consts = sorted(set(tau.args) | query.constants() | set(fresh_consts))
        arities = dict(query.arities)
        arities.setdefault(tau.predicate, tau.arity)
        other = [
            Fact(p, args)
            for p in sorted(arities)
            for args in product(consts, repeat=arities[p])
        ]
        other = [f for f in other if f != tau]
        from itertools import combinations

        from helpers import naive_hom

        max_size = len(query.atoms)  # witnesses need at most |atoms| tuples
        for k in range(0, max_size):
            for combo in combinations(other, k):
                inst = Instance(list(combo) + [tau])
                if naive_hom(query, inst) is not None and (
                    naive_hom(query, inst.without(tau)) is None
                ):
                    return True
        return False

    cases = [
        (parse_tuple("R(0,1)"), parse_query("R(?x,?y). R(?y,?x).")),
        (parse_tuple("R(0,0)"), parse_query("R(?x,?y). R(?y,?x).")),
        (parse_tuple("R(a,b)"), parse_query("R(?x,?x).")),
    ]
    for tau, q in cases:
        assert is_critical(tau, q).critical == direct(tau, q, ["w1", "w2"])


def test_oracle_agreement_small_corpus():
    pairs = pair_corpus(seed=1105, count=60)
    for tau, query in pairs:
        dec = is_critical(tau, query)
        assert dec.critical == brute_force_critical(tau, query)
        rel = [
            is_critical_relative(tau, query, g).critical
            for g in range(len(query.atoms))
        ]
        assert dec.critical == any(rel)
        if any(rel):
            assert dec.critical


def test_parallel_matches_sequential():
    q, tau, _, _ = counterexample_fixture()
    seq = is_critical(tau, q)
    par = is_critical(tau, q, parallel=True)
    assert par.critical == seq.critical
    assert par.via_atom == seq.via_atom
