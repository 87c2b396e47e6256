from itertools import product

import pytest

from crittuple.criticality import is_critical, is_critical_relative
from crittuple.errors import PreconditionError
from crittuple.formats import parse_digraph
from crittuple.homs import find_hom, verify_hom
from crittuple.model import Atom, Fact, QbfFormula, var
from crittuple.crosschecks import directed_cycle
from crittuple.oracles import qbf_sigma_extension
from crittuple.reductions import (
    counterexample_fixture,
    graph_escape_map,
    graph_witness_map,
    normalize_qbf,
    qbf_escape_map,
    qbf_witness_map,
    reduce_graphhom,
    reduce_qbf,
)

TAUT = ((1, True), (1, True), (1, False))


def clause(*lits):
    return tuple(lits)


def test_normalize_adds_missing_polarity():
    phi = QbfFormula((1,), (2,), (clause((1, True), (2, True), (2, True)),))
    out = normalize_qbf(phi)
    assert out.clauses[-1] == TAUT
    assert len(out.clauses) == 2
    assert out.normalized


def test_normalize_noop_when_both_polarities():
    phi = QbfFormula(
        (1,),
        (2,),
        (
            clause((1, True), (2, True), (2, True)),
            clause((1, False), (2, True), (2, True)),
        ),
    )
    assert normalize_qbf(phi) is phi


def test_normalize_all_negative():
    phi = QbfFormula((1,), (), (clause((1, False), (1, False), (1, False)),))
    out = normalize_qbf(phi)
    assert out.clauses[-1] == TAUT
    assert out.normalized


def test_reduce_requires_normalized():
    phi = QbfFormula((1,), (2,), (clause((1, True), (2, True), (2, True)),))
    with pytest.raises(PreconditionError):
        reduce_qbf(phi)


def test_reduce_qbf_counts_one_clause():
    # one universal, one existential, one (normalized) clause: 2 + 3 + 16 atoms
    phi = QbfFormula((1,), (2,), (clause((1, True), (1, False), (2, True)),))
    assert phi.normalized
    out = reduce_qbf(phi)
    assert len(out.query.atoms) == 2 + 3 * 1 + 16 * 1 == 21
    assert out.tau == Fact("R", ("0", "0", "1", "2"))
    g = out.query.atoms[out.g_index]
    reg = out.registry
    assert g == Atom(
        "R",
        (
            var(reg["base"]["z"]),
            var(reg["base"]["z'"]),
            var(reg["base"]["y"]),
            var(reg["base"]["y'"]),
        ),
    )


def test_reduce_qbf_census_is_exact():
    # atom count 2 + 3|u| + 16m for every normalized formula, including
    # repeated-literal clauses such as the normalization clause itself
    cases = [
        QbfFormula((1,), (), (TAUT,)),
        QbfFormula((1,), (), (clause((1, True), (1, False), (1, False)),)),
        QbfFormula(
            (1, 2),
            (3,),
            (
                clause((1, True), (2, False), (3, False)),
                clause((1, False), (2, True), (3, True)),
            ),
        ),
    ]
    for phi in cases:
        out = reduce_qbf(phi)
        expected = 2 + 3 * len(phi.universals) + 16 * len(phi.clauses)
        assert len(out.query.atoms) == expected
        for entry in out.registry["clauses"]:
            assert len(entry["satisfying_atoms"]) == 7
            assert len(entry["backup_atoms"]) == 8
            # satisfying rows are a subset of backup rows on the value columns
            sat_rows = {
                out.query.atoms[i].args[:3] for i in entry["satisfying_atoms"]
            }
            backup_rows = {
                out.query.atoms[i].args[:3] for i in entry["backup_atoms"]
            }
            assert sat_rows < backup_rows


def test_display_golden_for_mixed_clause():
    """The worked 16-atom gadget for the clause u1 or not-u2 or not-v."""
    phi = normalize_qbf(
        QbfFormula((1, 2), (3,), (clause((1, True), (2, False), (3, False)),))
    )
    out = reduce_qbf(phi)
    reg = out.registry
    x1 = var(reg["universals"]["1"]["x_u"])
    x2 = var(reg["universals"]["2"]["x_not_u"])
    x3 = var(reg["existentials"]["3"]["x_v"])
    z, zp = var(reg["base"]["z"]), var(reg["base"]["z'"])
    s, sp = var(reg["base"]["s"]), var(reg["base"]["s'"])
    r, f, t = var(reg["base"]["r"]), var(reg["base"]["f"]), var(reg["base"]["t"])
    entry = reg["clauses"][0]
    pred = entry["predicate"]

    assert out.query.atoms[entry["clause_atom"]] == Atom(
        pred, (x1, x2, x3, r, r, z)
    )
    expected_sat_rows = {
        (f, f, f),
        (f, x2, f),
        (f, x2, t),
        (x1, f, f),
        (x1, f, t),
        (x1, x2, f),
        (x1, x2, t),
    }
    sat_atoms = {out.query.atoms[i] for i in entry["satisfying_atoms"]}
    assert sat_atoms == {
        Atom(pred, row + (z, zp, s)) for row in expected_sat_rows
    }
    backup_atoms = {out.query.atoms[i] for i in entry["backup_atoms"]}
    assert backup_atoms == {
        Atom(pred, row + (s, sp, s))
        for row in expected_sat_rows | {(f, f, t)}
    }
    # the falsifying assignment's row appears only among the backups
    falsifying = Atom(pred, (f, f, t) + (s, sp, s))
    assert falsifying in backup_atoms
    assert Atom(pred, (f, f, t) + (z, zp, s)) not in sat_atoms


def test_witness_map_bindings():
    phi = QbfFormula((1,), (), (TAUT,))
    out = reduce_qbf(phi)
    reg = out.registry["universals"]["1"]
    h, inst = qbf_witness_map(out, {1: False})
    assert h[reg["x_u"]] == "0"
    assert h[reg["y_u"]] == "1"
    assert h[reg["yp_u"]] == "2"
    assert h[reg["x_not_u"]] not in {"0", "1", "2"}
    h2, inst2 = qbf_witness_map(out, {1: True})
    assert h2[reg["x_not_u"]] == "0"
    assert h2[reg["yp_not_u"]] == "1"
    assert h2[reg["y_u"]] == "2"
    base = out.registry["base"]
    for sigma, (hh, ii) in ((False, (h, inst)), (True, (h2, inst2))):
        assert out.tau in ii
        assert hh[base["s"]] != hh[base["s'"]]
        assert (
            Fact("R", (hh[base["s"]], hh[base["s'"]], hh[base["p"]], hh[base["p"]]))
            in ii
        )
        assert verify_hom(hh, out.query, ii)


def test_witness_map_requires_total_sigma():
    phi = QbfFormula((1,), (), (TAUT,))
    out = reduce_qbf(phi)
    with pytest.raises(PreconditionError):
        qbf_witness_map(out, {})


def test_escape_map_valid_formula():
    phi = QbfFormula((1,), (), (TAUT,))
    out = reduce_qbf(phi)
    for value in (False, True):
        sigma = {1: value}
        h, inst = qbf_witness_map(out, sigma)
        ext = qbf_sigma_extension(phi, sigma)
        assert ext == {}
        hn = qbf_escape_map(out, h, sigma)
        assert verify_hom(hn, out.query, inst.without(out.tau))
        base = out.registry["base"]
        # the pinned atom escapes to the image of the (s, s', p, p) atom
        assert hn[base["z"]] == h[base["s"]]
        assert hn[base["r"]] == h[base["z"]]


def test_escape_map_preconditions():
    phi = QbfFormula(
        (1,), (2,), (clause((1, True), (1, False), (2, True)),)
    )
    out = reduce_qbf(phi)
    sigma = {1: False}
    h, inst = qbf_witness_map(out, sigma)
    with pytest.raises(PreconditionError):
        qbf_escape_map(out, h, {1: False})  # not total
    # not aligned: sigma says the positive-side atom maps to tau, h disagrees
    with pytest.raises(PreconditionError):
        qbf_escape_map(out, h, {1: True, 2: True})
    # not satisfying: build an unsatisfiable projection
    unsat = QbfFormula((1,), (2,), (clause((1, True), (1, False), (2, True)),
                                    clause((2, False), (2, False), (2, False)),
                                    clause((2, True), (2, True), (2, True))))
    out2 = reduce_qbf(unsat)
    h2, _ = qbf_witness_map(out2, sigma)
    with pytest.raises(PreconditionError):
        qbf_escape_map(out2, h2, {1: False, 2: True})


def test_escape_map_existential_routing():
    phi = QbfFormula((1,), (2,), (clause((1, True), (1, False), (2, True)),))
    out = reduce_qbf(phi)
    sigma = {1: False}
    h, inst = qbf_witness_map(out, sigma)
    base = out.registry["base"]
    xv = out.registry["existentials"]["2"]["x_v"]
    for v_value, target in ((True, base["t"]), (False, base["f"])):
        hn = qbf_escape_map(out, h, {1: False, 2: v_value})
        assert hn[xv] == h[target]
        assert verify_hom(hn, out.query, inst.without(out.tau))


def test_reduce_graphhom_edge_vs_edge():
    g1 = parse_digraph("a b\n")
    g2 = parse_digraph("c d\n")
    out = reduce_graphhom(g1, g2)
    assert out.tau == Fact("R", ("0", "1"))
    assert len(out.query.atoms) == 5
    names1, names2 = out.registry["g1"], out.registry["g2"]
    expected = {
        Atom("E", (var(names1["a"]), var(names1["b"]))),
        Atom("E", (var(names2["c"]), var(names2["d"]))),
        Atom("R", (var(names1["a"]), var("x"))),
        Atom("R", (var(names2["c"]), var(names2["c"]))),
        Atom("R", (var(names2["d"]), var(names2["d"]))),
    }
    assert set(out.query.atoms) == expected
    assert out.vstar == "a"


def test_reduce_graphhom_disjointifies_shared_nodes():
    g = parse_digraph("a b\n")
    out = reduce_graphhom(g, g)
    assert len(out.query.variables()) == 5  # 2 + 2 + x


def test_reduce_graphhom_preconditions():
    disconnected = parse_digraph("a b\nc d\n")
    with pytest.raises(PreconditionError):
        reduce_graphhom(disconnected, parse_digraph("e f\n"))
    with pytest.raises(PreconditionError):
        reduce_graphhom(parse_digraph(""), parse_digraph("e f\n"))


def test_graph_reduction_cycles():
    out32 = reduce_graphhom(directed_cycle(3, "a"), directed_cycle(2, "b"))
    assert is_critical(out32.tau, out32.query).critical is True
    out42 = reduce_graphhom(directed_cycle(4, "a"), directed_cycle(2, "b"))
    assert is_critical(out42.tau, out42.query).critical is False


def test_graph_witness_map():
    out = reduce_graphhom(parse_digraph("a b\n"), parse_digraph("c d\n"))
    h, inst = graph_witness_map(out)
    assert h[out.registry["g1"]["a"]] == "0"
    assert h["x"] == "1"
    assert len(inst) == 5
    assert out.tau in inst
    # no surviving R tuple starts at the image of a source-graph node
    rest = inst.without(out.tau)
    g1_values = {h[out.registry["g1"][v]] for v in ("a", "b")}
    for fact in rest:
        if fact.predicate == "R":
            assert fact.args[0] not in g1_values


def test_graph_escape_map():
    out = reduce_graphhom(parse_digraph("a b\n"), parse_digraph("c d\n"))
    h, inst = graph_witness_map(out)
    hn = graph_escape_map(out, h, {"a": "c", "b": "d"})
    assert verify_hom(hn, out.query, inst.without(out.tau))
    names2 = out.registry["g2"]
    for v in ("c", "d"):
        assert hn[names2[v]] == h[names2[v]]
    with pytest.raises(PreconditionError):
        graph_escape_map(out, h, {"a": "c", "b": "c"})  # edge not preserved
    with pytest.raises(PreconditionError):
        graph_escape_map(out, h, {"a": "c"})


def test_graph_self_loop_atoms_never_map_to_tau():
    out = reduce_graphhom(directed_cycle(2, "a"), directed_cycle(2, "b"))
    h, inst = graph_witness_map(out)
    for idx in out.registry["loop_atoms"]:
        atom = out.query.atoms[idx]
        image = Fact(atom.predicate, tuple(h[t.name] for t in atom.args))
        assert image != out.tau


def test_counterexample_fixture_shape():
    q, tau, g1, g2 = counterexample_fixture()
    assert len(q.atoms) == 2
    assert len(q.variables()) == 3
    assert tau == Fact("R", ("a", "a", "b", "b"))
    assert (g1, g2) == (0, 1)


def test_constructive_roundtrip_small_formulas():
    """Forward: escape maps verify for satisfiable projections; backward:
    no escape hom exists when the projection is unsatisfiable."""
    phi = QbfFormula(
        (1,),
        (2,),
        (
            clause((1, True), (2, True), (2, True)),
            clause((1, False), (2, False), (2, False)),
        ),
    )
    assert phi.normalized
    out = reduce_qbf(phi)
    for values in product((False, True), repeat=1):
        sigma = {1: values[0]}
        h, inst = qbf_witness_map(out, sigma)
        ext = qbf_sigma_extension(phi, sigma)
        assert ext is not None
        full = dict(sigma)
        full.update(ext)
        hn = qbf_escape_map(out, h, full)
        assert verify_hom(hn, out.query, inst.without(out.tau))

    unsat = QbfFormula(
        (1,),
        (),
        (
            clause((1, True), (1, True), (1, True)),
            clause((1, False), (1, False), (1, False)),
        ),
    )
    assert unsat.normalized
    out2 = reduce_qbf(unsat)
    for value in (False, True):
        h, inst = qbf_witness_map(out2, {1: value})
        assert qbf_sigma_extension(unsat, {1: value}) is None
        assert find_hom(out2.query, inst.without(out2.tau), deterministic=False) is None


def test_end_to_end_decider_vs_validity():
    valid = QbfFormula((1,), (), (TAUT,))
    out = reduce_qbf(valid)
    assert is_critical_relative(out.tau, out.query, out.g_index).critical is False
    invalid = QbfFormula(
        (1,),
        (),
        (
            clause((1, True), (1, True), (1, True)),
            clause((1, False), (1, False), (1, False)),
        ),
    )
    out2 = reduce_qbf(invalid)
    assert is_critical_relative(out2.tau, out2.query, out2.g_index).critical is True
