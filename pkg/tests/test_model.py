import pytest

from crittuple.errors import ModelError
from crittuple.model import (
    Atom,
    Digraph,
    Fact,
    Instance,
    QbfFormula,
    Query,
    const,
    digraph,
    instances_isomorphic,
    is_weakly_connected,
    var,
)


def test_query_dedups_and_keeps_order():
    a1 = Atom("R", (var("x"), var("y")))
    a2 = Atom("R", (var("y"), var("x")))
    q = Query([a1, a2, a1])
    assert q.atoms == (a1, a2)
    assert q.variables() == ("x", "y")


def test_query_requires_atoms():
    with pytest.raises(ModelError):
        Query([])


def test_query_arity_conflict():
    with pytest.raises(ModelError):
        Query([Atom("R", (var("x"),)), Atom("R", (var("x"), var("y")))])


def test_instance_arity_conflict():
    with pytest.raises(ModelError):
        Instance([Fact("R", ("0",)), Fact("R", ("0", "1"))])


def test_instance_set_semantics():
    i = Instance([Fact("R", ("a", "b")), Fact("R", ("a", "b"))])
    assert len(i) == 1
    assert Fact("R", ("a", "b")) in i
    assert len(i.without(Fact("R", ("a", "b")))) == 0


def test_query_constants_and_vars():
    q = Query([Atom("R", (var("x"), const("0"), var("x")))])
    assert q.constants() == {"0"}
    assert q.variables() == ("x",)


def test_qbf_validation():
    with pytest.raises(ModelError):
        QbfFormula((1, 1), (), ())
    with pytest.raises(ModelError):
        QbfFormula((1,), (1,), ())
    with pytest.raises(ModelError):
        QbfFormula((1,), (2,), (((3, True), (1, True), (1, False)),))
    with pytest.raises(ModelError):
        QbfFormula((1,), (), (((1, True), (1, False)),))


def test_qbf_normalized_flag():
    both = QbfFormula((1,), (), (((1, True), (1, True), (1, False)),))
    assert both.normalized
    only_pos = QbfFormula((1,), (2,), (((1, True), (2, True), (2, False)),))
    assert not only_pos.normalized
    no_universals = QbfFormula((), (1,), (((1, True), (1, False), (1, True)),))
    assert no_universals.normalized


def test_digraph_validation():
    with pytest.raises(ModelError):
        Digraph(frozenset({"a"}), frozenset({("a", "b")}))
    g = digraph([("a", "b")], isolated=["c"])
    assert g.nodes == {"a", "b", "c"}


@pytest.mark.parametrize(
    "edges,isolated,expected",
    [
        ([("a", "b"), ("b", "c"), ("c", "a")], [], True),  # directed 3-cycle
        ([("a", "b"), ("c", "d")], [], False),  # two disjoint edges
        ([], ["a"], True),  # single node, no edges
        ([], [], True),  # empty graph, by convention
        ([("a", "b")], ["c"], False),
    ],
)
def test_is_weakly_connected(edges, isolated, expected):
    assert is_weakly_connected(digraph(edges, isolated)) is expected


def test_instances_isomorphic_fresh_renaming():
    a = Instance([Fact("R", ("a", "b", "c", "c")), Fact("R", ("a", "a", "b", "b"))])
    b = Instance([Fact("R", ("a", "b", "d", "d")), Fact("R", ("a", "a", "b", "b"))])
    assert instances_isomorphic(a, b, {"a", "b"})
    # a named constant in place of the fresh one is not a renaming
    c = Instance([Fact("R", ("a", "b", "a", "a")), Fact("R", ("a", "a", "b", "b"))])
    assert not instances_isomorphic(a, c, {"a", "b"})
    assert not instances_isomorphic(c, a, {"a", "b"})


def test_instances_isomorphic_requires_bijection():
    a = Instance([Fact("E", ("u", "v"))])
    b = Instance([Fact("E", ("w", "w"))])
    assert not instances_isomorphic(a, b, set())
    assert instances_isomorphic(a, b, set()) == instances_isomorphic(b, a, set())
