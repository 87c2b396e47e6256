import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crittuple.errors import GuardError
from crittuple.model import QbfFormula, digraph
from crittuple.crosschecks import directed_cycle
from crittuple.oracles import eval_qbf, graph_hom_oracle, qbf_sigma_extension
from crittuple.reductions import normalize_qbf


def test_eval_valid_two_clauses():
    # forall u exists v: (u|v|v) & (~u|~v|~v)
    phi = QbfFormula(
        (1,),
        (2,),
        (
            ((1, True), (2, True), (2, True)),
            ((1, False), (2, False), (2, False)),
        ),
    )
    res = eval_qbf(phi)
    assert res.valid
    assert res.extensions[(False,)] == {2: True}
    assert res.extensions[(True,)] == {2: False}


def test_eval_tautological_clause():
    phi = QbfFormula((1,), (), (((1, True), (1, True), (1, False)),))
    assert eval_qbf(phi).valid


def test_eval_invalid_least_failing():
    # forall u exists v: (u|v|v) & (u|~v|~v) fails exactly at u=false
    phi = QbfFormula(
        (1,),
        (2,),
        (
            ((1, True), (2, True), (2, True)),
            ((1, True), (2, False), (2, False)),
        ),
    )
    res = eval_qbf(phi)
    assert not res.valid
    assert res.failing == {1: False}
    assert res.extensions is None
    assert qbf_sigma_extension(phi, {1: True}) is not None
    assert qbf_sigma_extension(phi, {1: False}) is None


def test_eval_guard():
    universals = tuple(range(1, 22))
    clause = ((1, True), (2, True), (3, True))
    with pytest.raises(GuardError):
        eval_qbf(QbfFormula(universals, (), (clause,)))


@st.composite
def _qbfs(draw):
    nu = draw(st.integers(1, 3))
    nv = draw(st.integers(0, 2))
    universals = tuple(range(1, nu + 1))
    exist = tuple(range(nu + 1, nu + nv + 1))
    vs = universals + exist
    clauses = tuple(
        tuple((draw(st.sampled_from(vs)), draw(st.booleans())) for _ in range(3))
        for _ in range(draw(st.integers(1, 3)))
    )
    return QbfFormula(universals, exist, clauses)


@given(_qbfs())
@settings(max_examples=80, deadline=None)
def test_normalize_preserves_validity(phi):
    assert eval_qbf(phi).valid == eval_qbf(normalize_qbf(phi)).valid


def test_graph_oracle_cycles():
    c3 = directed_cycle(3)
    assert graph_hom_oracle(c3, c3) == {"v0": "v0", "v1": "v1", "v2": "v2"}
    assert graph_hom_oracle(c3, directed_cycle(2)) is None
    hom = graph_hom_oracle(directed_cycle(6), directed_cycle(3))
    assert hom is not None
    g3 = directed_cycle(3)
    for a, b in directed_cycle(6).edges:
        assert (hom[a], hom[b]) in g3.edges


def test_graph_oracle_lex_least():
    g1 = digraph([("a", "a")])
    g2 = digraph([("x", "x"), ("y", "y")])
    assert graph_hom_oracle(g1, g2) == {"a": "x"}


def test_graph_oracle_empty_cases():
    empty = digraph([])
    assert graph_hom_oracle(empty, directed_cycle(2)) == {}
    assert graph_hom_oracle(directed_cycle(2), empty) is None


def test_graph_oracle_guard():
    big1 = digraph([], isolated=[f"a{i}" for i in range(10)])
    big2 = digraph([], isolated=[f"b{i}" for i in range(10)])
    with pytest.raises(GuardError):
        graph_hom_oracle(big1, big2)


@st.composite
def _small_digraph(draw, prefix):
    n = draw(st.integers(1, 4))
    nodes = [f"{prefix}{i}" for i in range(n)]
    edges = set()
    for _ in range(draw(st.integers(0, 5))):
        edges.add((draw(st.sampled_from(nodes)), draw(st.sampled_from(nodes))))
    return digraph(edges, isolated=nodes)


@given(_small_digraph("a"), _small_digraph("b"), _small_digraph("c"))
@settings(max_examples=60, deadline=None)
def test_graph_oracle_composes(g1, g2, g3):
    h12 = graph_hom_oracle(g1, g2)
    h23 = graph_hom_oracle(g2, g3)
    if h12 is not None and h23 is not None:
        composite = {v: h23[h12[v]] for v in h12}
        for a, b in g1.edges:
            assert (composite[a], composite[b]) in g3.edges
        assert graph_hom_oracle(g1, g3) is not None
