import json

import pytest

from crittuple import cli

FIXTURE_QUERY = "R(?x,?y,?z,?z). R(?x,?x,?y,?y).\n"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def query_file(tmp_path):
    p = tmp_path / "fixture.query"
    p.write_text(FIXTURE_QUERY)
    return str(p)


def test_check_absolute(capsys, query_file):
    code, out, _ = run(
        capsys, "check", query_file, "R(a,a,b,b)", "--json", "--reproducible"
    )
    assert code == 0
    obj = json.loads(out)
    assert obj["schema"] == 1
    assert obj["critical"] is True
    assert obj["via_atom"] == 1
    assert obj["reason"] == "witness-found"
    assert sorted(obj["witness"]["hom"]) == ["x", "y", "z"]
    assert "R(a,a,b,b)" in obj["witness"]["instance"]
    assert "seconds" not in obj["stats"]


def test_check_relative_first_atom(capsys, query_file):
    code, out, _ = run(
        capsys,
        "check",
        query_file,
        "R(a,a,b,b)",
        "--atom-index",
        "0",
        "--reproducible",
    )
    assert code == 0
    obj = json.loads(out)
    assert obj["critical"] is False
    assert obj["reason"] == "exhausted"
    assert obj["relative_to"] == 0
    assert obj["witness"] is None


def test_check_missing_file(capsys):
    code, _, err = run(capsys, "check", "/nonexistent/q", "R(0)")
    assert code == 1
    assert "cannot read" in err


def test_check_bad_atom_index(capsys, query_file):
    code, _, err = run(capsys, "check", query_file, "R(a,a,b,b)", "--atom-index", "7")
    assert code == 1
    assert "out of range" in err


def test_check_bad_tuple(capsys, query_file):
    code, _, err = run(capsys, "check", query_file, "R(?x,a,b,b)")
    assert code == 1


def test_check_budget_exit(capsys, tmp_path):
    p = tmp_path / "taut.query"
    from crittuple.formats import print_query
    from crittuple.model import QbfFormula
    from crittuple.reductions import reduce_qbf

    out = reduce_qbf(QbfFormula((1,), (), (((1, True), (1, True), (1, False)),)))
    p.write_text(print_query(out.query))
    code, _, err = run(
        capsys, "check", str(p), "R(0,0,1,2)", "--atom-index", "0",
        "--max-nodes", "10",
    )
    assert code == 2
    assert "limit" in err or "budget" in err


def test_check_parallel(capsys, query_file):
    code, out, _ = run(
        capsys, "check", query_file, "R(a,a,b,b)", "--parallel", "--reproducible"
    )
    assert code == 0
    assert json.loads(out)["critical"] is True


def test_reduce_qbf(capsys, tmp_path):
    qdimacs = tmp_path / "phi.qdimacs"
    qdimacs.write_text("p cnf 2 1\na 1 0\ne 2 0\n1 -1 2 0\n")
    qf = tmp_path / "out.query"
    tf = tmp_path / "out.tuple"
    rf = tmp_path / "out.registry.json"
    code, out, _ = run(
        capsys,
        "reduce", "qbf", str(qdimacs),
        "--out-query", str(qf),
        "--out-tuple", str(tf),
        "--out-registry", str(rf),
        "--reproducible",
    )
    assert code == 0
    summary = json.loads(out)
    assert summary["atoms"] == 21
    assert tf.read_text().strip() == "R(0,0,1,2)"
    registry = json.loads(rf.read_text())
    assert registry["g_index"] == 0
    assert len(registry["clauses"]) == 1
    from crittuple.formats import parse_query

    q = parse_query(qf.read_text())
    assert len(q.atoms) == 21


def test_reduce_qbf_not_normalized(capsys, tmp_path):
    qdimacs = tmp_path / "phi.qdimacs"
    qdimacs.write_text("p cnf 2 1\na 1 0\ne 2 0\n1 2 2 0\n")
    code, _, err = run(capsys, "reduce", "qbf", str(qdimacs))
    assert code == 1
    assert "normalized" in err


def test_reduce_graphhom(capsys, tmp_path):
    g1 = tmp_path / "g1"
    g2 = tmp_path / "g2"
    g1.write_text("a b\n")
    g2.write_text("c d\n")
    qf = tmp_path / "g.query"
    code, out, _ = run(
        capsys,
        "reduce", "graphhom", str(g1), str(g2),
        "--out-query", str(qf),
        "--out-tuple", str(tmp_path / "g.tuple"),
        "--out-registry", str(tmp_path / "g.registry.json"),
        "--reproducible",
    )
    assert code == 0
    assert json.loads(out)["atoms"] == 5


def test_reduce_graphhom_disconnected(capsys, tmp_path):
    g1 = tmp_path / "g1"
    g2 = tmp_path / "g2"
    g1.write_text("a b\nc d\n")
    g2.write_text("e f\n")
    code, _, err = run(capsys, "reduce", "graphhom", str(g1), str(g2))
    assert code == 1
    assert "weakly connected" in err


def test_oracle_qbf(capsys, tmp_path):
    f = tmp_path / "phi.qdimacs"
    f.write_text("p cnf 2 2\na 1 0\ne 2 0\n1 2 2 0\n-1 -2 -2 0\n")
    code, out, _ = run(capsys, "oracle", "qbf", str(f), "--reproducible")
    assert code == 0
    obj = json.loads(out)
    assert obj["valid"] is True
    assert obj["failing_sigma"] is None


def test_oracle_qbf_invalid(capsys, tmp_path):
    f = tmp_path / "phi.qdimacs"
    f.write_text("p cnf 2 2\na 1 0\ne 2 0\n1 2 2 0\n1 -2 -2 0\n")
    code, out, _ = run(capsys, "oracle", "qbf", str(f), "--reproducible")
    obj = json.loads(out)
    assert obj["valid"] is False
    assert obj["failing_sigma"] == {"1": False}


def test_oracle_graphhom(capsys, tmp_path):
    g1 = tmp_path / "g1"
    g2 = tmp_path / "g2"
    g1.write_text("a b\nb c\nc a\n")
    g2.write_text("x y\ny x\n")
    code, out, _ = run(capsys, "oracle", "graphhom", str(g1), str(g2), "--reproducible")
    assert code == 0
    obj = json.loads(out)
    assert obj["exists"] is False
    assert obj["hom"] is None


def test_counterexample(capsys):
    code, out, _ = run(capsys, "counterexample", "--json", "--reproducible")
    assert code == 0
    obj = json.loads(out)
    assert obj["ok"] is True
    assert obj["verdicts"] == {
        "relative_to_first_atom": False,
        "relative_to_second_atom": True,
        "critical": True,
        "via_atom": 1,
    }
    assert obj["witness_matches_expected"] is True
    assert obj["witness"]["instance"]


def test_counterexample_detects_deviation(capsys, monkeypatch):
    from crittuple import cli as climod

    def broken(tau, query, g_index, **kw):
        from crittuple.criticality import Reason, SearchStats, Verdict

        return Verdict(False, Reason.EXHAUSTED, stats=SearchStats())

    monkeypatch.setattr(climod, "is_critical_relative", broken)
    code, out, err = run(capsys, "counterexample", "--reproducible")
    assert code == 3


def test_check_internal_verify_failure(capsys, monkeypatch, query_file):
    from crittuple import cli as climod

    def always_escape(query, instance, pin=None, **kw):
        return {"x": "a"}

    monkeypatch.setattr(climod, "find_hom", always_escape)
    code, _, err = run(capsys, "check", query_file, "R(a,a,b,b)")
    assert code == 3
    assert "invariant" in err


def test_crosscheck_qbf_reproducible_bytes(capsys):
    args = [
        "crosscheck", "qbf",
        "--max-universals", "1",
        "--max-existentials", "0",
        "--max-clauses", "1",
        "--seed", "7",
        "--reproducible",
    ]
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2
    obj = json.loads(out1)
    assert obj["status"] == "ok"
    assert obj["decider"]["disagreements"] == []
    assert obj["constructive"]["failures"] == []


def test_crosscheck_graphhom(capsys):
    code, out, _ = run(
        capsys, "crosscheck", "graphhom", "--max-cycle", "4", "--reproducible"
    )
    assert code == 0
    obj = json.loads(out)
    assert obj["status"] == "ok"
    assert obj["pairs"] == 9
    assert obj["agreements"] == 9


def test_crosscheck_budget_exit(capsys):
    code, out, _ = run(
        capsys,
        "crosscheck", "qbf",
        "--max-universals", "2",
        "--max-existentials", "1",
        "--max-clauses", "2",
        "--budget-seconds", "0.000001",
        "--reproducible",
    )
    assert code == 2
    assert json.loads(out)["status"] == "budget-exhausted-in-constructive"


def test_version(capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["--version"])
    assert e.value.code == 0
