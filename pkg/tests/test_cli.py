"""End-to-end command tests, run in process through main(argv).

Exit codes under test: 0 ok, 2 found/violation, 3 parameters,
4 budget, 5 I/O.  Results and certificates must be single JSON lines
on stdout; logs must stay on stderr.
"""

import json

import pytest

from qturan.cli import ExitStatus, PatternSpec, main
from qturan.errors import ParameterError
from qturan.hypergraphs import Hypergraph, load_hypergraph, save_hypergraph
from qturan.patterns import generate_I, generate_Q


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv("QTURAN_BUDGET", raising=False)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert out.count("\n") == 1, f"want one stdout line, got {out!r}"
    return code, json.loads(out), err


class TestPatternSpec:
    def test_parse_forms(self):
        sp = PatternSpec.parse("qkr:5:3")
        assert (sp.kind, sp.k, sp.r) == ("q", 5, 3)
        sp = PatternSpec.parse("ik:4:2")
        assert (sp.kind, sp.k, sp.i) == ("i", 4, 2)
        sp = PatternSpec.parse("bes:3:6:3")
        assert (sp.kind, sp.v, sp.e) == ("bes", 6, 3)
        sp = PatternSpec.parse("file:/tmp/x.hg")
        assert sp.kind == "file" and sp.path == "/tmp/x.hg"

    def test_parse_rejects(self):
        for bad in ("qkr:5", "qkr:a:b", "i:4:2", "bes:3:6", ""):
            with pytest.raises(ParameterError):
                PatternSpec.parse(bad)

    def test_member_shapes(self):
        assert PatternSpec.parse("qkr:4:3").member() == generate_Q(4, 3)
        assert PatternSpec.parse("ik:4:1").member() == generate_I(4, 1)
        with pytest.raises(ParameterError):
            PatternSpec.parse("bes:3:6:2").member()


class TestConstruct:
    def test_modular_with_verify(self, capsys, tmp_path):
        out = str(tmp_path / "mod.hg")
        code, doc, err = run_json(
            capsys, "construct", "modular", "--k", "3", "--p", "5",
            "--out", out, "--verify")
        assert code == ExitStatus.OK
        assert doc == {"family": "modular", "n": 15, "k": 3, "edges": 10,
                       "out": out, "verified": True}
        assert "wrote 10 edges" in err
        h = load_hypergraph(out)
        assert h.m == 10 and h.meta is None
        side = json.loads((tmp_path / "mod.hg.meta.json").read_text())
        assert side["construction"] == "modular" and side["S"] == [0, 1]

    def test_modular_goodset_choices(self, capsys, tmp_path):
        out = str(tmp_path / "m.json")
        code, doc, _ = run_json(
            capsys, "construct", "modular", "--k", "3", "--p", "19",
            "--goodset", "behrend", "--out", out)
        assert code == ExitStatus.OK
        h = load_hypergraph(out)
        assert h.meta["goodset_provenance"] == "behrend"

    def test_split_json_embeds_meta(self, capsys, tmp_path):
        out = str(tmp_path / "split.json")
        code, doc, _ = run_json(
            capsys, "construct", "split", "--n", "12", "--k", "4", "--r", "3",
            "--out", out, "--verify")
        assert code == ExitStatus.OK and doc["edges"] == 45
        h = load_hypergraph(out)
        assert h.meta["construction"] == "split"
        assert not (tmp_path / "split.json.meta.json").exists()

    def test_star(self, capsys, tmp_path):
        out = str(tmp_path / "star.hg")
        code, doc, _ = run_json(
            capsys, "construct", "star", "--n", "7", "--k", "3",
            "--out", out, "--verify")
        assert code == ExitStatus.OK and doc["edges"] == 15

    def test_lift_from_artifact(self, capsys, tmp_path):
        base = str(tmp_path / "base.hg")
        save_hypergraph(Hypergraph(n=6, k=3, edges=((0, 1, 2), (3, 4, 5))),
                        base)
        out = str(tmp_path / "lift.hg")
        code, doc, _ = run_json(
            capsys, "construct", "lift", "--r", "3", "--base", base,
            "--n2", "3", "--out", out, "--verify")
        assert code == ExitStatus.OK and doc["edges"] == 6

    def test_lift_rejects_bad_base(self, capsys, tmp_path):
        base = str(tmp_path / "bad.hg")
        save_hypergraph(generate_I(3, 2), base)
        out = str(tmp_path / "never.hg")
        code, doc, _ = run_json(
            capsys, "construct", "lift", "--r", "3", "--base", base,
            "--n2", "3", "--out", out)
        assert code == ExitStatus.FOUND
        assert doc["certificate"] == [0, 1]
        assert "tight pair" in doc["error"]

    def test_bad_parameters(self, capsys, tmp_path):
        code, out, err = run(
            capsys, "construct", "modular", "--k", "3", "--p", "9",
            "--out", str(tmp_path / "x.hg"))
        assert code == ExitStatus.PARAM and out == ""
        assert "parameter:" in err


class TestCheck:
    @pytest.fixture()
    def modular_artifact(self, tmp_path, capsys):
        out = str(tmp_path / "m.hg")
        main(["construct", "modular", "--k", "3", "--p", "5", "--out", out])
        capsys.readouterr()
        return out

    def test_q_free_holds(self, capsys, modular_artifact):
        code, doc, _ = run_json(capsys, "check", "q-free",
                                "--in", modular_artifact,
                                "--pattern", "qkr:3:3")
        assert code == ExitStatus.OK
        assert doc == {"free": True, "pattern": "Q:3:3", "edges": 10}

    def test_q_free_finds_copy(self, capsys, tmp_path):
        path = str(tmp_path / "q.hg")
        save_hypergraph(generate_Q(4, 3), path)
        code, doc, _ = run_json(capsys, "check", "q-free", "--in", path,
                                "--pattern", "qkr:4:3")
        assert code == ExitStatus.FOUND
        assert doc["pattern"] == "Q:4:3" and doc["edges"] == [0, 1, 2]

    def test_q_free_wants_q_spec(self, capsys, modular_artifact):
        code, _, err = run(capsys, "check", "q-free", "--in", modular_artifact,
                           "--pattern", "ik:3:2")
        assert code == ExitStatus.PARAM and "qkr" in err

    def test_i_free_both_ways(self, capsys, tmp_path, modular_artifact):
        code, doc, _ = run_json(capsys, "check", "i-free",
                                "--in", modular_artifact, "--pattern", "ik:3:2")
        assert code == ExitStatus.OK and doc["free"] is True
        path = str(tmp_path / "i.hg")
        save_hypergraph(generate_I(3, 2), path)
        code, doc, _ = run_json(capsys, "check", "i-free", "--in", path,
                                "--pattern", "ik:3:2")
        assert code == ExitStatus.FOUND
        assert doc["edges"] == [0, 1]
        assert doc["members"] == [[0, 1, 2], [0, 1, 3]]

    def test_goodset_good(self, capsys):
        code, doc, _ = run_json(capsys, "check", "goodset", "--p", "11",
                                "--k", "3", "--set", "0,1")
        assert code == ExitStatus.OK
        assert doc == {"good": True, "p": 11, "k": 3, "S": [0, 1]}

    def test_goodset_bad(self, capsys):
        code, doc, _ = run_json(capsys, "check", "goodset", "--p", "11",
                                "--k", "3", "--set", "0,1,2")
        assert code == ExitStatus.FOUND
        assert doc["good"] is False
        assert len(doc["m"]) == 3 and len(doc["s"]) == 3

    def test_goodset_malformed_set(self, capsys):
        code, _, err = run(capsys, "check", "goodset", "--p", "11",
                           "--k", "3", "--set", "0,x")
        assert code == ExitStatus.PARAM and "integers" in err

    def test_audit_pass_and_fail(self, capsys, tmp_path, modular_artifact):
        code, doc, _ = run_json(capsys, "check", "audit",
                                "--in", modular_artifact)
        assert code == ExitStatus.OK and doc["pass"] is True
        path = str(tmp_path / "bad.hg")
        save_hypergraph(generate_I(3, 2), path)
        code, doc, _ = run_json(capsys, "check", "audit", "--in", path)
        assert code == ExitStatus.FOUND and doc["pass"] is False

    def test_missing_file(self, capsys, tmp_path):
        code, out, err = run(capsys, "check", "q-free",
                             "--in", str(tmp_path / "nope.hg"),
                             "--pattern", "qkr:3:3")
        assert code == ExitStatus.IO and out == ""

    def test_corrupt_file(self, capsys, tmp_path):
        path = tmp_path / "c.hg"
        path.write_text("3 10 1\n0 1\n")
        code, out, err = run(capsys, "check", "q-free", "--in", str(path),
                             "--pattern", "qkr:3:3")
        assert code == ExitStatus.IO and "parse:" in err


class TestSearch:
    def test_packing_greedy(self, capsys):
        code, doc, _ = run_json(capsys, "search", "packing", "--n", "7",
                                "--r", "3", "--t", "2")
        assert code == ExitStatus.OK
        assert doc["exact"] is False and doc["size"] == 7
        assert len(doc["edges"]) == 7

    def test_packing_exact_with_artifact(self, capsys, tmp_path):
        out = str(tmp_path / "pack.json")
        code, doc, _ = run_json(capsys, "search", "packing", "--n", "6",
                                "--r", "3", "--t", "2", "--exact",
                                "--out", out)
        assert code == ExitStatus.OK and doc["size"] == 4
        h = load_hypergraph(out)
        assert h.m == 4 and h.meta["packing"] == [6, 3, 2]

    def test_goodset(self, capsys):
        code, doc, _ = run_json(capsys, "search", "goodset", "--p", "13",
                                "--k", "3")
        assert code == ExitStatus.OK
        assert doc["S"] == [0, 1, 4] and doc["provenance"] == "exact"

    def test_apfree(self, capsys):
        code, doc, _ = run_json(capsys, "search", "apfree", "--n", "9",
                                "--k", "3")
        assert code == ExitStatus.OK and doc["A"] == [1, 2, 4, 8, 9]

    def test_turan(self, capsys):
        code, doc, _ = run_json(capsys, "search", "turan", "--n", "6",
                                "--k", "3", "--forbid", "qkr:3:3",
                                "--forbid", "ik:3:2")
        assert code == ExitStatus.OK
        assert doc["max_edges"] == 2 and doc["family"] == "Q:3:3+I:3:2"

    def test_turan_span_family(self, capsys):
        code, doc, _ = run_json(capsys, "search", "turan", "--n", "6",
                                "--k", "3", "--forbid", "bes:3:4:2")
        assert code == ExitStatus.OK
        assert doc["max_edges"] == 4 and doc["family"] == "bes:3:4:2"

    def test_turan_file_pattern(self, capsys, tmp_path):
        path = str(tmp_path / "pat.hg")
        save_hypergraph(generate_Q(3, 3), path)
        code, doc, _ = run_json(capsys, "search", "turan", "--n", "6",
                                "--k", "3", "--forbid", "file:" + path)
        assert code == ExitStatus.OK and doc["max_edges"] == 10

    def test_budget_env_flags_result(self, capsys, monkeypatch):
        monkeypatch.setenv("QTURAN_BUDGET", "1")
        code, doc, _ = run_json(capsys, "search", "turan", "--n", "6",
                                "--k", "3", "--forbid", "qkr:3:3")
        assert code == ExitStatus.BUDGET
        assert doc["budget_hit"] is True

    def test_budget_flag_beats_env(self, capsys, monkeypatch):
        monkeypatch.setenv("QTURAN_BUDGET", "1")
        code, doc, _ = run_json(capsys, "search", "turan", "--n", "6",
                                "--k", "3", "--forbid", "qkr:3:3",
                                "--budget", "100000")
        assert code == ExitStatus.OK and doc["max_edges"] == 10

    def test_budget_error_exit(self, capsys):
        code, out, err = run(capsys, "search", "goodset", "--p", "17",
                             "--k", "3", "--budget", "2")
        assert code == ExitStatus.BUDGET and "budget:" in err

    def test_bad_env_budget(self, capsys, monkeypatch):
        monkeypatch.setenv("QTURAN_BUDGET", "soon")
        code, _, err = run(capsys, "search", "apfree", "--n", "9", "--k", "3")
        assert code == ExitStatus.PARAM and "QTURAN_BUDGET" in err

    def test_threads_validation(self, capsys):
        code, _, err = run(capsys, "search", "packing", "--n", "7", "--r", "3",
                           "--t", "2", "--threads", "0")
        assert code == ExitStatus.PARAM
        code, doc, err = run_json(capsys, "search", "packing", "--n", "7",
                                  "--r", "3", "--t", "2", "--threads", "4")
        assert code == ExitStatus.OK and "single-threaded" in err

    def test_bad_pattern_spec(self, capsys):
        code, _, err = run(capsys, "search", "turan", "--n", "6", "--k", "3",
                           "--forbid", "qkr:3")
        assert code == ExitStatus.PARAM and "pattern spec" in err


class TestTable:
    def test_modular_growth_stdout(self, capsys):
        code, out, _ = run(capsys, "table", "modular-growth", "--k", "4",
                           "--ns", "20,30")
        assert code == ExitStatus.OK
        lines = out.strip().split("\n")
        assert lines[0] == "n,k,param,edges,reference"
        assert lines[1].startswith("20,4,5,")
        assert lines[2].startswith("28,4,7,")

    def test_split_growth_to_file(self, capsys, tmp_path):
        out = str(tmp_path / "split.csv")
        code, stdout, err = run(capsys, "table", "split-growth", "--k", "4",
                                "--r", "3", "--ns", "12,14", "--out", out)
        assert code == ExitStatus.OK and stdout == ""
        lines = open(out).read().strip().split("\n")
        assert len(lines) == 3 and lines[1] == "12,4,3,45,1728"

    def test_density(self, capsys):
        code, out, _ = run(capsys, "table", "density", "--k", "3",
                           "--forbid", "qkr:3:3", "--ns", "4,5,6")
        assert code == ExitStatus.OK
        lines = out.strip().split("\n")
        assert lines[0] == "n,k,edges,ratio,certified"
        assert lines[1] == "4,3,4,1,true"
        assert lines[3] == "6,3,10,1/2,true"

    def test_chain(self, capsys):
        code, doc, _ = run_json(capsys, "table", "chain", "--n", "5",
                                "--k", "4")
        assert code == ExitStatus.OK and doc["ok"] is True

    def test_unparseable_ns(self, capsys):
        code, _, err = run(capsys, "table", "modular-growth", "--k", "4",
                           "--ns", "20;30")
        assert code == ExitStatus.PARAM


class TestTopLevel:
    def test_no_arguments(self, capsys):
        code, out, err = run(capsys)
        assert code == ExitStatus.PARAM and out == ""

    def test_unknown_subcommand(self, capsys):
        code, _, _ = run(capsys, "destroy")
        assert code == ExitStatus.PARAM
