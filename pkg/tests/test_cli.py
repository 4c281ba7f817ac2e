import json

import pytest

from hypermatch import complete, format_graph, parse_graph
from hypermatch.cli import main


def run(capsys, *argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        import io
        import sys

        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestGen:
    def test_hknm(self, capsys):
        code, out = run(capsys, "gen", "--family", "hknm", "--n", "9", "--k", "3", "--m", "3")
        assert code == 0
        H = parse_graph(out)
        assert H.n == 9 and len(H.edges) == 49

    def test_complete(self, capsys):
        code, out = run(capsys, "gen", "--family", "complete", "--n", "6", "--k", "3")
        assert code == 0 and len(parse_graph(out).edges) == 20

    def test_random_seeded_reproducible(self, capsys):
        a = run(capsys, "gen", "--family", "random", "--n", "8", "--k", "3", "--p", "1/2", "--seed", "3")
        b = run(capsys, "gen", "--family", "random", "--n", "8", "--k", "3", "--p", "1/2", "--seed", "3")
        assert a == b

    def test_join_from_stdin(self, capsys, monkeypatch):
        base = format_graph(complete(5, 3))
        code, out = run(
            capsys, "gen", "--family", "join", "--r", "2", stdin=base, monkeypatch=monkeypatch
        )
        assert code == 0
        assert parse_graph(out).n == 7

    def test_parity_and_barrier(self, capsys):
        code, out = run(capsys, "gen", "--family", "parity", "--n", "6", "--k", "3", "--m", "3")
        assert code == 0 and len(parse_graph(out).edges) == 10
        code, out = run(capsys, "gen", "--family", "barrier", "--n", "6", "--k", "3")
        assert code == 0 and len(parse_graph(out).edges) == 10


class TestSolvers:
    def test_nu(self, capsys, monkeypatch):
        text = format_graph(complete(6, 3))
        code, out = run(capsys, "nu", stdin=text, monkeypatch=monkeypatch)
        assert code == 0
        assert out.splitlines()[0] == "nu 2"

    def test_nu_budget_exit_code(self, capsys, monkeypatch):
        from hypermatch import build_Hknm

        text = format_graph(build_Hknm(12, 3, 4)[0])
        code, out = run(capsys, "nu", "--budget", "2", stdin=text, monkeypatch=monkeypatch)
        assert code == 2 and "indeterminate" in out

    def test_frac(self, capsys, monkeypatch):
        text = format_graph(complete(5, 3))
        code, out = run(capsys, "frac", "--witness", stdin=text, monkeypatch=monkeypatch)
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "nu' 5/3" and lines[1] == "tau' 5/3"

    def test_contain(self, capsys, monkeypatch):
        from hypermatch import build_Hknm

        text = format_graph(build_Hknm(9, 3, 3)[0])
        code, out = run(
            capsys, "contain", "--m", "3", "--eps", "0", "--theta", "1/10",
            stdin=text, monkeypatch=monkeypatch,
        )
        assert code == 0
        rep = json.loads(out)
        assert rep["satisfied"] is True and rep["deficiency"] == 0
        assert rep["bad"] == []

    def test_nibble(self, capsys, monkeypatch):
        text = format_graph(complete(24, 3))
        code, out = run(capsys, "nibble", "--seed", "5", stdin=text, monkeypatch=monkeypatch)
        assert code == 0
        assert out.startswith("covered ")

    def test_pipeline_trace(self, capsys, monkeypatch):
        text = format_graph(complete(12, 3))
        code, out = run(
            capsys, "pipeline", "--m", "3", "--eta", "1/12", stdin=text, monkeypatch=monkeypatch
        )
        assert code == 0
        records = [json.loads(line) for line in out.splitlines()]
        assert records[0]["step"] == "summary" and records[0]["value"] == "13/3"

    def test_pipeline_step_failure_exit_code(self, capsys, monkeypatch):
        text = format_graph(parse_graph("3 12\n"))
        code, out = run(
            capsys, "pipeline", "--m", "3", stdin=text, monkeypatch=monkeypatch
        )
        assert code == 1
        assert any(json.loads(l)["status"] == "failed" for l in out.splitlines())


class TestVerifySearchReport:
    def test_verify_small_grid(self, capsys):
        code, out = run(capsys, "verify", "--ks", "3", "--n-max", "7")
        assert code == 0
        header = json.loads(out.splitlines()[0])
        assert header["record"] == "report" and header["experiment"] == "tightness"

    def test_search_and_reformat(self, capsys, monkeypatch, tmp_path):
        code, out = run(
            capsys, "search", "--n", "9", "--k", "3", "--m", "2", "--trials", "10", "--seed", "1"
        )
        assert code == 0
        path = tmp_path / "search.records"
        path.write_text(out)
        code2, rows = run(capsys, "report", "--input", str(path), "--format", "rows")
        assert code2 == 0
        assert rows.splitlines()[0].startswith("delta1")

    def test_help_documents_budget_env(self, capsys):
        with pytest.raises(SystemExit):
            main(["--help"])
        out = capsys.readouterr().out
        assert "HYPERMATCH_NODE_BUDGET" in out
