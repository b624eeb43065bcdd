import io
import json
from fractions import Fraction

import pytest

from cyclepoly.cli import EXIT_BUDGET, EXIT_INVALID, EXIT_OK, RunConfig, main
from cyclepoly.errors import InvalidInputError

from conftest import FIXTURES

PYRAMID = str(FIXTURES / "square_pyramid.json")


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def table(text):
    lines = text.strip().splitlines()
    header = lines[0].split("\t")
    return [dict(zip(header, line.split("\t"))) for line in lines[1:]]


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return _write


class TestGraph:
    def test_dot_order_3(self):
        code, text = run("graph", "-k", "3", "--format", "dot")
        assert code == EXIT_OK
        assert text.count("->") == 6
        node_lines = [l for l in text.splitlines() if "->" not in l and l.strip().startswith('"')]
        assert len(node_lines) == 2

    def test_json_order_4(self):
        code, text = run("graph", "-k", "4", "--format", "json")
        obj = json.loads(text)
        assert code == EXIT_OK
        assert len(obj["vertices"]) == 6 and len(obj["edges"]) == 24

    def test_text(self):
        code, text = run("graph", "-k", "2", "--format", "text")
        assert code == EXIT_OK and len(text.splitlines()) == 2

    def test_bad_k(self, capsys):
        code, _ = run("graph", "-k", "1")
        assert code == EXIT_INVALID
        assert "usage" in capsys.readouterr().err

    def test_missing_k_is_a_usage_error(self, capsys):
        assert run("graph")[0] == EXIT_INVALID


class TestPolytope:
    def test_dim(self):
        assert run("polytope", "-k", "3", "dim") == (EXIT_OK, "4\n")
        assert run("polytope", "-k", "4", "dim", "--verify") == (EXIT_OK, "18\n")

    def test_vertices_csv(self):
        code, text = run("polytope", "-k", "3", "vertices", "--format", "csv")
        assert code == EXIT_OK
        assert len(text.splitlines()) == 1 + 6

    def test_vertices_text_and_json(self):
        code, text = run("polytope", "-k", "3", "vertices", "--approx")
        assert code == EXIT_OK and len(text.splitlines()) == 6 and "approx" in text
        code, text = run("polytope", "-k", "3", "vertices", "--format", "json")
        obj = json.loads(text)
        assert obj["dim"] == 4 and len(obj["vertices"]) == 6
        assert all(isinstance(x, str) for row in obj["vertices"] for x in row.values())

    def test_fixture_graph(self):
        assert run("polytope", "--graph", PYRAMID, "dim") == (EXIT_OK, "3\n")
        code, text = run("polytope", "--graph", PYRAMID, "faces")
        assert code == EXIT_OK
        assert "dim 0: 5\ndim 1: 8\ndim 2: 5\n" in text

    def test_faces_json(self):
        code, text = run("polytope", "-k", "3", "faces", "--format", "json")
        assert code == EXIT_OK
        assert len(json.loads(text)["nodes"]) == 40

    def test_contains(self, write):
        inside = write("in.json", json.dumps({"132": "1/4", "213": "1/4", "123": "1/2"}))
        code, text = run("polytope", "-k", "3", "contains", "--vector", inside)
        assert code == EXIT_OK and text.startswith("inside\n")
        outside = write("out.csv", "123,132\n1/2,1/2\n")
        code, text = run("polytope", "-k", "3", "contains", "--vector", outside)
        assert code == EXIT_OK and text.startswith("outside: ")
        code, text = run("polytope", "-k", "3", "contains", "--vector", inside, "--format", "json")
        assert json.loads(text)["inside"] is True

    def test_contains_needs_vector(self):
        assert run("polytope", "-k", "3", "contains")[0] == EXIT_INVALID

    def test_bad_graph_file(self, write):
        assert run("polytope", "--graph", write("g.json", "[1,2"), "dim")[0] == EXIT_INVALID
        assert run("polytope", "--graph", "/nonexistent/graph.json", "dim")[0] == EXIT_INVALID

    def test_budgets(self):
        assert run("polytope", "-k", "4", "vertices", "--cycle-budget", "5")[0] == EXIT_BUDGET
        assert run("polytope", "-k", "4", "faces")[0] == EXIT_BUDGET
        assert run("polytope", "-k", "3", "faces", "--budget-edges", "0")[0] == EXIT_INVALID

    def test_deterministic(self):
        a = run("polytope", "-k", "4", "vertices", "--format", "csv")
        b = run("polytope", "-k", "4", "vertices", "--format", "csv")
        assert a == b


class TestSuperperm:
    @pytest.mark.parametrize("k,size", [(2, 3), (3, 8)])
    def test_sizes(self, k, size):
        code, text = run("superperm", "-k", str(k))
        assert code == EXIT_OK
        assert len(text.strip()) == size

    def test_out_of_range(self):
        assert run("superperm", "-k", "99")[0] == EXIT_INVALID


class TestConverge:
    def test_loop_target(self, write):
        target = write("t.json", json.dumps({"123": "1"}))
        code, text = run("converge", target, "-k", "3", "--sizes", "100", "1000")
        assert code == EXIT_OK
        rows = table(text)
        assert [int(r["size"]) for r in rows] == [100, 1000]
        for r, n in zip(rows, (100, 1000)):
            dev = Fraction(r["deviation"])
            assert dev <= Fraction(3, n)
            assert dev <= Fraction(r["bound"])

    def test_approx_column(self, write):
        target = write("t.csv", "123,321\n1/2,1/2\n")
        code, text = run("converge", target, "-k", "3", "--sizes", "50", "--approx")
        assert code == EXIT_OK
        assert table(text)[0].keys() == {"size", "deviation", "bound", "approx_deviation"}

    def test_mix_mode(self, write):
        classical = write("c.json", json.dumps({"permutation": "1", "block": "increasing"}))
        consecutive = write("s.json", json.dumps({"321": "1"}))
        code, text = run("converge", "-k", "3", "--sizes", "100", "2500", "--mix", classical, consecutive)
        assert code == EXIT_OK
        rows = table(text)
        assert len(rows) == 2
        for r in rows:
            assert Fraction(r["occ_deviation"]) <= Fraction(r["occ_bound"])
            assert Fraction(r["cocc_deviation"]) <= Fraction(r["cocc_bound"])
        assert Fraction(rows[1]["cocc_deviation"]) < Fraction(rows[0]["cocc_deviation"])

    def test_mix_mode_nontrivial_classical(self, write):
        classical = write("c.json", json.dumps({"permutation": "2413", "block": "decreasing"}))
        consecutive = write("s.json", json.dumps({"132": "1/2", "213": "1/2"}))
        code, text = run("converge", "-k", "3", "--sizes", "400", "--mix", classical, consecutive)
        assert code == EXIT_OK
        r = table(text)[0]
        assert Fraction(r["occ_deviation"]) <= Fraction(r["occ_bound"])
        assert Fraction(r["cocc_deviation"]) <= Fraction(r["cocc_bound"])

    def test_malformed_target(self, write, capsys):
        code, _ = run("converge", write("t.json", "{not json"), "-k", "3", "--sizes", "10")
        assert code == EXIT_INVALID
        assert "error" in capsys.readouterr().err

    def test_outside_target(self, write):
        target = write("t.json", json.dumps({"132": "1"}))
        assert run("converge", target, "-k", "3", "--sizes", "10")[0] == EXIT_INVALID

    def test_bad_classical_spec(self, write):
        classical = write("c.json", json.dumps({"block": "sideways"}))
        consecutive = write("s.json", json.dumps({"321": "1"}))
        assert run("converge", "-k", "3", "--sizes", "10", "--mix", classical, consecutive)[0] == EXIT_INVALID

    def test_deterministic(self, write):
        target = write("t.json", json.dumps({"123": "1/3", "132": "1/3", "213": "1/3"}))
        argv = ("converge", target, "-k", "3", "--sizes", "300")
        assert run(*argv) == run(*argv)


def test_run_config_validation():
    RunConfig(k=3).validate()
    with pytest.raises(InvalidInputError):
        RunConfig(k=1).validate()
    with pytest.raises(InvalidInputError):
        RunConfig(k=3, cycle_budget=0).validate()
