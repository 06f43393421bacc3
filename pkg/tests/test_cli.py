import io
import json
import subprocess
import sys

import jsonschema
import pytest

from rieszsel import SCHEMAS
from rieszsel.cli import run


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def cli_json(*argv, code=0):
    rc, out, err = cli(*argv)
    assert rc == code, err
    data = json.loads(out)
    jsonschema.validate(data, SCHEMAS[str(argv[0])])
    return data


def test_energy(data_dir):
    d = cli_json("energy", data_dir / "six_taxa_metric.json", "--subset", "a,b,e", "-s", 1)
    assert abs(d["energy"] - 25 / 77) < 1e-9
    assert d["mpd"] == 7.0 and d["subset"] == ["a", "b", "e"]
    d = cli_json("energy", data_dir / "six_taxa_metric.json", "--subset", "0", "-s", 1)
    assert d["energy"] == 0.0 and d["mpd"] == "inf"


def test_solve_tree(data_dir, tmp_path):
    table = tmp_path / "t.csv"
    d = cli_json("solve-tree", data_dir / "six_taxa.json", "-k", 3, "-s", 1, "--table", table)
    assert abs(d["energy"] - 3 / 11) < 1e-9
    assert d["subset"] == ["a", "c", "e"]
    assert table.read_text().startswith("node,t,F,split\n")


def test_solve_tree_newick(tmp_path):
    f = tmp_path / "a.nwk"
    f.write_text("((a:3.5,b:3.5):2,(c:4,d:4):1.5,e:5.5,f:5.5);\n")
    d = cli_json("solve-tree", f, "-k", 3, "-s", 1)
    assert abs(d["energy"] - 3 / 11) < 1e-9


def test_brute(data_dir):
    d = cli_json("brute", data_dir / "six_taxa_metric.json", "-k", 3, "-s", 1)
    assert d["optimum"] == 0.272727272727 and len(d["witnesses"]) == 12
    d = cli_json("brute", data_dir / "six_taxa_metric.json", "-k", 3, "--mpd")
    assert d["optimum"] == 11.0


def test_brute_requires_s(data_dir):
    rc, _, err = cli("brute", data_dir / "six_taxa_metric.json", "-k", 3)
    assert rc == 1 and "-s" in err


def test_brute_cap(data_dir):
    rc, _, err = cli("brute", data_dir / "six_taxa_metric.json", "-k", 3, "-s", 1, "--cap", 5)
    assert rc == 3


def test_brute_validate_rejects_non_metric(tmp_path):
    f = tmp_path / "bad.json"
    f.write_text(json.dumps({"labels": ["a", "b", "c"], "dist": [[0, 5, 1], [5, 0, 1], [1, 1, 0]]}))
    rc, _, err = cli("brute", f, "-k", 2, "-s", 1, "--validate")
    assert rc == 1 and "triangle" in err


@pytest.mark.parametrize("method", ["dp", "search"])
def test_mpd_line(data_dir, method):
    d = cli_json("mpd-line", data_dir / "line.json", "-k", 3, "--method", method)
    assert d["value"] == 3.0 and sorted(d["xs"]) == [0.0, 3.0, 6.0]


def test_reduce_clique(data_dir, tmp_path):
    emit = tmp_path / "m.json"
    d = cli_json("reduce-clique", data_dir / "triangle.txt", "-k", 3, "-s", 1, "--verify", "--emit", emit)
    assert d["T"] == 1.5 and d["min_energy"] == 1.5 and d["equivalent"]
    assert json.loads(emit.read_text())["dist"][0][1] == 2.0


def test_reduce_clique_verify_cap(tmp_path):
    f = tmp_path / "g.txt"
    f.write_text("0 1\n")
    rc, _, _ = cli("reduce-clique", f, "-k", 3, "-s", 1, "-n", 13, "--verify")
    assert rc == 3


def test_reduce_gis(data_dir):
    d = cli_json("reduce-gis", data_dir / "planar.json", "--verify")
    assert d["s"] == 1.0 and d["T"] == 0.5 and d["separated"] and not d["trivial"]
    d = cli_json("reduce-gis", data_dir / "planar.json", "--delta", 0.5)
    assert d["trivial"] and d["answer"] is True


def test_large_s(data_dir):
    d = cli_json("large-s", data_dir / "six_taxa_metric.json", "-k", 3, "--verify")
    assert d["D_star"] == 11.0 and d["R"] == 8.0 and d["all_mpd_optimal"]


def test_bounds_ok_and_breach():
    d = cli_json("bounds", "-s", 3, "--layers", 4)
    assert d["ok"] and d["slack"] > 0
    d = cli_json("bounds", "-s", 4, "--layers", 8, code=2)
    assert not d["ok"] and d["measured"] > d["bound"]
    rc, _, err = cli("bounds", "-s", 2, "--layers", 3)
    assert rc == 1


def test_counterexample():
    d = cli_json("counterexample", "--seed", 0)
    assert d["found"] and d["dp_true"] - d["optimum"] > 1e-6
    d = cli_json("counterexample", "--budget", 5, "--k-max", 3)
    assert not d["found"] and d["optimum"] == "nan"


def test_validate(data_dir, tmp_path):
    d = cli_json("validate", data_dir / "six_taxa.json")
    assert d["kind"] == "tree" and d["valid"]
    d = cli_json("validate", data_dir / "tiny.json")
    assert d["kind"] == "metric" and d["valid"] and d["ultrametric"]
    f = tmp_path / "bad.json"
    f.write_text(json.dumps({"labels": ["a", "b", "c"], "dist": [[0, 5, 1], [5, 0, 1], [1, 1, 0]]}))
    d = cli_json("validate", f)
    assert not d["valid"] and d["violations"][0]["witness"] == [0, 2, 1]


def test_text_format_same_values(data_dir):
    rc, out, _ = cli("energy", data_dir / "six_taxa_metric.json", "--subset", "a,b,e", "-s", 1,
                     "--format", "text")
    assert rc == 0
    rows = dict(line.split(None, 1) for line in out.splitlines())
    assert rows["energy"] == "0.324675324675" and rows["mpd"] == "7.0"


def test_usage_errors(data_dir):
    assert cli()[0] == 1
    assert cli("energy", data_dir / "missing.json", "--subset", "a", "-s", 1)[0] == 1
    assert cli("energy", data_dir / "tiny.json", "--subset", "zz", "-s", 1)[0] == 1
    assert cli("solve-tree", data_dir / "six_taxa.json", "-k", 9, "-s", 1)[0] == 1
    assert cli("brute", data_dir / "tiny.json", "-k", 2, "-s", 1, "--threads", 0)[0] == 1


def test_stdin_and_entry_point(data_dir):
    text = (data_dir / "tiny.json").read_text()
    proc = subprocess.run(
        [sys.executable, "-m", "rieszsel", "energy", "-", "--subset", "p,q", "-s", "1"],
        input=text, capture_output=True, text=True, check=True,
    )
    assert json.loads(proc.stdout)["energy"] == 0.5
