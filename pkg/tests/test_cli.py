"""Golden tests for the command-line surface: exact bytes, exact exit codes."""

import json
import subprocess
import sys

import pytest

from snprlab.cli import main

TRIPLE_AB_C = "((a,b),c);"
TRIPLE_AC_B = "((a,c),b);"
RETIC_AB_C = "((a,(b)#H1),(#H1,c));"
TRIPLE_A_BC = "(a,(b,c));"
STACKED = "((((b)#H2)#H1,#H2),(#H1,a));"


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return str(p)
    return write


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_validate_counts(files, capsys):
    f = files("n.nwk", TRIPLE_AB_C)
    code, out, _ = run(capsys, "validate", f)
    assert code == 0
    assert out == "vertices\t6\nedges\t5\nleaves\t3\nreticulations\t0\n"


def test_validate_reports_file_and_position(files, capsys):
    f = files("bad.nwk", "((a,b),c;")
    code, out, err = run(capsys, "validate", f)
    assert code == 1
    assert out == ""
    assert "bad.nwk" in err and "position" in err


def test_tree_child_subcommand(files, capsys):
    good = files("good.nwk", RETIC_AB_C)
    code, out, _ = run(capsys, "tree-child", good)
    assert code == 0
    assert out.splitlines()[0] == "tree_child\ttrue"

    bad = files("bad.nwk", STACKED)
    code, out, _ = run(capsys, "tree-child", bad)
    assert code == 0
    assert out == ("tree_child\tfalse\nstacks\t1\n"
                   "sibling_reticulations\t1\nparallel_pairs\t0\n")


def test_iso_subcommand(files, capsys):
    a = files("a.nwk", TRIPLE_AB_C)
    b = files("b.nwk", TRIPLE_AC_B)
    assert run(capsys, "iso", a, a)[:2] == (0, "true\n")
    assert run(capsys, "iso", a, b)[:2] == (0, "false\n")


def test_neighbors_listing_is_deterministic(files, capsys):
    f = files("n.nwk", TRIPLE_AB_C)
    code, out, _ = run(capsys, "neighbors", f)
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 24
    assert lines[0] == "pm\t1>2\t1>5\t((a,b),c);"
    again = run(capsys, "neighbors", f)[1]
    assert again == out


def test_distance_on_isomorphic_inputs(files, capsys):
    a = files("a.nwk", TRIPLE_AB_C)
    b = files("b.nwk", TRIPLE_AB_C)
    code, out, _ = run(capsys, "distance", a, b, "--cap", "2")
    assert code == 0
    first, rest = out.split("\n", 1)
    assert first == "0"
    assert json.loads(rest)["moves"] == []


def test_distance_with_witness(files, capsys):
    a = files("a.nwk", TRIPLE_AB_C)
    b = files("b.nwk", TRIPLE_AC_B)
    code, out, _ = run(capsys, "distance", a, b)
    assert code == 0
    first, rest = out.split("\n", 1)
    assert first == "2"
    assert [m["kind"] for m in json.loads(rest)["moves"]] == ["pm"]


def test_mtc_subcommand(files, capsys):
    a = files("a.nwk", TRIPLE_AB_C)
    b = files("b.nwk", TRIPLE_AC_B)
    code, out, _ = run(capsys, "mtc", a, b)
    assert code == 0
    assert out.splitlines()[0] == "2"
    assert "# agreement witness: cut 1 + 1 = 2" in out
    assert "begin digraph" in out


def test_mtc_budget_exhaustion_exits_2(files, capsys):
    a = files("a.nwk", TRIPLE_AB_C)
    b = files("b.nwk", TRIPLE_AC_B)
    code, out, err = run(capsys, "mtc", a, b, "--budget", "1")
    assert code == 2
    assert out == ""
    assert "stopped after" in err


def test_bounds_golden_lines(files, capsys):
    a = files("a.nwk", TRIPLE_AB_C)
    b = files("b.nwk", TRIPLE_AC_B)
    assert run(capsys, "bounds", a, b)[1] == "1\t2\t2\ttrue\n"

    r = files("r.nwk", RETIC_AB_C)
    t = files("t.nwk", TRIPLE_A_BC)
    assert run(capsys, "bounds", r, t)[1] == "0.5\t1\t1\ttrue\n"
    assert run(capsys, "bounds", a, a)[1] == "0\t0\t0\ttrue\n"


def test_maf_subcommand(files, capsys):
    a = files("a.nwk", TRIPLE_AB_C)
    b = files("b.nwk", TRIPLE_AC_B)
    assert run(capsys, "maf", a, b)[:2] == (0, "1\n")
    r = files("r.nwk", RETIC_AB_C)
    code, _, err = run(capsys, "maf", a, r)
    assert code == 1
    assert "reticulations" in err


def test_gen_is_seeded(files, capsys):
    one = run(capsys, "gen", "--leaves", "4", "--retics", "1",
              "--count", "3", "--seed", "7")[1]
    two = run(capsys, "gen", "--leaves", "4", "--retics", "1",
              "--count", "3", "--seed", "7")[1]
    other = run(capsys, "gen", "--leaves", "4", "--retics", "1",
                "--count", "3", "--seed", "8")[1]
    assert one == two
    assert one != other
    assert len(one.splitlines()) == 3


def test_enumerate_small_space(files, capsys):
    code, out, _ = run(capsys, "enumerate", "--leaves", "3", "--retics", "1")
    assert code == 0
    assert len(out.splitlines()) == 24
    code, _, err = run(capsys, "enumerate", "--leaves", "9")
    assert code == 1
    assert err


def test_normalize_seq_roundtrip(files, tmp_path, capsys):
    a = files("a.nwk", TRIPLE_AB_C)
    b = files("b.nwk", TRIPLE_AC_B)
    wit = tmp_path / "wit.json"
    code, out, _ = run(capsys, "distance", a, b, "--out", str(wit))
    assert code == 0
    assert out == ""
    seq_file = tmp_path / "seq.json"
    seq_file.write_text(wit.read_text().split("\n", 1)[1], encoding="utf-8")
    code, out, _ = run(capsys, "normalize-seq", str(seq_file))
    assert code == 0
    assert json.loads(out)["format"] == "snprlab-moves-1"


def test_gap_search_budget_zero(capsys):
    code, out, _ = run(capsys, "gap-search", "--leaves", "4", "--retics", "1",
                       "--budget", "0")
    assert code == 0
    assert out == ""


def test_log_env_only_touches_stderr(files, capsys, monkeypatch):
    f = files("n.nwk", TRIPLE_AB_C)
    quiet = run(capsys, "neighbors", f)
    monkeypatch.setenv("SNPRLAB_LOG", "1")
    loud = run(capsys, "neighbors", f)
    assert loud[1] == quiet[1]
    assert "24 neighbors" in loud[2]
    assert quiet[2] == ""


def test_console_entry_point(files, tmp_path):
    a = tmp_path / "a.nwk"
    a.write_text(TRIPLE_AB_C, encoding="utf-8")
    b = tmp_path / "b.nwk"
    b.write_text(TRIPLE_AC_B, encoding="utf-8")
    proc = subprocess.run([sys.executable, "-m", "snprlab.cli",
                           "bounds", str(a), str(b)],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == "1\t2\t2\ttrue\n"
