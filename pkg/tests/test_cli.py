import io
import json
from contextlib import redirect_stderr, redirect_stdout

import pytest

from homogen.cli import main
from homogen.formats import parse_action, parse_group, parse_structure
from homogen.classd import is_in_class_d
from homogen.actions import action_preserves

KEYS = {"command", "inputs", "verdicts", "witnesses", "results", "exit_code", "timings"}


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, _ = run("--json", *argv)
    report = json.loads(out)
    assert report["exit_code"] == code
    return code, report


def test_check_exit_codes():
    assert run("check", "data:a4")[0] == 0
    code, out, _ = run("check", "data:remark_b")
    assert code == 1 and "loop" in out


def test_check_reads_files(tmp_path):
    p = tmp_path / "t.txt"
    p.write_text("structure T\nn 3\nR 0 1\nR 1 2\nR 2 0\nend\n")
    code, report = run_json("check", str(p))
    assert code == 0 and KEYS <= set(report)
    assert report["inputs"][str(p)].startswith("sha256:")


def test_input_errors():
    assert run("bogus")[0] == 2
    assert run("check", "/nonexistent/file.txt")[0] == 2
    assert run("check", "data:missing")[0] == 2
    code, report = run_json("check", "/nonexistent/file.txt")
    assert code == 2 and "error" in report


def test_malformed_file(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("structure X\nn 2\nR 0 7\nend\n")
    assert run("check", str(p))[0] == 2


def test_capacity_from_closure_cap(tmp_path, monkeypatch):
    p = tmp_path / "e.txt"
    p.write_text("structure E\nn 8\nend\n")
    monkeypatch.setenv("HOMOGEN_CLOSURE_CAP", "100")
    assert run("aut", str(p))[0] == 3


def test_counterexamples():
    code, report = run_json("counterexample", "remark")
    assert code == 0 and all(report["verdicts"].values())
    code, report = run_json("counterexample", "obstruction")
    assert code == 0 and report["verdicts"]["no_swap_automorphism"]


def test_aut_reports_group(tmp_path):
    code, report = run_json("aut", "data:remark_b", "--ultrahomogeneous")
    assert code == 0
    assert report["results"]["order"] == 4


def test_enumerate_count_and_sample():
    code, report = run_json("enumerate", "3", "--count-only")
    assert code == 0 and report["results"]["count"] == 26
    a = run_json("enumerate", "5", "--sample", "3", "--seed", "1")[1]
    b = run_json("enumerate", "5", "--sample", "3", "--seed", "1")[1]
    assert a["results"] == b["results"]
    assert run("enumerate", "6")[0] == 3


def test_build_emits_stages(tmp_path):
    out = tmp_path / "stages"
    code, report = run_json("build", "--seed", "data:a4", "--size-bound", "1",
                            "--emit-stages", str(out), "--verify-extension", "1")
    assert code == 0 and report["verdicts"]["extension_property_m0"]
    n = report["results"]["emitted"]
    G = parse_group((out / "group.grp").read_text())
    last = parse_structure((out / f"stage{n - 1}.txt").read_text())
    act = parse_action((out / f"stage{n - 1}.act").read_text(), G)
    assert last.n == report["results"]["stage_sizes"][-1]
    assert is_in_class_d(last).ok and action_preserves(act, last)


def test_build_budget_and_small_seed(tmp_path):
    assert run("build", "--seed", "data:a4", "--size-bound", "1", "--budget", "6")[0] == 3
    p = tmp_path / "c3.txt"
    p.write_text("structure C\nn 3\nR 0 1\nR 1 2\nR 2 0\nend\n")
    code, report = run_json("build", "--seed", str(p))
    assert code == 0 and report["results"]["route"] == "C6"
    assert report["results"]["group_order"] == 3
    # an undirected path has 2-cycles, so it is not a seed in D
    assert run("build", "--seed", "data:path3")[0] == 2


def test_build_on_group():
    assert run("build-on-group", "catalog:C6")[0] == 0
    assert run("build-on-group", "catalog:C2xC2")[0] == 1


def test_rado_and_extension_check():
    code, report = run_json("rado", "--seed", "data:path3", "-k", "1")
    assert code == 0 and report["results"]["sizes"] == [3, 11]
    assert run("rado", "--seed", "data:path3", "-k", "2", "--budget", "50")[0] == 3
    assert run("extension-check", "data:a4", "-s", "1")[0] == 0
    assert run("extension-check", "data:a4", "-s", "2")[0] == 1


def test_lemma_test_small():
    code, report = run_json("lemma-test", "--max-order", "4", "--max-points", "4",
                            "--catalog-order", "6")
    assert code == 0 and all(report["verdicts"].values())


@pytest.mark.parametrize("argv", [
    ["check", "data:a4"],
    ["enumerate", "3"],
    ["counterexample", "remark"],
])
def test_json_is_deterministic(argv):
    a = run_json(*argv)[1]
    b = run_json(*argv)[1]
    a.pop("timings"), b.pop("timings")
    assert a == b
