import json
import math

import pytest

from ptame import io
from ptame.cli import EXIT_BUDGET, EXIT_FINDING, EXIT_OK, EXIT_USAGE, JobConfig, main, run
from ptame.constructions.mimick import nagata_factorization
from ptame.ffield import ctx_for


def call(capsys, *argv):
    status = main(list(argv))
    out = capsys.readouterr().out
    return status, json.loads(out) if out.lstrip().startswith("{") else out


def test_orbits(capsys):
    status, rep = call(capsys, "orbits", "--q", "2", "--m", "2", "--n", "3")
    assert status == EXIT_OK and rep["r"]["2"] == 28 and rep["schema_version"] == 1


def test_index_report(capsys):
    status, rep = call(capsys, "index", "--q", "2", "--m", "2", "--n", "3")
    assert status == EXIT_OK
    assert rep["bound"] == 8 and rep["index"] == 4


def test_index_finding_exit_status():
    status, rep = run(JobConfig("index", 3, 2, 3))
    assert status == EXIT_FINDING and rep["index"] == 4
    assert "2" in rep["finding"][0]


def test_usage_errors(capsys):
    status, rep = call(capsys, "orbits", "--q", "6", "--m", "1", "--n", "1")
    assert status == EXIT_USAGE and rep["error"] == "usage"
    status, _ = call(capsys, "orbits", "--q", "2")
    assert status == EXIT_USAGE
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == EXIT_USAGE
    status, rep = call(capsys, "mover", "--q", "2", "--m", "2", "--n", "3", "--r", "2,0,0", "--s", "3,0,0",
                       "--u", "2,1,0")
    assert status == EXIT_USAGE


def test_budget(capsys):
    status, rep = call(capsys, "group", "--q", "5", "--m", "2", "--n", "3")
    assert status == EXIT_BUDGET and rep["error"] == "budget"


def test_mma_and_group(capsys):
    status, rep = call(capsys, "mma", "--q", "2", "--m", "2", "--n", "2")
    assert status == EXIT_OK and int(rep["mma_order"]) == 24 * 46080
    status, rep = call(capsys, "group", "--q", "2", "--m", "1", "--n", "2")
    assert status == EXIT_OK and rep["order"] == "24" and rep["orbit_action_verdict"] == "Sym"


def test_sign_table_has_no_mismatch(capsys):
    status, rep = call(capsys, "sign-table", "--qs", "2,3", "--ms", "2")
    assert status == EXIT_OK and len(rep["rows"]) == 6


def test_three_cycle_and_zeta(capsys):
    status, rep = call(capsys, "three-cycle", "--q", "2", "--m", "2", "--n", "3")
    assert status == EXIT_OK and rep["cycle_type"] == {"3": 1, "1": 25} and rep["moved"] == rep["expected"]
    status, rep = call(capsys, "zeta", "--q", "2", "--m", "2", "--n", "3", "--d", "2", "--i", "0", "--j", "1")
    assert status == EXIT_OK and rep["verified"]
    status, _ = call(capsys, "zeta", "--q", "2", "--m", "2", "--n", "3", "--d", "2", "--i", "0", "--j", "0")
    assert status == EXIT_USAGE


def test_mover(capsys):
    status, rep = call(capsys, "mover", "--q", "2", "--m", "2", "--n", "3",
                       "--r", "2,0,0", "--s", "2,1,0", "--u", "3,1,1")
    assert status == EXIT_OK and rep["verified"] and rep["cases"][0].startswith("pivot")


def test_nagata(capsys):
    status, rep = call(capsys, "nagata", "--q", "3", "--m", "1", "--bsgs")
    assert status == EXIT_OK and rep["equal"] and rep["in_tame_image"]


def test_interp(capsys):
    status, rep = call(capsys, "interp", "--q", "2", "--m", "2", "--alpha", "2")
    assert status == EXIT_OK and rep["poly"]


def test_perm_and_mimick_files(capsys, tmp_path):
    ctx = ctx_for(3, 1)
    path = tmp_path / "nz.jsonl"
    io.write_generator_lines(path, nagata_factorization(ctx))
    status, rep = call(capsys, "mimick", "--word", str(path), "--g", "Z")
    assert status == EXIT_OK and rep["agrees"] and rep["checked_values"] == 2
    bare = tmp_path / "bare.jsonl"
    bare.write_text("\n".join(path.read_text().splitlines()[1:]) + "\n")
    status, _ = call(capsys, "mimick", "--word", str(bare), "--g", "Z")
    assert status == EXIT_USAGE
    from ptame.polymap import Swap, TameWord
    wpath = tmp_path / "w.jsonl"
    io.write_words(wpath, [TameWord(ctx_for(2, 2), 3, [Swap(1)])])
    status, rep = call(capsys, "perm", "--q", "2", "--m", "2", "--n", "3", "--word", str(wpath))
    assert status == EXIT_OK and rep["perms"][0]["point_sign"] == 1


def test_profinite(capsys):
    status, rep = call(capsys, "profinite", "--q", "2", "--count", "3")
    assert status == EXIT_OK and rep["compatible"] == 3


def test_table_output_and_report_file(capsys, tmp_path):
    out = tmp_path / "r.json"
    status, text = call(capsys, "mma", "--q", "3", "--m", "1", "--n", "1", "--table", "--out", str(out))
    assert status == EXIT_OK and "mma_order: 6" in text
    assert json.loads(out.read_text())["mma_order"] == str(math.factorial(3))


def test_deterministic_output(capsys):
    a = call(capsys, "profinite", "--q", "2", "--count", "4", "--seed", "3")
    b = call(capsys, "profinite", "--q", "2", "--count", "4", "--seed", "3")
    assert a == b


def test_accept_only_filter(capsys):
    status = main(["accept", "--only", "mma"])
    cap = capsys.readouterr()
    rep = json.loads(cap.out)
    assert status == EXIT_OK and rep["all_passed"]
    assert {r["criterion"] for r in rep["results"]} == {"mma"}
    assert "PASS" in cap.err
