import json

import pytest

from permubuf import cli, exact
from permubuf.model import counterexample_schedule, load_schedule, save_schedule, systematic_schedule


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def ce_file(tmp_path):
    return str(save_schedule(counterexample_schedule(), tmp_path / "ce.txt"))


def test_verify_table(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0
    assert "2374894/10! (0.654457)" in out
    assert "1716050/10!" in out and "FAIL" not in out
    assert out.rstrip().endswith("ALL CHECKS PASS")


def test_verify_json(capsys):
    code, out, _ = run(capsys, "verify", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["all_pass"]
    assert doc["p_numerators"][7:] == [2_374_894, 2_374_894, 1_716_050]
    assert doc["q_numerators"][7:] == [2_012_014, 2_160_343, 2_293_839]
    assert doc["relation_holds"] is False
    assert any(c["name"] == "OPT accepts all packets" and c["pass"] for c in doc["checks"])


def test_verify_byte_stable_across_threads(capsys):
    _, a, _ = run(capsys, "verify")
    _, b, _ = run(capsys, "verify", "--threads", "4")
    assert a == b


def test_verify_corrupted_constant_exits_one(capsys, monkeypatch):
    bad = {**exact.EXPECTED_TABLE, "p": {**exact.EXPECTED_TABLE["p"], 10: 1_716_051}}
    monkeypatch.setattr(exact, "EXPECTED_TABLE", bad)
    code, out, _ = run(capsys, "verify")
    assert code == 1 and "CHECK FAILURE" in out


def test_analyze_counterexample(capsys, ce_file):
    code, out, _ = run(capsys, "analyze", ce_file)
    assert code == 0 and "verdict: VIOLATED" in out


def test_analyze_shipped_file(capsys):
    from importlib.resources import files

    path = str(files("permubuf") / "data" / "counterexample.txt")
    code, out, _ = run(capsys, "analyze", path, "--json")
    assert code == 0 and json.loads(out)["verdict"] == "VIOLATED"


def test_analyze_systematic_equal(capsys, tmp_path):
    path = save_schedule(systematic_schedule(5), tmp_path / "s5.json")
    code, out, _ = run(capsys, "analyze", str(path), "--json")
    doc = json.loads(out)
    assert code == 0 and doc["verdict"] == "EQUAL" and doc["sum_p"] == doc["sum_q"]


def test_analyze_wrong_count_has_no_verdict(capsys, tmp_path):
    path = tmp_path / "x.txt"
    path.write_text("m=3\n0 0\n0 1\n0 2\n1 0\n")
    code, out, _ = run(capsys, "analyze", str(path))
    assert code == 0 and "verdict: N/A" in out


@pytest.mark.parametrize("body", ["m=0\n", "garbage\n", "m=2\n0 9\n"])
def test_analyze_bad_input_exit_two(capsys, tmp_path, body):
    path = tmp_path / "bad.txt"
    path.write_text(body)
    code, _, err = run(capsys, "analyze", str(path))
    assert code == 2 and err.startswith("error:")


def test_analyze_over_limit_exit_three(capsys, tmp_path):
    path = save_schedule(systematic_schedule(12), tmp_path / "s12.txt")
    code, _, err = run(capsys, "analyze", str(path))
    assert code == 3 and "limit" in err


def test_qtable(capsys):
    code, out, _ = run(capsys, "qtable", "--m", "10", "--json")
    assert code == 0 and json.loads(out)["q_numerators"][9] == 2_293_839
    code, out, _ = run(capsys, "qtable", "--m", "2")
    assert "1/2! (0.500000)" in out
    assert run(capsys, "qtable", "--m", "0")[0] == 2
    assert run(capsys, "qtable", "--m", "21")[0] == 3


def test_opt(capsys, ce_file):
    code, out, _ = run(capsys, "opt", ce_file)
    assert code == 0
    assert "accepted_count: 20 of 20" in out and "accepts_all_noninit: true" in out
    assert "1 -> 0" in out
    code, out, _ = run(capsys, "opt", ce_file, "--json")
    doc = json.loads(out)
    assert doc["accepted_count"] == 20 and len(doc["witness"]) == 10


def test_search_writes_violations(capsys, tmp_path):
    out_dir = tmp_path / "viol"
    code, out, _ = run(capsys, "search", "--m", "3", "--max-time", "4", "--json", "--out", str(out_dir))
    doc = json.loads(out)
    assert code == 0 and doc["violations"] == [] and doc["examined"] == 220
    code, out, _ = run(capsys, "search", "--m", "3", "--family", "systematic", "--canonical-labels")
    assert code == 0 and "violations: 0" in out


def test_search_refuses_over_budget(capsys):
    code, _, err = run(capsys, "search", "--m", "10", "--max-time", "10")
    assert code == 3 and "budget" in err
    code, _, _ = run(capsys, "search", "--m", "3", "--budget", "10")
    assert code == 3


def test_search_violation_files_load(capsys, tmp_path, monkeypatch):
    from permubuf import search

    ce = counterexample_schedule()
    monkeypatch.setattr(cli, "find_violations", lambda *a, **k: search.scan_schedules([ce]))
    out_dir = tmp_path / "v"
    code, out, _ = run(capsys, "search", "--m", "3", "--out", str(out_dir))
    assert code == 0 and "violations: 1" in out
    assert load_schedule(out_dir / "violation_0001.txt") == ce


def test_simulate(capsys, tmp_path):
    path = save_schedule(systematic_schedule(4), tmp_path / "s4.txt")
    code, out, _ = run(capsys, "simulate", str(path), "--trials", "2000", "--seed", "5", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["trials"] == 2000 and len(doc["accept_counts"]) == 4
    _, again, _ = run(capsys, "simulate", str(path), "--trials", "2000", "--seed", "5", "--json", "--threads", "3")
    assert again == out
    assert run(capsys, "simulate", str(path), "--trials", "0")[0] == 2


def test_gen(capsys, tmp_path):
    code, out, _ = run(capsys, "gen", "counterexample")
    assert code == 0 and out.startswith("m=10\n") and out.count("\n") == 21
    code, out, _ = run(capsys, "gen", "systematic", "--m", "3", "--json")
    assert json.loads(out) == systematic_schedule(3).to_json()
    target = tmp_path / "s.json"
    assert run(capsys, "gen", "systematic", "--m", "4", "--out", str(target))[0] == 0
    assert load_schedule(target) == systematic_schedule(4)
    assert run(capsys, "gen", "systematic")[0] == 2


def test_usage_error_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["bogus"])
    assert exc.value.code == 2


def test_threads_env_default(monkeypatch):
    monkeypatch.setenv("PERMUBUF_THREADS", "6")
    assert cli.build_parser().parse_args(["verify"]).threads == 6
    monkeypatch.setenv("PERMUBUF_THREADS", "junk")
    assert cli.build_parser().parse_args(["verify"]).threads == 1


def test_json_schedule_round_trip_via_cli(capsys, tmp_path):
    _, out, _ = run(capsys, "gen", "counterexample", "--json")
    path = tmp_path / "c.json"
    path.write_text(out)
    assert load_schedule(path) == counterexample_schedule()
