import json

import pytest

from froglab.cli import EXIT_CENSORED, EXIT_CONFIG, EXIT_INFEASIBLE, main, parse_int_list, resolve
from froglab.errors import ConfigError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_passage_smoke(capsys):
    code, out, _ = run(capsys, "passage", "--seed", "7", "--d", "2", "--r", "0.8", "--target", "10,0")
    data = json.loads(out)
    assert code == 0 and data["schema"] == 1
    assert data["geodesic"][0] == [0, 0] and data["geodesic"][-1] == [10, 0]
    assert sum(data["hop_times"]) == data["value"]


def test_exact_q3_reports_fractions(capsys):
    code, out, _ = run(capsys, "exact", "q3", "--d", "2")
    data = json.loads(out)
    assert code == 0
    assert data["identity_2q3_eq_half_plus_delta2"] and data["two_q3_lt_1"]
    assert data["tau_shell_3"]["num"] == 1 and data["tau_shell_3"]["den"] == 8


def test_exact_prob_events(capsys):
    _, out, _ = run(capsys, "exact", "prob", "--event", "S", "--i", "2")
    assert json.loads(out)["probability"]["num"] == 3
    code, _, err = run(capsys, "exact", "prob", "--event", "tau-shell", "--m", "20", "--budget", "1000")
    assert code == EXIT_INFEASIBLE and "infeasible" in err
    code, _, _ = run(capsys, "exact", "recursion", "--n", "0", "--replicates", "10")
    assert code == EXIT_CONFIG


def test_config_file_and_overrides(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nr = 0.9\ntarget = 4,1\n")
    code, out, _ = run(capsys, "passage", "--config", str(cfg), "--target", "2,0")
    assert code == 0 and json.loads(out)["target"] == [2, 0]
    cfg.write_text("r = 0.9\nunknown_key = 3\n")
    code, _, err = run(capsys, "passage", "--config", str(cfg), "--target", "2,0")
    assert code == EXIT_CONFIG and "unknown_key" in err
    code, _, _ = run(capsys, "passage", "--target", "2,0", "--r", "1.4")
    assert code == EXIT_CONFIG


def test_dry_run_does_not_compute(capsys):
    code, out, _ = run(capsys, "sphere-decay", "--L", "1..12", "--replicates", "200000", "--dry-run")
    data = json.loads(out)
    assert code == 0 and data["searches"] == 200000


@pytest.mark.parametrize("argv", [["passage"], ["mu"], ["lipschitz"], ["influence"], ["russo"],
                                  ["delay-census"], ["sphere-decay"], ["tail", "--y", "20,0;30,0"],
                                  ["shape"], ["exact", "recursion"]])
def test_dry_run_every_subcommand(capsys, argv):
    code, out, _ = run(capsys, *argv, "--dry-run")
    assert code == 0 and json.loads(out)["searches"] > 0


def test_all_censored_exit(capsys):
    code, _, err = run(capsys, "mu", "--r", "0.3", "--x", "1,0", "--n", "3", "--replicates", "3",
                       "--c0-factor", "0.4")
    assert code == EXIT_CENSORED


def test_sphere_decay_artifacts_are_thread_independent(tmp_path, capsys):
    args = ["sphere-decay", "--L", "1..6", "--replicates", "400", "--seed", "3"]
    assert run(capsys, *args, "--threads", "1", "--out", str(tmp_path / "a"))[0] == 0
    assert run(capsys, *args, "--threads", "2", "--out", str(tmp_path / "b"))[0] == 0
    for name in ("result.json", "result.csv", "plot.svg"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    man = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert man["schema"] == 1 and man["subcommand"] == "sphere-decay"
    assert set(man["outputs"]) == {"result.json", "result.csv", "plot.svg"}
    csv_lines = (tmp_path / "a" / "result.csv").read_text().splitlines()
    assert csv_lines[0] == "L,p_hat,ci_low,ci_high,n" and csv_lines[1].startswith("1,1.0,")


def test_replay_reproduces_outputs(tmp_path, capsys):
    args = ["shape", "--t", "15", "--replicates", "3", "--seed", "2", "--out", str(tmp_path / "a")]
    assert run(capsys, *args)[0] == 0
    code, _, _ = run(capsys, "replay", str(tmp_path / "a" / "manifest.json"), "--threads", "2",
                     "--out", str(tmp_path / "b"))
    assert code == 0
    for name in ("result.json", "result.csv", "plot.svg"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_value_parsers():
    assert parse_int_list("3..6") == [3, 4, 5, 6]
    assert parse_int_list("2..10..4") == [2, 6, 10]
    assert parse_int_list("10,20") == [10, 20]
    with pytest.raises(ConfigError):
        parse_int_list("a..b")
    P = resolve("tail", {"y": "20,0;0,10"})
    assert P["y"] == [(20, 0), (0, 10)] and P["t"][0] == 20
