import json

import pytest

from rbl.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_xi_json(capsys):
    code, out, _ = run(capsys, "xi", "--mu", "1", "--d", "1.5")
    assert code == 0
    payload = json.loads(out)
    assert set(payload) == {"gamma", "tau0", "xi0", "xi1", "xi"}
    assert payload["xi"] > 0.0


def test_xi_csv(capsys):
    code, out, _ = run(capsys, "xi", "--mu", "1", "--d", "1.5",
                       "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "key,value"
    assert lines[1].startswith("gamma,")


def test_maximin_csv_stdout(capsys):
    code, out, _ = run(capsys, "maximin", "--mu", "1", "--d", "0.5",
                       "--m", "1,2,4")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "mu,d,m,objective,value,price,alpha,lower,upper"
    vals = [float(line.split(",")[4]) for line in lines[1:]]
    assert vals == sorted(vals)
    assert all(v <= 0.75 for v in vals)


def test_minimax_json(capsys):
    code, out, _ = run(capsys, "minimax", "--mu", "1", "--d", "0.5",
                       "--m", "1", "--format", "json")
    assert code == 0
    rows = json.loads(out)
    assert rows[0]["objective"] == "minimax"
    assert rows[0]["value"] == pytest.approx(0.60961179679779, abs=1e-6)


def test_ratio_row_schema(capsys):
    code, out, _ = run(capsys, "ratio", "--mu", "1", "--d", "0.5",
                       "--m", "2", "--eps", "0.1", "--grid", "64")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "mu,d,m,eps,gamma,objective,mode,value,lower,upper"
    cells = lines[1].split(",")
    assert cells[5] == "ratio" and cells[6] == "oracle"


def test_regret_auto_schedule(capsys):
    # m = 10000 puts the m^(-1/4) schedule at 0.1 for both knobs
    code, out, _ = run(capsys, "regret", "--mu", "1", "--d", "0.5",
                       "--m", "16", "--eps", "auto", "--gamma", "auto",
                       "--format", "json")
    assert code == 0
    row = json.loads(out)[0]
    assert row["eps"] == pytest.approx(16 ** -0.25)
    assert row["gamma"] == pytest.approx(16 ** -0.25)
    assert row["mode"] == "mu_upper"


@pytest.mark.parametrize("argv", [
    ("maximin", "--mu", "1", "--d", "3", "--m", "10"),        # infeasible set
    ("maximin", "--mu", "1", "--d", "0.5", "--m", "4,2"),     # not ascending
    ("maximin", "--mu", "1", "--d", "0.5", "--m", ""),        # empty list
    ("maximin", "--d", "0.5", "--m", "2"),                    # missing mu
    ("xi", "--mu", "1", "--d", "0.5"),                        # needs d > mu
    ("xi", "--mu", "1", "--d", "1.5", "--format", "tsv"),     # bad format
    ("concentration", "--mu", "1", "--d", "0.5", "--eps", "0.2", "--m", "50",
     "--n", "10000", "--member", "two_point:alpha=0.5"),      # seed missing
    ("concentration", "--mu", "1", "--d", "0.5", "--eps", "0.2", "--m", "50",
     "--n", "10000", "--seed", "1", "--member", "gaussian:s=1"),
    ("concentration", "--mu", "1", "--d", "0.5", "--eps", "0.2", "--m", "50",
     "--n", "10000", "--seed", "1", "--member", "two_point:0.5"),
    ("opt-oracle", "--mu", "1", "--d", "0.5", "--m", "2", "--alpha", "0.5,0.6,0.7"),
])
def test_validation_failures_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "error:" in err or err == ""


def test_env_overrides_file_flags_override_env(capsys, tmp_path, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("mu = 1\nd = 0.5\n")  # d = 0.5 would be rejected by xi
    monkeypatch.setenv("RBL_D", "1.5")   # env beats the file: run succeeds
    code, out, _ = run(capsys, "xi", "--config", str(cfg))
    assert code == 0
    assert json.loads(out)["gamma"] == pytest.approx(8.0 / 33.0)
    # an explicit flag beats the environment
    monkeypatch.setenv("RBL_D", "0.5")
    code2, out2, _ = run(capsys, "xi", "--config", str(cfg), "--d", "1.5")
    assert code2 == 0


def test_config_file_diagnostics(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("mu = 1\nwhat is this\n")
    code, _, err = run(capsys, "xi", "--config", str(cfg), "--d", "1.5")
    assert code == 2
    assert "bad.cfg:2" in err


def test_output_files_are_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        code, _, _ = run(capsys, "maximin", "--mu", "1", "--d", "0.5",
                         "--m", "1,2", "--out", str(path))
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_opt_oracle_json(capsys):
    code, out, _ = run(capsys, "opt-oracle", "--mu", "1", "--d", "0.5",
                       "--m", "2", "--alpha", "0.5")
    assert code == 0
    payload = json.loads(out)
    assert payload["revenue"] == pytest.approx(1.5)
    assert not payload["symmetric"]
    assert any(entry["bundle"] == [0, 1] for entry in payload["menu"])


def test_opt_oracle_csv_menu(capsys):
    code, out, _ = run(capsys, "opt-oracle", "--mu", "1", "--d", "0.5",
                       "--m", "2", "--alpha", "0.5", "--symmetric",
                       "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "bundle,price"


def test_concentration_subcommand(capsys):
    code, out, _ = run(capsys, "concentration", "--mu", "1", "--d", "0.5",
                       "--eps", "0.2", "--m", "200", "--n", "10000",
                       "--seed", "7", "--member", "two_point:alpha=0.5",
                       "--member",
                       "three_point:points=0+1+2,probs=0.25+0.5+0.25")
    assert code == 0
    payload = json.loads(out)
    assert payload["passed"] is True
    assert payload["m"] == 200


def test_concentration_pareto_member(capsys):
    code, out, _ = run(capsys, "concentration", "--mu", "1", "--d", "0.5",
                       "--eps", "0.2", "--m", "100", "--n", "10000",
                       "--seed", "3", "--member", "pareto:a=2",
                       "--optimize-t")
    assert code == 0
    payload = json.loads(out)
    assert payload["optimized_f"] <= 104.60
    assert payload["passed"] is True


def test_help_lists_subcommands(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0
    out = capsys.readouterr().out
    for name in ("maximin", "minimax", "ratio", "regret", "concentration",
                 "xi", "opt-oracle", "verify"):
        assert name in out
