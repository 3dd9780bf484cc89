from klms.cli import (EXIT_CONFIG, EXIT_OK, _SELFCHECKS, main)


def test_theory_subcommand(capsys):
    assert main(["theory", "--alpha", "2", "--r", "0.75"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "step_exponent" in out and "-0.5" in out
    assert "optimal_region" in out


def test_theory_online(capsys):
    assert main(["theory", "--alpha", "4", "--r", "0.125", "--setting", "online"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "bias_dominated_constant_step" in out


def test_bernoulli_subcommand(capsys):
    assert main(["bernoulli", "--k", "2", "--x", "0"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "0.166666666667"


def test_bernoulli_bad_degree_is_config_error(capsys):
    assert main(["bernoulli", "--k", "99", "--x", "0"]) == EXIT_CONFIG


def test_simulate_writes_csv(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n_max = 60\nreplicates = 2\nn_checkpoints = 5\nmaster_seed = 3\n")
    out_csv = tmp_path / "out.csv"
    assert main(["simulate", "--config", str(cfg), "--out", str(out_csv)]) == EXIT_OK
    lines = out_csv.read_text().strip().split("\n")
    assert lines[0] == "n,replicate,excess_risk"
    assert len(lines) > 2


def test_simulate_unknown_key_exits_2(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("horizon = 60\n")
    assert main(["simulate", "--config", str(cfg)]) == EXIT_CONFIG
    assert "configuration error" in capsys.readouterr().err


def test_gamma_sweep_subcommand(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n_max = 60\nreplicates = 1\nn_checkpoints = 4\n")
    out_csv = tmp_path / "sweep.csv"
    code = main(["gamma-sweep", "--config", str(cfg), "--grid-min", "1",
                 "--grid-max", "12", "--grid-points", "3", "--out", str(out_csv)])
    assert code == EXIT_OK
    lines = out_csv.read_text().strip().split("\n")
    assert lines[0] == "n,best_gamma,mean_excess_risk"


def test_compare_subcommand(capsys):
    code = main(["compare", "--point", "4", "--n-max", "80", "--replicates", "1",
                 "--noise", "0.1"])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    for name in ("ours", "zhang", "ying_pontil", "tarres_yao"):
        assert name in out


def test_selfcheck_functions_individually():
    # the CLI selfcheck suites are the oracle-equivalence checks; run the
    # cheap ones here (the full set runs in the acceptance suite)
    by_name = {name: fn for name, fn in _SELFCHECKS}
    ok, detail = by_name["averaged coefficients vs brute force"]()
    assert ok, detail
    ok, detail = by_name["finite-dimensional vs expansion recursion"]()
    assert ok, detail
