import pytest

from wardensim.cli import main
from wardensim.experiments import read_csv


def test_channels_list(capsys):
    assert main(["channels", "list"]) == 0
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    assert lines[0] == "id,name,field,mode,params"
    assert len(lines) == 51
    assert lines[1].startswith("0,v4-reserved-flag,")


def test_channels_list_to_file(tmp_path, capsys):
    path = tmp_path / "catalog.csv"
    assert main(["channels", "list", "--out", str(path)]) == 0
    assert capsys.readouterr().out == ""
    assert path.read_text().splitlines()[0] == "id,name,field,mode,params"


def test_outdir_env_var(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("WARDENSIM_OUTDIR", str(tmp_path / "results"))
    assert main(["channels", "list", "--out", "catalog.csv"]) == 0
    assert (tmp_path / "results" / "catalog.csv").exists()


def test_trial_row_shape(capsys):
    code = main(["trial", "--warden", "dynamic", "--rd", "0.4", "--fr", "2",
                 "--target", "50", "--seed", "1"])
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("seed,status,completion_time,")
    cells = lines[1].split(",")
    assert cells[0] == "1"
    assert cells[1] == "ok"
    assert float(cells[2]) > 0


def test_trial_output_is_byte_identical(capsys):
    argv = ["trial", "--warden", "dynamic", "--rd", "0.3", "--fr", "5",
            "--target", "40", "--seed", "7"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    second = capsys.readouterr().out
    assert first == second


def test_trial_timeout_exit_code(capsys):
    code = main(["trial", "--warden", "regular", "--rr", "1.0",
                 "--target", "5", "--seed", "1"])
    assert code == 2
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[1].split(",")[1] == "timeout"


def test_trial_trace(tmp_path, capsys):
    trace = tmp_path / "events.csv"
    code = main(["trial", "--warden", "none", "--target", "10", "--seed", "2",
                 "--trace", str(trace)])
    assert code == 0
    rows = trace.read_text().splitlines()
    assert rows[0] == "time,actor,event,detail"
    assert any(",cs,announce," in r for r in rows)


def test_trial_scenario_file(tmp_path, capsys):
    scenario = tmp_path / "scen.txt"
    scenario.write_text("warden = none\ntarget = 12\n")
    code = main(["trial", "--scenario", str(scenario), "--seed", "3"])
    assert code == 0
    out = capsys.readouterr().out
    assert out.splitlines()[1].split(",")[1] == "ok"


def test_sweep_writes_csv(tmp_path):
    path = tmp_path / "sweep.csv"
    code = main(["sweep", "--rd", "0.4", "--fr", "2,5", "--trials", "2",
                 "--target", "40", "--seed", "5", "--out", str(path)])
    assert code == 0
    rows = read_csv(str(path))
    assert [r.f_r for r in rows] == [2.0, 5.0]
    assert all(r.r_d == 0.4 for r in rows)
    assert all(r.trials == 2 for r in rows)


def test_sweep_stdout(capsys):
    code = main(["sweep", "--rd", "0.2", "--fr", "1", "--trials", "1",
                 "--target", "30", "--seed", "5"])
    assert code == 0
    out = capsys.readouterr().out
    assert out.startswith("scenario,f_R,R_D,")


def test_table1_tiny(tmp_path):
    path = tmp_path / "table1.csv"
    code = main(["table1", "--trials", "1", "--targets", "40",
                 "--seed", "3", "--out", str(path)])
    assert code == 0
    rows = read_csv(str(path))
    assert [r.label for r in rows] == ["V1", "V2", "V3", "V4"]


def test_usage_error_exits_1(capsys):
    with pytest.raises(SystemExit) as err:
        main(["trial", "--no-such-flag"])
    assert err.value.code == 1


def test_unknown_subcommand_exits_1(capsys):
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 1


def test_accept_reports_each_criterion(capsys):
    # tiny trial count: checks the report format and exit code contract,
    # not the thresholds themselves (those run in test_acceptance)
    code = main(["accept", "--trials", "2", "--seed", "1"])
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    assert len(lines) == 11
    assert all(line.split()[0].startswith("C") for line in lines[:10])
    assert ("PASS" in lines[0]) or ("FAIL" in lines[0])
    assert lines[-1].endswith("criteria passed")
    assert code in (0, 3)


def test_report_artifacts(tmp_path):
    code = main(["report", "--outdir", str(tmp_path), "--trials", "1",
                 "--fr", "2", "--seed", "4"])
    assert code == 0
    plot = tmp_path / "plotdata"
    for name in ["fig4.csv", "fig5.csv", "fig6.csv", "fig7.csv", "fig8.csv",
                 "fig9.csv", "fig10.csv", "fig11.csv", "fig12.csv",
                 "table1.csv"]:
        assert (plot / name).exists(), name
    figs = tmp_path / "figures"
    for name in ["fig4.png", "fig8.png", "fig12.png"]:
        assert (figs / name).exists(), name
    rows = read_csv(str(plot / "fig4.csv"))
    assert {r.label for r in rows} >= {"none", "regular95"}
