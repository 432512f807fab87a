import json
import subprocess
import sys

import numpy as np
import pytest

from openstirap.cli import build_parser, main


def run(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


def test_simulate_writes_csv(tmp_path, capsys):
    out_csv = tmp_path / "run.csv"
    code, out, _ = run(["simulate", "--model", "effective", "--sequence", "counterintuitive",
                        "--alphaT", "10", "--deltaT", "1", "--gammaT", "0", "--out", str(out_csv)], capsys)
    assert code == 0
    lines = out_csv.read_text().splitlines()
    assert lines[0] == "t_over_T,p1,p2,p3,norm"
    assert float(lines[-1].split(",")[3]) > 0.9
    assert "p3_final=" in out


def test_zeno_prints_outcome(capsys):
    code, out, _ = run(["zeno", "--model", "phenomenological", "--sequence", "intuitive"], capsys)
    assert code == 0 and out.strip() == "RemainsInState1"


def test_figure_fig4_variant(tmp_path, capsys):
    code, _, _ = run(["figure", "fig4", "--variant", "effective-intuitive", "--samples", "401",
                      "--out-dir", str(tmp_path)], capsys)
    assert code == 0
    csv_path = tmp_path / "fig4_effective-intuitive.csv"
    assert (tmp_path / "fig4_effective-intuitive.svg").exists()
    data = np.loadtxt(csv_path, delimiter=",", skiprows=1)
    assert data[-1, 4] < 0.05


def test_figure_variant_rejected_for_sweeps(capsys):
    code, _, err = run(["figure", "fig2", "--variant", "effective-intuitive"], capsys)
    assert code == 2 and "variant" in err


def test_bad_variant(capsys):
    code, _, err = run(["figure", "fig4", "--variant", "sideways"], capsys)
    assert code == 2 and len(err.strip().splitlines()) == 1


def test_master_and_analytic(capsys):
    code, out, _ = run(["master", "--gammaT", "0.5", "--samples", "101"], capsys)
    assert code == 0 and "trace_final=1" in out
    code, out, _ = run(["analytic", "--sequence", "intuitive", "--gammaT", "0.2"], capsys)
    assert code == 0
    assert float(out.split("=")[1]) == pytest.approx(0.346227, rel=1e-5)


def test_sweep_to_stdout_and_file(tmp_path, capsys):
    code, out, _ = run(["sweep", "--gammaT-min", "0", "--gammaT-max", "1", "--points", "3",
                        "--models", "effective", "--analytic", "--samples", "101"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "gammaT,model,p3_final,p1_final,norm_final,p3_analytic" and len(lines) == 4
    target = tmp_path / "sw.csv"
    code, out, _ = run(["sweep", "--points", "2", "--gammaT-max", "0.5", "--out", str(target),
                        "--samples", "101"], capsys)
    assert code == 0 and len(target.read_text().splitlines()) == 5


def test_sweep_log_needs_positive_start(capsys):
    code, _, err = run(["sweep", "--log", "--gammaT-min", "0"], capsys)
    assert code == 1 and "gammaT-min" in err


def test_unknown_flag_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["simulate", "--bogus"])
    assert info.value.code == 2
    err = capsys.readouterr().err
    assert len(err.strip().splitlines()) == 1 and "bogus" in err


def test_bad_choice_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["simulate", "--model", "quantum"])
    assert info.value.code == 2


def test_runtime_error_exit_1_echoes_parameters(capsys):
    code, _, err = run(["simulate", "--alphaT", "-3"], capsys)
    assert code == 1
    assert "alphaT=-3.0" in err and "gammaT=0.0" in err


def test_step_underflow_exit_1(tmp_path, capsys, monkeypatch):
    import openstirap.cli as cli
    # A tiny step budget forces the controller to give up.
    real = cli.SimOptions
    monkeypatch.setattr(cli, "SimOptions", lambda **kw: real(max_steps=50, **kw))
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"gammaT": 500}))
    code, _, err = run(["simulate", "--config", str(cfg), "--samples", "11"], capsys)
    assert code == 1 and "step" in err and "gammaT=500" in err


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"alphaT": 20, "gammaT": 0.1, "analytic": {"sequence": "intuitive"}}))
    _, from_config, _ = run(["analytic", "--config", str(cfg)], capsys)
    _, explicit, _ = run(["analytic", "--alphaT", "20", "--gammaT", "0.1", "--sequence", "intuitive"], capsys)
    assert from_config == explicit
    _, overridden, _ = run(["analytic", "--config", str(cfg), "--gammaT", "0.3"], capsys)
    _, direct, _ = run(["analytic", "--alphaT", "20", "--gammaT", "0.3", "--sequence", "intuitive"], capsys)
    assert overridden == direct != from_config


@pytest.mark.parametrize("content,needle", [
    ("{not json", "valid JSON"),
    ("[1, 2]", "object"),
    ('{"colour": 1}', "unknown key"),
    ('{"simulate": {"alphaT": {"x": 1}}}', "nesting"),
])
def test_bad_config_exit_2(tmp_path, capsys, content, needle):
    cfg = tmp_path / "c.json"
    cfg.write_text(content)
    code, _, err = run(["simulate", "--config", str(cfg)], capsys)
    assert code == 2 and needle in err


def test_missing_config_exit_2(tmp_path, capsys):
    code, _, err = run(["zeno", "--config", str(tmp_path / "none.json")], capsys)
    assert code == 2 and "cannot read" in err


def test_help_documents_units():
    parser = build_parser()
    sub = parser._subparsers._group_actions[0].choices
    for name in ("simulate", "master", "sweep", "analytic", "zeno", "figure"):
        text = sub[name].format_help()
        assert "--config" in text
        for action in sub[name]._actions:
            if action.option_strings and action.dest != "help":
                assert action.help, (name, action.dest)
    text = sub["simulate"].format_help()
    for flag in ("alphaT", "deltaT", "gammaT", "tmaxT"):
        assert flag in text
    assert "dimensionless" in text
    assert "command line always" in text


def test_identical_invocations_identical_files(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        run(["simulate", "--gammaT", "0.3", "--sequence", "intuitive", "--samples", "201",
             "--out", str(path)], capsys)
    assert a.read_bytes() == b.read_bytes()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "openstirap", "zeno"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "CompleteTransfer"
