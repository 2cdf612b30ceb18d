"""Command-line interface: exit codes, config precedence and output formats.

Oracles: direct checks of the documented behaviour (exit codes, key = value
lines, file layout) and agreement with the library API on the same inputs.
"""

import subprocess
import sys

import pytest

from phononblockade.cli import (
    EXIT_NUMERIC,
    EXIT_OK,
    EXIT_USAGE,
    EXIT_VALIDATION,
    UsageError,
    main,
    parse_config,
    parse_report,
    read_key_values,
    resolve_params,
)
from phononblockade.sweep import read_csv


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, parse_report(out), err


def test_bare_solve_config_is_baseline():
    cfg = parse_config(["solve"])
    sp = resolve_params(cfg).params
    assert (sp.g, sp.kappa, sp.gamma, sp.epsilon, sp.delta_p, sp.n_th) == (2, 1, 0.01, 0.1, 0, 0)
    assert (cfg.na, cfg.nb, cfg.tol, cfg.units, cfg.jobs) == (3, 10, 1e-10, "kappa-units", 1)


def test_flag_overrides():
    sp = resolve_params(parse_config(["solve", "--g", "3", "--epsilon", "0.05"])).params
    assert (sp.g, sp.epsilon, sp.gamma) == (3.0, 0.05, 0.01)


def test_flags_override_file(tmp_path):
    cfg_file = tmp_path / "run.cfg"
    cfg_file.write_text("# comment\ng = 1\ngamma = 0.02  # trailing\ndelta-p = 0.5\n")
    cfg = parse_config(["solve", "--config", str(cfg_file), "--g", "2"])
    sp = resolve_params(cfg).params
    assert (sp.g, sp.gamma, sp.delta_p) == (2.0, 0.02, 0.5)
    cfg = parse_config(["solve"], config_file=cfg_file)
    assert cfg.g == 1.0


def test_config_file_errors(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("g = 1\nomega = 3\n")
    with pytest.raises(UsageError, match="omega"):
        parse_config(["solve", "--config", str(bad)])
    code, _, err = run(["solve", "--config", str(bad)], capsys)
    assert code == EXIT_USAGE and "omega" in err
    bad.write_text("just words\n")
    assert main(["solve", "--config", str(bad)]) == EXIT_USAGE
    assert main(["solve", "--config", str(tmp_path / "none.cfg")]) == EXIT_USAGE
    bad.write_text("nb = many\n")
    assert main(["solve", "--config", str(bad)]) == EXIT_USAGE


def test_read_key_values(tmp_path):
    f = tmp_path / "kv.txt"
    f.write_text("a = 1\n\n# x\nb-c = two words # c\naxis = g, 0, 1, 2\naxis = kappa, 1, 2, 2\n")
    assert read_key_values(f) == [("a", "1"), ("b_c", "two words"), ("axis", "g, 0, 1, 2"), ("axis", "kappa, 1, 2, 2")]


@pytest.mark.parametrize(
    "argv",
    [[], ["bogus"], ["solve", "--g"], ["solve", "--g", "x"], ["solve", "--unknown", "1"], ["figure", "7"],
     ["solve", "--units", "parsec"], ["solve", "--jobs", "0"], ["solve", "--gamma", "0"], ["solve", "--nb", "1"],
     ["validate", "--gamma", "0"]],
)
def test_usage_errors_exit_1(argv, capsys):
    assert main(argv) == EXIT_USAGE
    assert "error" in capsys.readouterr().err


def test_solve_baseline(capsys):
    code, rep, _ = run(["solve"], capsys)
    assert code == EXIT_OK
    for key in ("g2_numeric", "g2_analytic", "fidelity", "mean_photons", "mean_phonons", "residual",
                "n_a", "n_b", "method", "truncation_converged", "cooperativity"):
        assert key in rep
    assert float(rep["g2_numeric"]) < 1e-3
    assert float(rep["fidelity"]) > 0.99
    assert float(rep["residual"]) <= 1e-10
    assert rep["truncation_converged"] == "true"


def test_solve_thermal(capsys):
    code, rep, _ = run(["solve", "--g", "0", "--n-th", "0.5", "--epsilon", "0"], capsys)
    assert code == EXIT_OK
    assert float(rep["g2_numeric"]) == pytest.approx(2.0, abs=1e-6)


def test_solve_vacuum_exit_2(capsys):
    code, rep, err = run(["solve", "--epsilon", "0", "--n-th", "0"], capsys)
    assert code == EXIT_NUMERIC
    assert "InsufficientOccupation" in err
    assert "g2_numeric" not in rep


def test_solve_explosion_exit_2(capsys):
    code, _, err = run(["solve", "--g", "0"], capsys)
    assert code == EXIT_NUMERIC and "TruncationExplosion" in err


def test_hertz_units_match_kappa_units(capsys):
    _, a, _ = run(["analytic", "--g", "1.5", "--gamma", "0.02", "--delta-p", "0.3"], capsys)
    _, b, _ = run(["analytic", "--units", "hertz", "--kappa", "2e6", "--g", "3e6", "--gamma", "4e4",
                   "--epsilon", "2e5", "--delta-p", "6e5"], capsys)
    assert float(b["g"]) == pytest.approx(1.5) and float(b["kappa"]) == 1.0
    assert float(a["g2_analytic"]) == pytest.approx(float(b["g2_analytic"]), rel=1e-12)


def test_cavity_detuning_flag(capsys):
    cfg = parse_config(["solve", "--cavity-detuning", "0.7"])
    assert resolve_params(cfg).cavity_detuning == 0.7
    code, rep, _ = run(["solve", "--cavity-detuning", "0.7"], capsys)
    assert code == EXIT_OK
    _, ref, _ = run(["solve"], capsys)
    assert rep["g2_numeric"] != ref["g2_numeric"]


def test_analytic_report(capsys):
    code, rep, _ = run(["analytic"], capsys)
    assert code == EXIT_OK
    assert float(rep["cooperativity"]) == pytest.approx(1600)
    assert float(rep["g2_analytic"]) == pytest.approx(1 / 1601**2)
    assert float(rep["g2_two_phonon_resonance"]) > 1
    assert complex(rep["c01"]) == pytest.approx(-20j)


def test_preset_pipeline(capsys):
    code, rep, _ = run(["analytic", "--preset", "paper-sec4"], capsys)
    assert code == EXIT_OK
    assert 1e-6 < float(rep["n_th"]) < 1e-4
    assert float(rep["g_eff_hz"]) == pytest.approx(2.45e6, rel=1e-9)
    assert rep["rwa"] == "ok"
    assert float(rep["g"]) == pytest.approx(2.45e6 / 20e6)
    assert float(rep["cooperativity"]) == pytest.approx(4 * 2.45e6**2 / (20e6 * 328), rel=1e-9)


def test_validate_baseline_passes(capsys):
    code, rep, _ = run(["validate"], capsys)
    assert code == EXIT_OK
    checks = {k: v.split()[0] for k, v in rep.items() if k != "summary"}
    assert len(checks) >= 10 and set(checks.values()) == {"pass"}


def test_validate_insufficient_truncation_fails(capsys):
    code, rep, _ = run(["validate", "--nb", "2"], capsys)
    assert code == EXIT_VALIDATION
    assert rep["truncation_converged"].startswith("fail")


def test_sweep_command(tmp_path, capsys):
    spec = tmp_path / "spec.txt"
    spec.write_text("name = mini\naxis = delta_p, -1, 1, 3\noutputs = g2_numeric, g2_analytic\n")
    code, rep, _ = run(["sweep", str(spec), "--outdir", str(tmp_path / "out"), "--g", "1.5"], capsys)
    assert code == EXIT_OK and rep["rows"] == "3" and rep["failed_rows"] == "0"
    header, rows = read_csv(tmp_path / "out" / "mini.csv")
    assert header == ["delta_p", "g2_numeric", "g2_analytic", "error"]
    assert (tmp_path / "out" / "mini.svg").exists()
    spec.write_text("axis = delta_p, -1, 1\n")
    assert main(["sweep", str(spec), "--outdir", str(tmp_path)]) == EXIT_USAGE


def test_figure_4_command(tmp_path, capsys):
    code, rep, _ = run(["figure", "4", "--outdir", str(tmp_path)], capsys)
    assert code == EXIT_OK and rep["rows"] == "101"
    header, rows = read_csv(tmp_path / "fig4.csv")
    assert header == ["delta_p", "g2_numeric", "g2_analytic", "mean_phonons", "residual", "error"]
    (dip,) = [r for r in rows if r[0] == 0.0]
    # the stated 1e-4 dip bound is checked in the acceptance suite
    assert dip[1] < 1e-3
    assert (tmp_path / "fig4.svg").read_text().startswith("<svg")


def test_figure_jobs_do_not_change_output(tmp_path, capsys):
    main(["figure", "4", "--outdir", str(tmp_path / "a")])
    main(["figure", "4", "--outdir", str(tmp_path / "b"), "--jobs", "2"])
    capsys.readouterr()
    for name in ("fig4.csv", "fig4.svg"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_console_entry_point():
    out = subprocess.run([sys.executable, "-m", "phononblockade.cli", "analytic"], capture_output=True, text=True)
    assert out.returncode == 0
    assert "g2_analytic = " in out.stdout
    out = subprocess.run([sys.executable, "-m", "phononblockade.cli", "solve", "--gamma", "0"],
                         capture_output=True, text=True)
    assert out.returncode == 1
