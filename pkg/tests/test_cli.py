import filecmp

import pytest

from fraclab.cli import coerce, load_config, main
from fraclab.errors import ConfigurationError
from fraclab.experiments import experiment_names


def write(tmp_path, text, name="run.ini"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_list(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out.split()
    assert out == experiment_names() and len(out) == 16


def test_no_arguments_is_usage_error(capsys):
    assert main([]) == 2
    assert "usage" in capsys.readouterr().err


def test_unknown_subcommand():
    assert main(["frobnicate"]) == 2


def test_verify_unknown_experiment(capsys):
    assert main(["verify", "nope"]) == 2
    assert "valid names" in capsys.readouterr().err


def test_verify_gamma_beta(tmp_path, capsys):
    assert main(["verify", "gamma-beta", "--s", "0.5", "--beta", "0.6", "--out", str(tmp_path)]) == 0
    assert "PASS gamma-beta" in capsys.readouterr().out
    assert (tmp_path / "summary.json").exists()


def test_verify_torsion(tmp_path):
    assert main(["verify", "torsion", "--s", "0.5", "--N", "2048", "--out", str(tmp_path)]) == 0


def test_verify_failure_prints_table(tmp_path, capsys):
    code = main(["verify", "torsion", "--s", "0.5", "--N", "16", "--q", "1", "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == 1
    assert "FAIL torsion" in out and "table: " + str(tmp_path / "torsion_0.5_errors.csv") in out


def test_verify_rejects_bad_values(capsys):
    assert main(["verify", "torsion", "--s", "1.5"]) == 2
    assert main(["verify", "torsion", "--beta", "0.6"]) == 2


def test_empty_experiment_list(tmp_path, capsys):
    cfg = write(tmp_path, "[run]\nexperiments =\n")
    assert main(["run", str(cfg)]) == 2
    assert "usage" in capsys.readouterr().err


@pytest.mark.parametrize("text", [
    "not an ini file",
    "[defaults]\ns = 0.5\n",
    "[run]\nexperiments = bogus\n",
    "[run]\nexperiments = torsion\n[torsion]\nN = many\n",
    "[run]\nexperiments = torsion\n[torsion]\nwhatever = 1\n",
    "[run]\nexperiments = torsion\n[defaults]\ns = 0 0.5\n",
    "[run]\nexperiments = kato\n[kato]\npotential = power x y\n",
    "[run]\nexperiments = hopf\n[hopf]\ndata = one; nonsense\n",
    "[run]\nexperiments = torsion\ncolour = blue\n",
    "[run]\nexperiments = torsion\n[extra]\na = 1\n",
])
def test_config_errors_exit_2(tmp_path, text):
    cfg = write(tmp_path, text)
    assert main(["run", str(cfg)]) == 2


def test_missing_config_file(tmp_path):
    assert main(["run", str(tmp_path / "missing.ini")]) == 2


def test_run_is_deterministic(tmp_path):
    text = ("[run]\nexperiments = contraction, gamma-beta\nseed = 11\noutput = {out}\n"
            "[defaults]\nN = 64\n[contraction]\ntrials = 1\nlambdas = 1\n")
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", str(write(tmp_path, text.format(out=a), "a.ini"))]) == 0
    assert main(["run", str(write(tmp_path, text.format(out=b), "b.ini"))]) == 0
    files = sorted(p.name for p in a.iterdir())
    match, mismatch, errors = filecmp.cmpfiles(a, b, files, shallow=False)
    assert not mismatch and not errors and "contraction_0.5_margins.csv" in match


def test_run_with_worker_pool(tmp_path):
    cfg = write(tmp_path, f"[run]\nexperiments = gamma-beta eilertsen\nworkers = 2\noutput = {tmp_path / 'o'}\n")
    assert main(["run", str(cfg)]) == 0
    assert (tmp_path / "o" / "eilertsen_all_residuals.csv").exists()


def test_load_config_sections(tmp_path):
    cfg = write(tmp_path, "[run]\nexperiments = gamma-beta, torsion\n[defaults]\ns = 0.25, 0.5\n"
                          "[gamma-beta]\npairs = 0.5:0.6 0.25:0.3\n[torsion]\nq = none\nN = 512\n")
    names, params, out, workers = load_config(cfg)
    assert names == ["gamma-beta", "torsion"] and workers == 1 and out == "results"
    assert params["gamma-beta"]["pairs"] == [(0.5, 0.6), (0.25, 0.3)]
    assert params["torsion"] == {"seed": 0, "s": [0.25, 0.5], "q": None, "N": 512}


def test_coerce_types():
    assert coerce("N", "128", 2048) == 128
    assert coerce("s", "0.1, 0.2", [0.5]) == [0.1, 0.2]
    assert coerce("sizes", "64 128", [1, 2]) == [64, 128]
    assert coerce("potential", " power 1 1 ", "zero") == "power 1 1"
    with pytest.raises(ConfigurationError):
        coerce("N", "1.5", 10)
    with pytest.raises(ConfigurationError):
        coerce("s", "", [0.5])
