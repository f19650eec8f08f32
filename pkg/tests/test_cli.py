from __future__ import annotations

import json

import pytest

from crrigidity import cli
from crrigidity.cli import main, parse_range


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_range():
    assert parse_range("3") == [3]
    assert parse_range("1..3") == [1, 2, 3]
    assert parse_range("1,4..5") == [1, 4, 5]
    with pytest.raises(cli.UsageError):
        parse_range("a..b")


def test_gen_latex_cubic(capsys):
    code, out, _ = run(capsys, "gen", "--n", "1", "--k", "3", "--format", "latex")
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 3
    assert all(l.startswith(r"\operatorname{Im} w_") for l in lines)


def test_gen_hyperquadric(capsys):
    code, out, _ = run(capsys, "gen", "--n", "1", "--k", "1")
    assert code == 0 and out.strip() == "Im w1 = z1*zb1"


def test_gen_full_model_json(capsys):
    code, out, _ = run(capsys, "gen", "--n", "2", "--k", "16", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["schema"] == 1 and data["model"]["full_model"] is True


def test_output_is_deterministic(capsys):
    a = run(capsys, "gen", "--n", "2", "--k", "12", "--seed", "5", "--format", "json")[1]
    b = run(capsys, "gen", "--n", "2", "--k", "12", "--seed", "5", "--format", "json")[1]
    assert a == b
    c = run(capsys, "autcr", "--n", "1", "--k", "2", "--format", "json", "--fields")[1]
    d = run(capsys, "autcr", "--n", "1", "--k", "2", "--format", "json", "--fields")[1]
    assert c == d


def test_matrix_file(tmp_path, capsys):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"2": [[2]], "3": [["1", "1"], ["0", "1/2"]]}))
    code, out, _ = run(capsys, "gen", "--n", "1", "--k", "3", "--matrix-file", str(path))
    assert code == 0 and "Im w1 = 2*z1*zb1" in out
    path.write_text(json.dumps({"2": [[2]], "3": [[1, 1], [2, 2]]}))
    assert run(capsys, "gen", "--n", "1", "--k", "3", "--matrix-file", str(path))[0] == 2
    path.write_text("not json")
    code, _, err = run(capsys, "gen", "--n", "1", "--k", "3", "--matrix-file", str(path))
    assert code == 2 and "invalid matrix file" in err


def test_output_file(tmp_path, capsys):
    target = tmp_path / "out.txt"
    code, out, _ = run(capsys, "gen", "--n", "1", "--k", "1", "--output", str(target))
    assert code == 0 and out == "" and target.read_text() == "Im w1 = z1*zb1\n"


@pytest.mark.parametrize("rho,dims", [("4", [2, 0]), ("3", [2, 0])])
def test_prolong_n1(capsys, rho, dims):
    code, out, _ = run(capsys, "prolong", "--n", "1", "--rho", rho, "--format", "json")
    assert code == 0 and json.loads(out)["prolongation"]["dims_nonnegative"] == dims


def test_prolong_n2_rho3(capsys):
    code, out, _ = run(capsys, "prolong", "--n", "2", "--rho", "3")
    assert code == 0 and "dims nonnegative: 8 0" in out


def test_prolong_sphere_contrast(capsys):
    code, out, _ = run(capsys, "prolong", "--n", "1", "--rho", "2", "--format", "json")
    dims = json.loads(out)["prolongation"]["dims_nonnegative"]
    assert code == 0 and dims == [2, 2, 1, 0]


def test_prolong_model_symbol(capsys):
    code, out, _ = run(capsys, "prolong", "--n", "1", "--k", "2", "--format", "json")
    assert code == 0 and json.loads(out)["prolongation"]["dims_nonnegative"] == [1, 0]


def test_symbol(capsys):
    code, out, _ = run(capsys, "symbol", "--n", "1", "--k", "3", "--format", "json")
    data = json.loads(out)
    assert code == 0 and data["algebra"]["dims"] == [2, 1, 2]
    assert data["nondegeneracy"]["totally_nondegenerate"]
    code, out, _ = run(capsys, "symbol", "--n", "2", "--rho", "3")
    assert code == 0 and out.startswith("dims: 4 4 12")


def test_autcr_cubic(capsys):
    code, out, _ = run(capsys, "autcr", "--n", "1", "--k", "3", "--max-weight", "4")
    assert code == 0 and "rigidity: True" in out


def test_autcr_sphere_total(capsys):
    code, out, _ = run(capsys, "autcr", "--n", "1", "--k", "1", "--max-weight", "2", "--format", "json")
    data = json.loads(out)["autcr"]
    assert code == 0 and data["dim_total"] == 8 and data["rigidity"] is False


def test_autcr_json_dims(capsys):
    code, out, _ = run(capsys, "autcr", "--n", "1", "--k", "3", "--format", "json")
    data = json.loads(out)
    assert data["schema"] == 1 and data["autcr"]["dims"][:4] == [2, 1, 2, 2]


def test_autcr_latex(capsys):
    code, out, _ = run(capsys, "autcr", "--n", "1", "--k", "1", "--max-weight", "0", "--format", "latex")
    assert code == 0 and r"\frac{\partial}{\partial w_{1}}" in out


def test_verify_warhurst(capsys):
    code, out, _ = run(capsys, "verify", "warhurst", "--rho", "4..12")
    assert code == 0 and "nonzero for every rho > 3 checked: True" in out


def test_verify_full(capsys):
    code, out, _ = run(capsys, "verify", "full", "--n", "1", "--rho", "3..4", "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 3 and all(l.endswith("rigid") for l in lines[1:])


def test_verify_crdim1(capsys):
    code, out, _ = run(capsys, "verify", "crdim1", "--rho", "3", "--format", "json")
    assert code == 0 and json.loads(out)["ok"] is True


def test_verify_contrast(capsys):
    assert run(capsys, "verify", "full", "--rho", "2")[0] == 2
    code, out, _ = run(capsys, "verify", "full", "--rho", "2", "--contrast")
    assert code == 0 and "not-rigid" in out


def test_verification_failure_exit_code(capsys, monkeypatch):
    real = cli.verify_full_model

    def flipped(*args, **kwargs):
        rep = real(*args, **kwargs)
        rep.verdict = "not-rigid"
        return rep

    monkeypatch.setattr(cli, "verify_full_model", flipped)
    assert run(capsys, "verify", "full", "--rho", "3")[0] == 1


@pytest.mark.parametrize(
    "argv",
    [
        ["gen", "--n", "1"],
        ["gen", "--n", "0", "--k", "1"],
        ["frobnicate"],
        ["prolong", "--n", "1", "--rho", "3", "--k", "2"],
        ["verify", "full", "--rho", "x"],
        ["autcr", "--n", "1", "--k", "1", "--max-weight", "-1"],
        ["gen", "--n", "1", "--k", "3", "--seed", "1", "--matrix-file", "m.json"],
    ],
)
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_budget_exit_code(capsys, monkeypatch):
    assert run(capsys, "gen", "--n", "3", "--k", "500", "--budget", "50")[0] == 3
    monkeypatch.setenv("CRRIGIDITY_BUDGET", "50")
    assert run(capsys, "gen", "--n", "3", "--k", "500")[0] == 3
