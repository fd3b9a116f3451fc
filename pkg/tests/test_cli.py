import json

import numpy as np
import pytest

from qtwist.cli import main
from qtwist.hseries import exp_coeffs
from qtwist.kernels import series_mul


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_cg_json(capsys):
    code, out, _ = _run(capsys, "cg", "1/2", "1/2", "--order", "3")
    assert code == 0
    data = json.loads(out)
    assert (data["two_j1"], data["two_j2"], data["order"]) == (1, 1, 3)
    singlet = [e for e in data["entries"] if e["two_j"] == 0 and e["two_m1"] == 1][0]
    assert np.allclose(singlet["coeffs"], [2 ** -0.5, 2 ** -1.5, -2 ** -3.5])


def test_cg_csv_and_file(capsys, tmp_path):
    code, out, _ = _run(capsys, "cg", "1", "1/2", "--classical", "--csv")
    assert code == 0 and out.startswith("two_j,two_m,two_m1,two_m2")
    target = tmp_path / "cg.json"
    assert _run(capsys, "cg", "1", "1", "--json-out", str(target))[0] == 0
    assert json.loads(target.read_text())["two_j1"] == 2


def test_repr_variants(capsys):
    code, out, _ = _run(capsys, "repr", "1/2", "H", "--order", "2")
    assert code == 0
    entries = json.loads(out)["entries"]
    assert entries[0][0]["coeffs"] == [-1.0, 0.0] and entries[1][1]["coeffs"] == [1.0, 0.0]
    assert _run(capsys, "repr", "1/2", "E", "--tensor", "1")[0] == 0
    assert _run(capsys, "repr", "1/2", "--rmatrix", "1/2")[0] == 0
    assert _run(capsys, "repr", "1/2", "EX")[0] == 2
    assert _run(capsys, "repr", "1/2", "EF", "--tensor", "1")[0] == 2


def test_twist(capsys):
    code, out, _ = _run(capsys, "twist", "1/2", "1", "--inverse", "--order", "2")
    assert code == 0
    data = json.loads(out)
    assert data["spins_twice"] == [1, 2]


def test_star_plane(capsys, tmp_path):
    x = json.dumps({"basis": "monomial", "terms": [{"k": 1, "l": 0}]})
    y = tmp_path / "y.json"
    y.write_text(json.dumps({"basis": "monomial", "terms": [{"k": 0, "l": 1}]}))
    code, out, _ = _run(capsys, "star", x, f"@{y}", "--order", "4")
    assert code == 0
    term = json.loads(out)["terms"][0]
    assert (term["two_j"], term["two_m"]) == (2, 0)


@pytest.mark.parametrize("space", ["mq2", "minkowski"])
def test_star_mq2(capsys, space):
    a = json.dumps({"basis": "words", "terms": [{"word": "a"}]})
    d = json.dumps({"basis": "words", "terms": [{"word": "d"}]})
    code, out, _ = _run(capsys, "star", a, d, "--space", space, "--order", "3")
    assert code == 0 and json.loads(out)["terms"]


def test_relations(capsys):
    code, out, _ = _run(capsys, "relations", "--space", "minkowski", "--order", "3")
    assert code == 0
    lhs = [r["lhs"] for r in json.loads(out)["relations"]]
    assert lhs == ["ba", "ca", "da", "cb", "db", "dc"]
    assert _run(capsys, "relations", "--space", "plane")[0] == 0


def test_verify(capsys, tmp_path):
    report = tmp_path / "report.json"
    code, out, _ = _run(capsys, "verify", "--space", "minkowski", "--max-spin", "1/2",
                        "--order", "4", "--json-out", str(report))
    assert code == 0
    assert "checks passed" in out.splitlines()[-1]
    data = json.loads(report.read_text())
    assert data["order"] == 4 and all(c["passed"] for c in data["checks"])


def test_verify_failure_exit_code(capsys):
    code, out, _ = _run(capsys, "verify", "--space", "plane", "--max-spin", "1/2",
                        "--tol", "1e-30", "--order", "4")
    assert code == 1


def test_usage_errors(capsys):
    assert _run(capsys, "cg", "1/3", "1/2")[0] == 2
    assert _run(capsys, "cg", "7", "1/2")[0] == 2
    assert _run(capsys, "cg", "0", "1/2")[0] == 2
    assert _run(capsys, "star", "{not json", "{}")[0] == 2
    assert _run(capsys, "star", "{}", "{}")[0] == 2
    assert _run(capsys, "frobnicate")[0] == 2
    assert _run(capsys, "cg", "1/2", "1/2", "--order", "0")[0] == 2
    with pytest.warns(UserWarning):
        code, _, err = _run(capsys, "verify", "--order", "1")
    assert code == 2 and "order" in err


def test_help(capsys):
    assert _run(capsys, "--help")[0] == 0


def test_verify_plane_spin3(capsys):
    code, out, _ = _run(capsys, "verify", "--space", "plane", "--max-spin", "3", "--order", "8")
    assert code == 0
    assert all(line.startswith("PASS") for line in out.splitlines()[:-1])


def test_star_order_swap_differs_by_q(capsys):
    x = json.dumps({"terms": [{"two_j": 1, "two_m": -1}]})
    y = json.dumps({"terms": [{"two_j": 1, "two_m": 1}]})
    xy = json.loads(_run(capsys, "star", x, y)[1])["terms"][0]["coeffs"]
    yx = json.loads(_run(capsys, "star", y, x)[1])["terms"][0]["coeffs"]
    assert np.allclose(xy, series_mul(np.array(yx), exp_coeffs(1.0, 8)), atol=1e-13)


def test_verify_report_is_deterministic(capsys, tmp_path):
    reports = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        _run(capsys, "verify", "--space", "mq2", "--max-spin", "1", "--order", "4",
             "--seed", "3", "--workers", "3", "--json-out", str(path))
        data = json.loads(path.read_text())
        for check in data["checks"]:
            check.pop("seconds")
        reports.append(data)
    assert reports[0] == reports[1]
