import csv
import io
import json
import math

import pytest

from kahlercomp.cli import CATALOG, main


def run(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_spectrum_json(capsys):
    code, out, _ = run(capsys, "spectrum", "--model", "hyperquadric", "--n", "4")
    assert code == 0
    data = json.loads(out)
    assert data["schema"] == 1
    ev = data["eigenvalues"]
    assert len(ev) == 10
    assert ev[0] == pytest.approx(-2.0, abs=1e-9)
    assert all(v == pytest.approx(2.0, abs=1e-9) for v in ev[1:])


def test_spectrum_csv_and_dump(capsys, tmp_path):
    dump = tmp_path / "T.json"
    code, out, _ = run(capsys, "spectrum", "--model", "cpn", "--n", "2", "--format", "csv", "--dump", str(dump))
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "index,eigenvalue"
    assert len(lines) == 4
    assert dump.exists()
    from kahlercomp.curvature import KahlerCurvature
    T = KahlerCurvature.from_json(dump.read_text())
    assert T.n == 2


def test_laplacian_csv_header_and_saturation(capsys):
    code, out, _ = run(capsys, "laplacian", "--model", "cpn", "--n", "1", "--grid", "0.1:2:5")
    assert code == 0
    assert out.splitlines()[0] == "r,actual,bound,gap"
    table = rows(out)
    assert len(table) == 5
    for row in table:
        assert abs(float(row["gap"])) <= 1e-6
        assert float(row["gap"]) == pytest.approx(float(row["bound"]) - float(row["actual"]), abs=1e-15)


def test_laplacian_json_schema(capsys):
    code, out, _ = run(capsys, "laplacian", "--model", "hyperbolic", "--n", "2", "--grid", "0.5:3:4", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["schema"] == 1
    assert data["passed"] is True
    assert set(data["rows"][0]) == {"r", "actual", "bound", "gap"}


def test_output_is_deterministic(capsys):
    argv = ("check", "sweep", "--model", "product", "--n", "2", "--grid", "0.1:2:6", "--seed", "3")
    a = run(capsys, *argv)
    b = run(capsys, *argv)
    assert a == b
    assert a[0] == 0


def test_out_file(capsys, tmp_path):
    path = tmp_path / "lap.csv"
    code, out, _ = run(capsys, "laplacian", "--model", "flat", "--n", "3", "--grid", "1:2:3", "--out", str(path))
    assert code == 0 and out == ""
    table = rows(path.read_text())
    assert float(table[0]["actual"]) == pytest.approx(5.0)


def test_unknown_model_lists_catalog(capsys):
    code, _, err = run(capsys, "laplacian", "--model", "torus")
    assert code == 2
    for name in CATALOG:
        assert name in err


def test_bad_usage_exits_2(capsys):
    assert run(capsys, "laplacian", "--tol", "-1")[0] == 2
    assert run(capsys, "laplacian", "--grid", "1:0.5")[0] == 2
    assert run(capsys, "check", "nonsense")[0] == 2


def test_check_counterexample(capsys):
    code, out, _ = run(capsys, "check", "example52")
    assert code == 0
    assert all(float(row["gap"]) < 0 for row in rows(out))


def test_check_sweep_refuses_c1(capsys):
    code, _, err = run(capsys, "check", "sweep", "--model", "product", "--n", "2", "--c", "1")
    assert code == 2
    assert "refusing" in err


def test_check_sweep_expect_violation(capsys):
    code, out, _ = run(capsys, "check", "sweep", "--model", "product", "--n", "2", "--c", "1",
                       "--expect-violation", "--grid", "0.2:2:10")
    assert code == 0
    assert min(float(r["gap"]) for r in rows(out)) < 0


def test_check_sweep_natural_constant(capsys):
    code, out, _ = run(capsys, "check", "sweep", "--model", "product", "--n", "2")
    assert code == 0
    assert min(float(r["gap"]) for r in rows(out)) >= -1e-8


@pytest.mark.parametrize("name", ["lemma31", "thm21", "product", "khessian", "diam"])
def test_check_suites_pass(capsys, name):
    code, out, err = run(capsys, "check", name)
    assert code == 0, err
    assert out.splitlines()[0] == "r,actual,bound,gap"


def test_volume_command(capsys):
    code, out, _ = run(capsys, "volume", "--model", "cpn", "--n", "2", "--grid", "0.5:2.2:5")
    assert code == 0
    table = rows(out)
    assert abs(float(table[-1]["gap"])) <= 1e-7
    code, out, _ = run(capsys, "volume", "--model", "product", "--n", "2", "--grid", "0.1:2.5:8")
    assert code == 0
    assert all(float(r["gap"]) >= 0 for r in rows(out))


def test_series_table(capsys):
    code, out, err = run(capsys, "series", "--K", "5")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "k,T_k,c_k,c_k_decimal"
    assert lines[3].startswith("3,-3/2,1/315,")
    assert "positive" in err


def test_series_eval(capsys):
    code, out, _ = run(capsys, "series", "--eval", "0.5", "--K", "40", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["gap"] <= data["allowance"] <= 1e-12
    assert data["closed"] > 0


def test_series_eval_domain(capsys):
    code, _, _ = run(capsys, "series", "--eval", str(math.pi))
    assert code == 2


def test_diam_product_default_k(capsys):
    code, out, _ = run(capsys, "check", "diam", "--model", "product", "--n", "2", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["meta"]["k"] == 2
    row = data["rows"][0]
    assert row["actual"] == pytest.approx(math.pi * math.sqrt(2 / 3))
    assert row["bound"] == pytest.approx(math.pi * math.sqrt(5 / 3))
    code, _, _ = run(capsys, "check", "diam", "--model", "product", "--n", "2", "--k", "1")
    assert code == 2
