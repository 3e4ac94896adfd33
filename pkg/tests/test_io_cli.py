import json

import numpy as np
import pytest

from s3sr.cli import main
from s3sr.geodesics import GeodesicParams, integrate_geodesic
from s3sr.io import COLUMNS, CurveRecord


def run(*args):
    return main(list(args))


# -- CurveRecord formats ------------------------------------------------------


def test_csv_round_trip(tmp_path):
    c = integrate_geodesic([1, 0, 0, 0], GeodesicParams(1.0, 0.3, 0.5), 1.0, 1e-2)
    rec = CurveRecord.from_curve(c)
    path = tmp_path / "c.csv"
    rec.to_csv(path)
    back = CurveRecord.from_csv(path)
    assert np.array_equal(back.data, rec.data)  # 17 significant digits round-trip
    assert back.header["tag"] == "geodesic"
    assert back.header["lambda"] == 0.5


def test_csv_is_lf_and_hash_prefixed(tmp_path):
    c = integrate_geodesic([1, 0, 0, 0], GeodesicParams(1.0, 0.0, 0.0), 0.5, 1e-2)
    path = tmp_path / "c.csv"
    CurveRecord.from_curve(c).to_csv(path)
    raw = path.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert lines[0].startswith("#")
    assert any(line.startswith("# columns: " + ",".join(COLUMNS)) for line in lines)


def test_json_round_trip(tmp_path):
    c = integrate_geodesic([1, 0, 0, 0], GeodesicParams(1.0, 0.3, 0.5), 1.0, 1e-2)
    rec = CurveRecord.from_curve(c)
    path = tmp_path / "c.json"
    rec.to_json(path)
    back = CurveRecord.from_json(path)
    assert np.array_equal(back.data, rec.data)
    assert back.header == {k: v for k, v in rec.header.items()}


def test_record_validation(tmp_path):
    c = integrate_geodesic([1, 0, 0, 0], GeodesicParams(1.0, 0.0, 0.0), 0.5, 1e-2)
    rec = CurveRecord.from_curve(c)
    rec.validate()
    rec.data[3, 1:5] *= 1.01
    with pytest.raises(ValueError):
        rec.validate()


def test_malformed_csv_raises(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("# s3sr-curve v1\n0,1,0,0\n")
    with pytest.raises(ValueError):
        CurveRecord.from_csv(path)


# -- CLI contract -------------------------------------------------------------


def test_cli_connect(tmp_path, capsys):
    out = tmp_path / "conn.csv"
    code = run(
        "connect", "--from", "0,0.5236,1.0472", "--to", "1,0.7854,1.5708",
        "--samples", "256", "--format", "csv", "--out", str(out),
    )
    captured = capsys.readouterr().out
    assert code == 0
    assert "endpoint_error=" in captured
    assert "max_omega_residual=" in captured
    rec = CurveRecord.from_csv(out)
    assert rec.data.shape == (256, 8)


def test_cli_connect_identical_endpoints(tmp_path, capsys):
    out = tmp_path / "conn.csv"
    code = run("connect", "--from", "1,1,1", "--to", "1,1,1", "--out", str(out))
    assert code == 0
    rec = CurveRecord.from_csv(out)
    assert rec.data.shape[0] == 2
    assert np.array_equal(rec.data[0, 1:5], rec.data[1, 1:5])


def test_cli_connect_malformed_angles(tmp_path):
    assert run("connect", "--from", "0,zzz,1", "--to", "1,1,1") == 2
    assert run("connect", "--from", "0,1", "--to", "1,1,1") == 2
    assert run("connect", "--from", "0,1,1,1,1", "--to", "1,1,1") == 2


def test_cli_usage_errors():
    assert run() == 2
    assert run("nonsense") == 2


def test_cli_rejects_bad_common_options(tmp_path):
    out = str(tmp_path / "x.csv")
    assert run("connect", "--from", "0,0.5,1.0", "--to", "1,0.8,1.6",
               "--samples", "1", "--out", out) == 2
    assert run("geodesic", "--q0", "1,0,0,0", "--T", "1",
               "--step", "0", "--out", out) == 2
    assert run("shoot", "--from", "1,0,0,0", "--to", "0,1,0,0",
               "--tol", "-1", "--out", out) == 2


def test_cli_geodesic(tmp_path, capsys):
    out = tmp_path / "geo.csv"
    code = run(
        "geodesic", "--q0", "1,0,0,0", "--r", "1", "--theta0", "0",
        "--lambda", "0", "--T", "3.14159265358979", "--step", "0.001",
        "--out", str(out),
    )
    assert code == 0
    rec = CurveRecord.from_csv(out)
    end = rec.data[-1, 1:5]
    assert np.max(np.abs(end - [-1.0, 0.0, 0.0, 0.0])) <= 1e-9


def test_cli_geodesic_zero_horizon(tmp_path):
    out = tmp_path / "geo0.csv"
    assert run("geodesic", "--q0", "1,0,0,0", "--T", "0", "--out", str(out)) == 0
    rec = CurveRecord.from_csv(out)
    assert rec.data.shape[0] == 1


def test_cli_geodesic_then_check(tmp_path, capsys):
    out = tmp_path / "geo.csv"
    assert run(
        "geodesic", "--q0", "1,0,0,0", "--theta0", "0.4", "--lambda", "0.5",
        "--T", "3", "--step", "0.001", "--out", str(out),
    ) == 0
    code = run("check", str(out))
    captured = capsys.readouterr().out
    assert code == 0
    assert "FAIL" not in captured
    assert "PASS angle-linearity" in captured


def test_cli_check_detects_scaled_point(tmp_path, capsys):
    out = tmp_path / "geo.csv"
    run("geodesic", "--q0", "1,0,0,0", "--lambda", "0.3", "--T", "1", "--out", str(out))
    rec = CurveRecord.from_csv(out)
    rec.data[5, 1:5] *= 1.01
    rec.to_csv(out)
    code = run("check", str(out))
    captured = capsys.readouterr().out
    assert code != 0
    assert "FAIL unit-norm" in captured


def test_cli_check_connect_file_skips_angle_linearity(tmp_path, capsys):
    out = tmp_path / "conn.csv"
    run("connect", "--from", "0,0.5,1.0", "--to", "1,0.8,1.6",
        "--samples", "1024", "--out", str(out))
    code = run("check", str(out), "--tol", "1e-3")
    captured = capsys.readouterr().out
    assert code == 0
    assert "SKIP angle-linearity" in captured
    assert "PASS horizontality" in captured


def test_cli_check_malformed_file(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("not,a,curve\n")
    assert run("check", str(bad)) == 2


def test_cli_hamiltonian(tmp_path, capsys):
    out = tmp_path / "ham.csv"
    code = run(
        "hamiltonian", "--q0", "1,0,0,0", "--theta0", "0.4", "--lambda", "0.5",
        "--T", "2", "--step", "0.001", "--out", str(out),
    )
    captured = capsys.readouterr().out
    assert code == 0
    assert "H_drift=" in captured
    assert run("check", str(out)) == 0


def test_cli_shoot_trivial(tmp_path, capsys):
    out = tmp_path / "shoot.csv"
    code = run("shoot", "--from", "1,0,0,0", "--to", "1,0,0,0", "--out", str(out))
    captured = capsys.readouterr().out
    assert code == 0
    assert "T=0" in captured
    assert "converged=True" in captured


def test_cli_shoot_round_trip(tmp_path, capsys):
    geo = tmp_path / "geo.csv"
    run("geodesic", "--q0", "1,0,0,0", "--theta0", "0.4", "--lambda", "0.6",
        "--T", "1.3", "--step", "0.001", "--out", str(geo))
    end = CurveRecord.from_csv(geo).data[-1, 1:5]
    out = tmp_path / "shoot.csv"
    code = run(
        "shoot", "--from", "1,0,0,0", "--to", ",".join(format(v, ".17g") for v in end),
        "--out", str(out),
    )
    captured = capsys.readouterr().out
    assert code == 0
    values = dict(
        line.split("=", 1) for line in captured.splitlines() if "=" in line and "wrote" not in line
    )
    assert float(values["endpoint_error"]) <= 1e-6
    assert abs(float(values["theta0"]) - 0.4) <= 1e-4
    assert abs(float(values["lambda"]) - 0.6) <= 1e-4
    assert abs(float(values["T"]) - 1.3) <= 1e-4


def test_cli_shoot_deterministic_bytes(tmp_path):
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    args = ["shoot", "--from", "1,0,0,0", "--to", "0,0,1,0", "--seed", "11"]
    assert run(*args, "--out", str(out_a)) == 0
    assert run(*args, "--out", str(out_b)) == 0
    assert out_a.read_bytes() == out_b.read_bytes()


def test_cli_shoot_nonconvergence_exit_code(tmp_path, capsys):
    out = tmp_path / "shoot.csv"
    code = run(
        "shoot", "--from", "1,0,0,0", "--to", "0,0,1,0",
        "--tol", "1e-18", "--out", str(out),
    )
    captured = capsys.readouterr().out
    assert code == 4
    assert "converged=False" in captured
    assert out.exists()  # best-effort curve still written


def test_cli_frames(capsys):
    assert run("frames", "--at", "1,0,0,0") == 0
    captured = capsys.readouterr().out
    assert "X=" in captured and "N=1" in captured


def test_cli_normalization_policy(tmp_path, capsys):
    out = tmp_path / "geo.csv"
    # moderate deviation: silently normalized
    assert run("geodesic", "--q0", "1.000000001,0,0,0", "--T", "0.1", "--out", str(out)) == 0
    # large deviation: rejected
    assert run("geodesic", "--q0", "1.5,0,0,0", "--T", "0.1", "--out", str(out)) == 2


def test_cli_json_format(tmp_path):
    out = tmp_path / "conn.json"
    assert run("connect", "--from", "0,0.5,1.0", "--to", "1,0.8,1.6",
               "--format", "json", "--out", str(out)) == 0
    payload = json.loads(out.read_text())
    assert payload["format"] == "s3sr-curve v1"
    assert len(payload["rows"]) == 256
