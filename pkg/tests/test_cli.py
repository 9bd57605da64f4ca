import json
import math

import pytest

from mlcounts.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_mgf_exact_trivial(capsys):
    code, out, _ = run(
        capsys, "mgf-exact", "--b", "1", "--alpha", "0", "--n", "100", "--disk", "r=0.5,u=0"
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["log_mgf"] == 0.0
    assert payload["disks"][0]["radius"] == 0.5
    assert payload["params"] == {"b": 1.0, "alpha": 0.0, "n": 100}


def test_coeffs_c1(capsys):
    code, out, _ = run(capsys, "coeffs", "--b", "1", "--alpha", "0", "--disk", "r=0.6,u=1")
    assert code == 0
    payload = json.loads(out)
    assert payload["C1"] == pytest.approx(0.36, rel=1e-12)
    assert payload["per_disk_breakdown"][0]["kind"] == "bulk"
    assert payload["quad_error"] < 1e-9


def test_cumulants_exact_values(capsys):
    code, out, _ = run(
        capsys,
        "cumulants", "--b", "1", "--alpha", "0", "--n", "10000",
        "--disk", "r=0.6", "--orders", "1,2",
    )
    assert code == 0
    payload = json.loads(out)
    values = {e["order"]: e["value"] for e in payload["cumulants"]}
    assert values[1] == pytest.approx(0.36e4, abs=0.01)
    assert values[2] == pytest.approx(0.6 * math.sqrt(1e4 / math.pi), abs=0.05)


def test_cumulants_joint_and_asymptotic(capsys):
    code, out, _ = run(
        capsys,
        "cumulants", "--b", "1", "--alpha", "0", "--n", "500",
        "--disk", "r=0.4", "--disk", "r=0.7", "--orders", "1", "--joint", "1,1",
    )
    assert code == 0
    payload = json.loads(out)
    joint = [e for e in payload["cumulants"] if "multi_index" in e]
    assert joint and joint[0]["multi_index"] == [1, 1]

    code, out, _ = run(
        capsys,
        "cumulants", "--b", "1", "--alpha", "0", "--n", "10000",
        "--disk", "r=0.6", "--orders", "1,2", "--mode", "asymptotic", "--format", "csv",
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "b,alpha,r_or_s,kind,order,leading,c,d,e,value_at_n"
    assert len(lines) == 3


def test_json_output_byte_identical(capsys):
    argv = ["mgf-asymptotic", "--b", "2", "--alpha", "0.5", "--n", "4000",
            "--disk", "r=0.45,u=0.3", "--disk", "s=0.3,u=0.3"]
    code1, out1, _ = run(capsys, *argv)
    code2, out2, _ = run(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2


def test_unknown_flag_exits_2(capsys):
    code = main(["mgf-exact", "--b", "1", "--n", "5", "--disk", "r=0.5", "--bogus"])
    capsys.readouterr()
    assert code == 2


def test_bad_disk_spec_exits_2(capsys):
    code, _, err = run(capsys, "mgf-exact", "--b", "1", "--n", "5", "--disk", "q=0.5")
    assert code == 2
    assert "disk" in err

    code, _, _ = run(capsys, "mgf-exact", "--b", "1", "--n", "5", "--disk", "r=0.5,s=1")
    assert code == 2


def test_missing_disk_exits_2(capsys):
    code, _, err = run(capsys, "mgf-exact", "--b", "1", "--n", "5")
    assert code == 2
    assert "disk" in err


def test_two_edges_rejected(capsys):
    code, _, _ = run(
        capsys, "coeffs", "--b", "1", "--disk", "s=0,u=0.1", "--disk", "s=1,u=0.1"
    )
    assert code == 2


def test_zn_subcommand(capsys):
    code, out, _ = run(capsys, "zn", "--b", "1", "--alpha", "0", "--n", "500")
    assert code == 0
    payload = json.loads(out)
    assert payload["includes_constant"] is True
    assert abs(payload["residual"]) < 1e-6


def test_sample_csv_and_json(capsys, tmp_path):
    code, out, _ = run(
        capsys,
        "sample", "--b", "1", "--alpha", "0", "--n", "20", "--disk", "r=0.5",
        "--disk", "r=0.9", "--num-samples", "8", "--seed", "3", "--format", "csv",
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "sample,count_1,count_2"
    assert len(lines) == 9

    out_path = tmp_path / "summary.json"
    code, _, _ = run(
        capsys,
        "sample", "--b", "1", "--alpha", "0", "--n", "20", "--disk", "r=0.5",
        "--num-samples", "200", "--seed", "3", "--out", str(out_path),
    )
    assert code == 0
    payload = json.loads(out_path.read_text())
    assert payload["num_samples"] == 200
    assert len(payload["mean"]) == 1
    assert len(payload["se"]) == 1


def test_verify_residual_pass_and_fail(capsys):
    code, out, _ = run(
        capsys,
        "verify-residual", "--b", "1", "--alpha", "0", "--disk", "r=0.6,u=1",
        "--n-values", "200,400,800,1600",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["pass"] is True
    assert payload["experiment"] == "residual_scan"

    # impossible rate window forces a verification failure (exit 3)
    code, out, _ = run(
        capsys,
        "verify-residual", "--b", "1", "--alpha", "0", "--disk", "r=0.6,u=1",
        "--n-values", "200,400,800,1600", "--rate-lo", "-0.2", "--rate-hi", "-0.1",
    )
    assert code == 3
    assert json.loads(out)["pass"] is False


def test_verify_clt_small(capsys):
    code, out, _ = run(
        capsys,
        "verify-clt", "--b", "1", "--alpha", "0", "--n", "400", "--bulk-r", "0.6",
        "--num-samples", "3000", "--seed", "5", "--tol", "0.2",
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["pass"] is True
    cov = payload["outputs"]["covariance"]
    assert len(cov) == 1 and len(cov[0]) == 1


def test_specfun_test_csv(capsys):
    code, out, _ = run(
        capsys, "specfun-test", "--a-points", "3", "--lam-points", "3", "--dps", "30"
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "a,lambda,regime,abs_err_vs_oracle"
    assert len(lines) == 10
    worst = max(float(line.split(",")[3]) for line in lines[1:])
    assert worst < 1e-13


def test_runconfig_round_trip_idempotent():
    from mlcounts.cli import RunConfig, build_parser

    argv = ["verify-residual", "--b", "1.5", "--alpha", "0.25",
            "--disk", "r=0.5,u=0.2", "--disk", "s=0.3,u=-0.1",
            "--n-values", "100,200,400,800", "--rate-lo", "-1.35", "--rate-hi", "-0.75"]
    args = build_parser().parse_args(argv)
    cfg = RunConfig.from_args(args)
    canon = cfg.canonical()
    again = RunConfig.from_canonical(canon)
    assert again == cfg
    assert again.canonical() == canon
    assert canon["disks"] == [{"r": 0.5, "u": 0.2}, {"s": 0.3, "u": -0.1}]
    assert canon["tolerances"] == {"rate_lo": -1.35, "rate_hi": -0.75}


def test_threads_env_fallback(capsys, monkeypatch):
    monkeypatch.setenv("ML_COUNTS_THREADS", "2")
    code, out, _ = run(
        capsys,
        "sample", "--b", "1", "--alpha", "0", "--n", "10", "--disk", "r=0.5",
        "--num-samples", "64", "--seed", "1", "--format", "csv",
    )
    assert code == 0
    monkeypatch.setenv("ML_COUNTS_THREADS", "1")
    code2, out2, _ = run(
        capsys,
        "sample", "--b", "1", "--alpha", "0", "--n", "10", "--disk", "r=0.5",
        "--num-samples", "64", "--seed", "1", "--format", "csv",
    )
    assert out == out2
