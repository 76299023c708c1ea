"""Command-line interface: exit codes, output formats, determinism."""

import csv
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from conftest import CONFIG_DIR

import oracles

CLI = [sys.executable, "-m", "hejhal_lab.cli"]


def run_cli(*args, **kw):
    return subprocess.run(CLI + [str(a) for a in args],
                          capture_output=True, text=True, **kw)


@pytest.fixture(scope="module")
def small_disk(tmp_path_factory):
    cfg = {"curves": [{"role": "outer",
                       "coeffs": [[0, 0.0, 0.0], [1, 1.0, 0.0]]}],
           "N": 96, "w": [0.0, 0.0]}
    p = tmp_path_factory.mktemp("cli") / "disk.json"
    p.write_text(json.dumps(cfg))
    return p


@pytest.fixture(scope="module")
def small_annulus(tmp_path_factory):
    cfg = {"curves": [{"role": "outer",
                       "coeffs": [[0, 0.0, 0.0], [1, 1.0, 0.0]]},
                      {"role": "inner",
                       "coeffs": [[0, 0.0, 0.0], [1, 0.5, 0.0]]}],
           "N": 128, "cuts": "auto"}
    p = tmp_path_factory.mktemp("cli") / "annulus.json"
    p.write_text(json.dumps(cfg))
    return p


def write_config(tmp_path, payload, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(payload))
    return p


# ---------------------------------------------------------------- verify

def test_verify_disk_passes_and_reports_json(small_disk, tmp_path):
    out = tmp_path / "report.json"
    r = run_cli("verify", small_disk, "--out", out)
    assert r.returncode == 0, r.stderr
    rep = json.loads(out.read_text())
    assert rep["all_pass"] is True
    assert rep["connectivity"] == 1
    assert rep["N"] == 96
    for c in rep["checks"]:
        assert set(c) == {"name", "value", "tolerance", "pass"}
        assert c["pass"] is True


def test_verify_deterministic_bytes(small_disk, tmp_path):
    o1, o2 = tmp_path / "r1.json", tmp_path / "r2.json"
    assert run_cli("verify", small_disk, "--out", o1).returncode == 0
    assert run_cli("verify", small_disk, "--out", o2).returncode == 0
    assert o1.read_bytes() == o2.read_bytes()


def test_verify_self_intersecting_curve_exits_2(tmp_path):
    cfg = {"curves": [{"role": "outer",
                       "coeffs": [[0, 0.0, 0.0], [1, 1.0, 0.0],
                                  [2, 0.9, 0.0]]}], "N": 128}
    r = run_cli("verify", write_config(tmp_path, cfg))
    assert r.returncode == 2
    assert "intersect" in r.stderr.lower()


def test_verify_unattainable_tolerance_exits_1(small_disk, tmp_path):
    cfg = json.loads(small_disk.read_text())
    cfg["tolerances"] = {"kernel_identity_residual": 1e-16}
    r = run_cli("verify", write_config(tmp_path, cfg))
    assert r.returncode == 1


def test_verify_input_errors_exit_2(tmp_path):
    circle = [[0, 0.0, 0.0], [1, 1.0, 0.0]]
    bad_configs = [
        {"curves": [{"role": "outer", "coeffs": circle}], "N": 97},      # odd N
        {"curves": [{"role": "outer", "coeffs": circle}], "N": -8},
        {"curves": [{"role": "inner", "coeffs": circle}]},               # no outer
        {"curves": [{"role": "outer", "coeffs": circle}],
         "tolerances": {"no_such_check": 1e-6}},
        {"curves": [{"role": "outer", "coeffs": circle}],
         "tolerances": {"pi_integral": 0.0}},
        {"curves": "not-a-list"},
    ]
    for i, cfg in enumerate(bad_configs):
        r = run_cli("verify", write_config(tmp_path, cfg, f"bad{i}.json"))
        assert r.returncode == 2, (i, r.stderr)
    assert run_cli("verify", tmp_path / "missing.json").returncode == 2
    garbled = tmp_path / "garbled.json"
    garbled.write_text("{not json")
    assert run_cli("verify", garbled).returncode == 2


# ---------------------------------------------------------------- lambda

def test_lambda_requires_multiple_connectivity(small_disk, tmp_path):
    r = run_cli("lambda", small_disk, "--method", "fit",
                "--out", tmp_path / "l.csv")
    assert r.returncode == 2
    assert "connectivity" in r.stderr


def test_lambda_annulus_csv(small_annulus, tmp_path):
    out = tmp_path / "lambda.csv"
    r = run_cli("lambda", small_annulus, "--method", "fit", "--out", out)
    assert r.returncode == 0, r.stderr
    rows = list(csv.DictReader(out.read_text().splitlines()))
    lam_rows = [x for x in rows if x["kind"] == "lambda"]
    mu_rows = [x for x in rows if x["kind"] == "mu"]
    assert len(lam_rows) == 1 and len(mu_rows) == 1
    lam = float(lam_rows[0]["value"])
    assert abs(lam - oracles.ANNULUS_LAMBDA11) / oracles.ANNULUS_LAMBDA11 < 1e-4
    assert float(mu_rows[0]["value"]) > 0


def test_lambda_method_periods(small_annulus, tmp_path):
    out = tmp_path / "lambda_H.csv"
    r = run_cli("lambda", small_annulus, "--method", "periods", "--out", out)
    assert r.returncode == 0, r.stderr
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert all(x["method"] == "H-periods" for x in rows)


# ---------------------------------------------------------------- sweep

def test_sweep_zero_steps_exits_2(small_disk):
    r = run_cli("sweep", small_disk, "--steps", "0")
    assert r.returncode == 2


def test_sweep_disk_and_determinism(small_disk, tmp_path):
    o1, o2 = tmp_path / "t1.csv", tmp_path / "t2.csv"
    r = run_cli("sweep", small_disk, "--steps", "5", "--out", o1)
    assert r.returncode == 0, r.stderr
    rows = list(csv.DictReader(o1.read_text().splitlines()))
    assert len(rows) == 5
    radii = [float(x["radius"]) for x in rows]
    assert np.allclose(radii, [radii[0] * 2.0 ** (-s) for s in range(5)])
    for x in rows:
        assert x["status"] == "ok"
        assert float(x["min_mu"]) > 0
    assert run_cli("sweep", small_disk, "--steps", "5", "--out", o2).returncode == 0
    assert o1.read_bytes() == o2.read_bytes()


# ---------------------------------------------------------------- tabulate

def test_tabulate_disk_szego(small_disk, tmp_path):
    out = tmp_path / "s.csv"
    r = run_cli("tabulate", small_disk, "--kernel", "S", "--grid", "8",
                "--out", out)
    assert r.returncode == 0, r.stderr
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert rows
    for x in rows:
        z = complex(float(x["z_re"]), float(x["z_im"]))
        got = complex(float(x["value_re"]), float(x["value_im"]))
        assert abs(got - oracles.disk_szego(z, 0.0)) < 1e-9


def test_tabulate_disk_garabedian_drops_diagonal(small_disk, tmp_path):
    out = tmp_path / "l.csv"
    r = run_cli("tabulate", small_disk, "--kernel", "L", "--grid", "8",
                "--out", out)
    assert r.returncode == 0, r.stderr
    rows = list(csv.DictReader(out.read_text().splitlines()))
    for x in rows:
        z = complex(float(x["z_re"]), float(x["z_im"]))
        assert abs(z) > 1e-12            # the z = w = 0 point is dropped
        got = complex(float(x["value_re"]), float(x["value_im"]))
        assert abs(got - oracles.disk_garabedian(z, 0.0)) < 1e-9


def test_tabulate_annulus_fprime(small_annulus, tmp_path):
    out = tmp_path / "f.csv"
    r = run_cli("tabulate", small_annulus, "--kernel", "F", "--grid", "10",
                "--out", out)
    assert r.returncode == 0, r.stderr
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert rows
    for x in rows:
        z = complex(float(x["z_re"]), float(x["z_im"]))
        got = complex(float(x["value_re"]), float(x["value_im"]))
        assert abs(got - oracles.annulus_fprime(z)) < 1e-7
        assert float(x["w_re"]) == 1.0   # differential index in the w column


def test_tabulate_bergman_hermitian_spot_check(tmp_path):
    # a thick annulus leaves a wide band of points deep enough to serve as
    # the parameter point w at this resolution
    cfg = {"curves": [{"role": "outer",
                       "coeffs": [[0, 0.0, 0.0], [1, 1.0, 0.0]]},
                      {"role": "inner",
                       "coeffs": [[0, 0.0, 0.0], [1, 0.25, 0.0]]}],
           "N": 128}

    def parse(path):
        return {complex(float(x["z_re"]), float(x["z_im"])):
                complex(float(x["value_re"]), float(x["value_im"]))
                for x in csv.DictReader(path.read_text().splitlines())}

    # discovery pass: learn the tabulation grid (independent of w)
    out0 = tmp_path / "k0.csv"
    r = run_cli("tabulate", write_config(tmp_path, cfg, "k0.json"),
                "--kernel", "K", "--grid", "6", "--out", out0)
    assert r.returncode == 0, r.stderr
    deep = sorted((z for z in parse(out0) if 0.45 < abs(z) < 0.76),
                  key=lambda z: (z.real, z.imag))
    z1, z2 = deep[0], deep[-1]
    assert z1 != z2
    # K(z2, z1) from the table parameterized at z1, and vice versa
    cfg["w"] = [z1.real, z1.imag]
    out1 = tmp_path / "k1.csv"
    assert run_cli("tabulate", write_config(tmp_path, cfg, "k1.json"),
                   "--kernel", "K", "--grid", "6",
                   "--out", out1).returncode == 0
    cfg["w"] = [z2.real, z2.imag]
    out2 = tmp_path / "k2.csv"
    assert run_cli("tabulate", write_config(tmp_path, cfg, "k2.json"),
                   "--kernel", "K", "--grid", "6",
                   "--out", out2).returncode == 0
    k_21 = parse(out1)[z2]
    k_12 = parse(out2)[z1]
    assert abs(k_12 - np.conj(k_21)) < 1e-8 * abs(k_12)


def test_tabulate_rejects_bad_grid(small_disk):
    assert run_cli("tabulate", small_disk, "--kernel", "S",
                   "--grid", "1").returncode == 2


def test_unknown_subcommand_exits_2(small_disk):
    assert run_cli("frobnicate", small_disk).returncode == 2
