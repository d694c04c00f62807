import json
import math
import os
import pathlib
import subprocess

import numpy as np
import pytest

ballop = pytest.importorskip("ballop")

ROOT = pathlib.Path(__file__).resolve().parents[2]


def test_space_and_norms():
    space = ballop.Space(2, s=2.0, D=2)
    assert space.size == 6
    assert space.basis()[:3] == [[0, 0], [1, 0], [0, 1]]
    # ||z1 z2||^2 in the Hardy space of the 2-ball is 1/6.
    assert math.isclose(space.norm_sq[4], 1.0 / 6.0, rel_tol=1e-14)


def test_mobius_interchanges_points():
    a = np.array([0.3 + 0.1j, -0.2])
    phi = ballop.mobius(a)
    assert np.allclose(phi(np.zeros(2)), a, atol=1e-14)
    assert np.allclose(phi(a), 0.0, atol=1e-14)
    assert ballop.involution_defect(phi) < 1e-12


def test_composition_matrix_linear_symbol():
    V = np.array([[0.0, 0.5], [0.0, 0.0]], dtype=complex)
    space = ballop.Space(2, s=2.0, D=4)
    T = ballop.composition_matrix(space, ballop.linear_map(V))
    Tstar = ballop.composition_matrix(space, ballop.linear_map(V.conj().T))
    assert np.abs(T.conj().T - Tstar).max() < 1e-12
    assert ballop.normality_residual(space, T) > 1e-3


def test_certificates_are_dicts():
    space = ballop.Space(1, s=2.0, D=8)
    cert = ballop.certify(space, np.array([0.0]))
    assert cert["pass"] is True
    assert {r["name"] for r in cert["residuals"]} == {"isometry", "involution", "symmetry"}

    V = np.array([[0.0, 0.5], [0.0, 0.0]], dtype=complex)
    K = ballop.find_conjugation_2x2(V)
    jv = ballop.jv_pipeline(ballop.Space(2, s=2.0, D=6), V, K)
    assert jv["pass"] is True


def test_takagi_round_trip():
    rng = np.random.default_rng(3)
    Z = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    Q, _ = np.linalg.qr(Z)
    K = Q @ Q.T
    U = ballop.takagi(K)
    assert np.abs(U @ U.T - K).max() < 1e-10


def test_errors_surface_as_value_errors():
    with pytest.raises(ValueError):
        ballop.mobius(np.array([0.8, 0.8]))
    with pytest.raises(ballop.BallopError):
        ballop.Space(1, s=-1.0, D=3)


def _cli():
    for cand in (pathlib.Path(os.environ.get("BALLOP_CLI", "/nonexistent")), ROOT / "build" / "tools" / "ballop"):
        if cand.exists():
            return cand
    pytest.skip("ballop CLI not built")


def test_cli_exit_codes(tmp_path):
    cli = _cli()
    bad = subprocess.run([cli, "symcheck", "--config", ROOT / "tests/fixtures/bad_config.json", "--out", tmp_path],
                         capture_output=True)
    assert bad.returncode == 2
    ok = subprocess.run([cli, "symcheck", "--config", ROOT / "tests/fixtures/symcheck_trivial.json",
                         "--out", tmp_path / "a"], capture_output=True)
    assert ok.returncode == 0
    again = subprocess.run([cli, "symcheck", "--config", ROOT / "tests/fixtures/symcheck_trivial.json",
                            "--out", tmp_path / "b", "--threads", "3"], capture_output=True)
    assert again.returncode == 0
    body_a = (tmp_path / "a" / "report.csv").read_text().split("\n", 1)[1]
    body_b = (tmp_path / "b" / "report.csv").read_text().split("\n", 1)[1]
    assert body_a == body_b
    certs = json.loads((tmp_path / "a" / "certificates.json").read_text())
    assert any(c["exploratory"] for c in certs)
