import json
import math
from pathlib import Path

import pytest

import refract_kit as rk

ROOT = Path(__file__).resolve().parents[2]
A = rk.LevyModel(2.0, 0.0)
B = rk.LevyModel(0.0, 2.0, [(1.0, 1.0)])
SPEC = rk.Refraction(0.5, 1.0)
TWO = rk.Weight.two_level(1.0, 0.5, 1.0)


def test_scale_brownian():
    t = rk.ScaleTable(A, 1.0, 0.01, 40.0)
    assert t.W(1.0) == pytest.approx(math.sinh(1.0), rel=1e-12)
    assert t.Z(1.0) == pytest.approx(math.cosh(1.0), rel=1e-12)
    assert t.laplace_residual(t.phi + 1.0, 40.0) < 1e-6


def test_exit_fixture_a():
    p = rk.ExitProblem(A, SPEC, rk.Weight.constant(0.0), 2.0, 0.0, 3.0, 0.01)
    assert p.exit_up() == pytest.approx(0.51785, rel=1e-4)
    assert p.exit_up() + p.exit_down() == pytest.approx(1.0, abs=1e-12)


def test_resolvent_identity_and_errors():
    p = rk.ExitProblem(B, SPEC, TWO, 1.5, 0.0, 3.0, 0.01)
    assert abs(p.resolvent_weight_integral() - (1 - p.exit_up() - p.exit_down())) < 1e-3
    with pytest.raises(rk.DegenerateProblem):
        p.creeping(0.5)
    with pytest.raises(ValueError):
        rk.ExitProblem(B, SPEC, TWO, 4.0, 0.0, 3.0, 0.01)


def test_simulate_matches_formula():
    p = rk.ExitProblem(B, SPEC, TWO, 1.5, 0.0, 3.0, 0.01)
    r = rk.simulate(B, SPEC, TWO, 1.5, 0.0, 3.0, n_paths=20000, seed=3)
    assert abs(r["exit_up"]["mean"] - p.exit_up()) < 3 * r["exit_up"]["stderr"]
    assert r["hitting"] is None


def test_one_sided():
    v = rk.one_sided_down(B, SPEC, TWO, 2.0, 0.0, 0.01)
    far = rk.ExitProblem(B, SPEC, TWO, 2.0, 0.0, 20.0, 0.01)
    assert abs(v - far.exit_down()) < 1e-4


def test_run_cli_contract(tmp_path):
    rc, out, err = rk.run("exit", str(ROOT / "configs" / "fixture_a.json"), str(tmp_path))
    assert rc == 0, err
    report = json.loads((tmp_path / "exit.json").read_text())
    assert report["results"]["exit_up"] == pytest.approx(0.51785, rel=1e-4)
    bad = tmp_path / "bad.json"
    bad.write_text('{"model": ')
    rc, _, err = rk.run("exit", str(bad), str(tmp_path))
    assert rc == 2 and "malformed JSON" in err
