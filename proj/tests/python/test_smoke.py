import math
from pathlib import Path

import pytest

import tetherplan

ROOT = Path(__file__).resolve().parents[2]
PICKUP = str(ROOT / "scenarios" / "pickup_target_2_0_1.yaml")


def test_catenary_matches_its_length():
    cable = tetherplan.CableProperties()
    cable.mass_per_length = 1.4e-4
    s = tetherplan.solve_catenary(2.0, 0.0, 2.5, cable)
    assert math.isclose(s.length, 2.5, rel_tol=1e-12)
    assert math.isclose(2 * s.a * math.sinh(1.0 / s.a), 2.5, rel_tol=1e-9)
    assert tetherplan.max_length(0.0, 3.0, cable) == pytest.approx(3.1)


def test_short_cable_raises():
    with pytest.raises(tetherplan.TetherplanError):
        tetherplan.solve_catenary(3.0, 4.0, 4.9, tetherplan.CableProperties())


def test_plan_keeps_the_corridor(tmp_path):
    sc = tetherplan.Scenario.load(PICKUP)
    report = tetherplan.plan(sc)
    assert report.ok
    assert report.exit_code == 0
    assert report.max_squared_violation < 1e-3
    end = report.evaluate(report.duration)
    assert list(end) == pytest.approx([2.0, 0.0, 1.0], abs=1e-9)
    report.write(sc, str(tmp_path))
    assert (tmp_path / "trajectory.csv").exists()


def test_parameters_and_sweep():
    sc = tetherplan.Scenario.load(PICKUP)
    assert "goal.z" in tetherplan.parameter_names()
    header, rows = tetherplan.sweep(sc, [("goal.z", [0.0, 2.0])], jobs=2)
    assert len(rows) == 2
    ok = header.index("success")
    assert all(r[ok] == "1" for r in rows)


def test_bad_parameter_name():
    sc = tetherplan.Scenario.parse("scenario: {goal: {position_m: [1, 0, -1]}}\n")
    with pytest.raises(tetherplan.TetherplanError):
        sc.set("goal.w", 1.0)


def test_pickup_tracks_the_plan():
    sc = tetherplan.Scenario.load(PICKUP)
    log = tetherplan.simulate_pickup(sc, tetherplan.plan(sc))
    assert log["max_tracking_error"] < 0.05
    assert log["corridor_violations"] == 0
