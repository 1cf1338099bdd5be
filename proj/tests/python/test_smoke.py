import math
import pathlib

import pytest

import subharmonic_bounds as sbh

CORPUS = pathlib.Path(__file__).resolve().parents[2] / "corpus"

DISK = {
    "schema": 1,
    "name": "py_disk",
    "dimension": 2,
    "D": {"type": "ball", "center": [0, 0], "radius": 1},
    "G": {"type": "ball", "center": [0, 0], "radius": 2},
    "o": [0, 0],
    "function": {"kind": "log_poly_abs", "zeros": [[0.5, 0]]},
    "S": {"points": [[-0.5, 0], [0.2, 0.3]]},
    "checks": ["pointwise_lower_bound"],
}


def test_kernel_values():
    assert sbh.kernel_k(1, 2.0) == 2.0
    assert sbh.kernel_k(2, 1.0) == 0.0
    assert sbh.kernel_k(2, 0.0) == -math.inf
    assert sbh.kernel_k(3, 0.5) == pytest.approx(-2.0)
    assert sbh.sphere_area(3) == pytest.approx(4 * math.pi)


def test_ball_distance():
    assert sbh.ball_pair_distance([0, 0], 1.0, [0, 0], [0.5, 0]) == pytest.approx(3.0)
    assert sbh.center_distance_formula(2, 1.0, 0.5) == pytest.approx(3.0)


def test_content_bound_single_point():
    assert sbh.content_upper_bound([[0.0, 0.0]], 1.0, 1.0, 0.5) >= 0.0


def test_pointwise_report():
    rep = sbh.run_scenario(DISK, seed=3)
    reports = rep["scenarios"][0]["reports"]
    assert len(reports) == 2
    assert all(r["verdict"] == "pass" for r in reports)
    # The exact bound at -1/2 is -2 ln 3 - ln 2; the sampled sup over the
    # circle is rounded up, which only lowers the computed bound.
    exact = -2 * math.log(3) - math.log(2)
    assert exact - 0.05 <= reports[0]["rhs"] <= exact


def test_schema_errors():
    bad = dict(DISK, schema=2)
    with pytest.raises(ValueError):
        sbh.run_scenario(bad)


def test_negative_fixture_fails():
    rep = sbh.verify(str(CORPUS / "negative" / "wrong_sided_sup.json"))
    assert rep["summary"]["fail"] == 2
    assert rep["summary"]["pass"] == 0
