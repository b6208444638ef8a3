import json
import math

import numpy as np
import pytest

import pcgeom


def test_exact_volumes():
    v = pcgeom.volume(pcgeom.Body.standard_ball(0.5, 2))
    assert v["method"] == "exact"
    assert v["value"] == pytest.approx(2.0 / 3.0, abs=1e-14)
    assert pcgeom.volume(pcgeom.Body.euclidean_ball(3))["value"] == pytest.approx(4.0 * math.pi / 3.0)


def test_gauge_and_membership():
    box = pcgeom.Body.box(np.array([1.0, 2.0]))
    assert pcgeom.gauge(box, np.array([0.5, 2.0])) == pytest.approx(1.0)
    assert pcgeom.contains(box, np.array([0.9, 1.9]))
    assert not pcgeom.contains(box, np.array([1.1, 0.0]))
    ball = pcgeom.Body.standard_ball(0.5, 2)
    assert pcgeom.gauge(ball, np.array([0.25, 0.25])) == pytest.approx(1.0)


def test_volume_product_and_polar():
    s = pcgeom.volume_product(pcgeom.Body.box(np.ones(2)))
    assert s["value"] == pytest.approx(2.0 * math.sqrt(2.0), abs=1e-9)
    gens = [np.array([1.0, 0.2]), np.array([-0.3, 1.0]), np.array([0.7, 0.7])]
    b = pcgeom.Body.pconv_hull(gens, 0.5)
    lhs, rhs = pcgeom.polar(b), pcgeom.polar(pcgeom.convex_hull(b))
    for t in np.linspace(0.0, math.pi, 17):
        theta = np.array([math.cos(t), math.sin(t)])
        assert pcgeom.gauge(lhs, theta) == pytest.approx(pcgeom.gauge(rhs, theta), rel=1e-9)


def test_ellipsoids():
    e = pcgeom.enclosing_ellipsoid(pcgeom.Body.box(np.ones(2)))
    assert pcgeom.ellipsoid_shape(e) == pytest.approx(0.5 * np.eye(2), abs=1e-8)
    a = np.array([[2.0, 0.3], [0.3, 1.0]])
    q = pcgeom.Body.ellipsoid(a)
    d = pcgeom.kolmogorov_numbers(q, pcgeom.Body.euclidean_ball(2))
    assert d[:2] == pytest.approx(sorted(1.0 / np.sqrt(np.linalg.eigvalsh(a)), reverse=True))
    assert pcgeom.milman_functional(q, q)["value"] == pytest.approx(4.0)


def test_errors_map_to_exceptions():
    with pytest.raises(pcgeom.DimensionError):
        pcgeom.volume_sum(pcgeom.Body.euclidean_ball(2), pcgeom.Body.euclidean_ball(3))
    with pytest.raises(pcgeom.InvalidBodyError):
        pcgeom.Body.pconv_hull([np.array([1.0, 0.0])], 0.5)
    with pytest.raises(pcgeom.Error):
        pcgeom.run_experiment("nope")


def test_run_experiment_json():
    text = pcgeom.run_experiment("santalo", family="random_polytope(6)", dim=2, count=2, seed=3, mc_budget=5000)
    report = json.loads(text)
    assert report["name"] == "santalo"
    assert len(report["instances"]) == 2
    assert report["summary"]["max"] <= 1.0 + 0.05
    assert text == pcgeom.run_experiment("santalo", family="random_polytope(6)", dim=2, count=2, seed=3, mc_budget=5000)
    assert "brunn_minkowski" in pcgeom.experiment_names()


def test_run_cli_exit_codes(tmp_path):
    args = ["--experiment", "brunn_minkowski", "--family", "slab_pair(0.01)", "--count", "1",
            "--mc-budget", "5000", "--out", str(tmp_path), "--emit", "json"]
    assert pcgeom.run_cli(args) == 0
    assert json.loads((tmp_path / "brunn_minkowski_0.json").read_text())["instances"][0]["ratio"] == pytest.approx(5.05)
    assert pcgeom.run_cli(["--experiment", "santalo", "--dim", "9"]) == 2
