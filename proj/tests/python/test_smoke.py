import json
import math

import pytest

import champ


def test_geodesy():
    d = champ.haversine_distance(champ.GeoPoint(0, 0), champ.GeoPoint(0, 1))
    assert abs(d - 111195.08) < 0.01
    start = champ.GeoPoint(32.88, -117.23)
    end = champ.destination_point(start, 45.0, 1000.0)
    assert math.isclose(champ.haversine_distance(start, end), 1000.0, rel_tol=1e-9)
    assert abs(champ.initial_bearing(start, end) - 45.0) < 1e-6
    with pytest.raises(champ.CoincidentPoints):
        champ.initial_bearing(start, start)


def test_stopping_distance():
    p = champ.AdvisoryParams(offset=1.0)
    assert abs(champ.stopping_distance(50, p) - 14.178) < 0.001
    assert abs(champ.stopping_distance(100, p) - 56.478) < 0.001
    with pytest.raises(champ.InvalidParams):
        champ.AdvisoryParams(friction=0.0)


def test_errors_share_a_base():
    assert issubclass(champ.ParseError, champ.Error)
    with pytest.raises(champ.Error):
        champ.parse_drive_log("type,t,lat,lon,speed_kmh,count\nfix,x,0,0,,\n", "csv", "c")


def test_index_matches_brute_force():
    pts = [champ.destination_point(champ.GeoPoint(10, 10), b * 7.0, 50.0 + b)
           for b in range(200)]
    index = champ.SpatialIndex(pts, leaf_capacity=4)
    assert len(index) == 200
    for i in range(50):
        q = champ.destination_point(champ.GeoPoint(10, 10), i * 13.0, i * 3.0)
        assert index.nearest(q) == champ.brute_force_nearest(pts, q)
    with pytest.raises(champ.NoNodes):
        champ.SpatialIndex([]).nearest(champ.GeoPoint(0, 0))


def test_pipeline_on_synthetic_scenario():
    sc = champ.generate(champ.default_scenario("occlusion", 7))
    m = champ.build_map(sc.train_logs)
    assert m.total_weight() > 0
    assert champ.load_map(champ.save_map(m)) == m
    result = champ.replay(sc.test_log, m)
    report = champ.evaluate_run(result, sc.ground_truth)
    assert report.precision == 1.0
    assert report.recall == 1.0
    assert json.loads(report.to_json())["covered_windows"] == 2
    assert champ.load_advisories(champ.save_advisories(result)) == result


def test_metrics():
    assert champ.precision(3, 1) == 0.75
    assert champ.recall(1, 3) == 0.25
    assert champ.recall(0, 0) == 1.0


def test_cli_in_process(tmp_path):
    code, out, _ = champ.run_cli(["synth", "--scenario", "blind-turn", "--seed", "2",
                                  "--out-dir", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "blind-turn_s2_test.gt.json").exists()
    code, _, err = champ.run_cli(["replay"])
    assert code == 2
    assert "required" in err
