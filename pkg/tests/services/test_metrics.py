import numpy as np
import pytest

from edgeplan.core.models import ModelCapacity
from edgeplan.core.service import make_floorplan
from edgeplan.metrics.models import (
    LevelCounts,
    Matcher,
    MetricsReport,
    MetricThresholds,
)
from edgeplan.metrics.service import (
    _greedy_pairs,
    _optimal_pairs,
    aggregate,
    angle_metrics,
    corner_metrics,
    evaluate_dataset,
    evaluate_scene,
    polygon_iou,
    room_metrics,
    sweep_eps,
)
from edgeplan.polygonization.models import PolygonVertices
from edgeplan.polygonization.service import floorplan_to_polygons
from tests.utils import (
    CENTER_SQUARE,
    L_SHAPE,
    LEFT_RECT,
    RIGHT_RECT,
    SMALL,
    UNIT_SQUARE,
    floorplan_of,
    saturated,
    square_loop,
    star_polygon,
)

DEFAULTS = MetricThresholds()
PIXEL = 1.0 / 256


def _poly(loop) -> PolygonVertices:
    return PolygonVertices.from_tuples(loop)


def _random_plan(rng):
    centers = [(0.25, 0.25), (0.75, 0.3), (0.5, 0.75)]
    loops = [
        star_polygon(rng, int(rng.integers(3, 10)), center=c, r_min=0.08, r_max=0.2)
        for c in centers
    ]
    return floorplan_of(loops, ModelCapacity(M=4, N=10))


def test_polygon_iou():
    square = _poly(CENTER_SQUARE)
    assert polygon_iou(square, square, 256) == 1.0
    assert polygon_iou(_poly(LEFT_RECT), _poly(RIGHT_RECT), 256) == 0.0

    half = _poly(square_loop(0.0, 0.0, 0.5, 1.0))
    assert polygon_iou(half, _poly(UNIT_SQUARE), 256) == pytest.approx(0.5, rel=0.02)


def test_room_metrics():
    gt = [_poly(LEFT_RECT), _poly(RIGHT_RECT)]
    assert room_metrics(gt, gt, DEFAULTS, 128).as_tuple() == (1.0, 1.0, 1.0)
    assert room_metrics(gt, [], DEFAULTS, 128).as_tuple() == (0.0, 0.0, 0.0)

    spurious = _poly(square_loop(0.5, 0.625, 0.9375, 0.9375))
    counts = room_metrics(gt, [gt[0], spurious], DEFAULTS, 128)
    assert counts == LevelCounts(matched=1, predicted=2, actual=2)
    assert counts.as_tuple() == (0.5, 0.5, 0.5)


def test_room_metrics_iou_threshold():
    gt = [_poly(square_loop(0.0, 0.0, 0.5, 1.0))]
    # IoU 0.8
    pred = [_poly(square_loop(0.0, 0.0, 0.5, 0.8))]
    assert room_metrics(gt, pred, DEFAULTS, 256).matched == 1
    strict = MetricThresholds(room_iou_min=0.9)
    assert room_metrics(gt, pred, strict, 256).matched == 0


def test_corner_metrics():
    gt = [_poly(CENTER_SQUARE)]
    assert corner_metrics(gt, gt, DEFAULTS, 256).as_tuple() == (1.0, 1.0, 1.0)

    far = [_poly([(0.25 - 20 * PIXEL, 0.25)] + CENTER_SQUARE[1:])]
    counts = corner_metrics(gt, far, DEFAULTS, 256)
    assert counts == LevelCounts(matched=3, predicted=4, actual=4)

    # exactly on the threshold still matches
    edge = [_poly([(0.25 - 10 * PIXEL, 0.25)] + CENTER_SQUARE[1:])]
    assert corner_metrics(gt, edge, DEFAULTS, 256).matched == 4


def test_angle_metrics():
    gt = [_poly(square_loop(0.25, 0.25, 0.375, 0.375))]
    assert angle_metrics(gt, gt, DEFAULTS, 256).as_tuple() == (1.0, 1.0, 1.0)

    # pulling one corner out by 4 px turns two right angles into 82.9 and 97.1
    pulled = [(0.25, 0.25), (0.375 + 4 * PIXEL, 0.25), (0.375, 0.375), (0.25, 0.375)]
    skewed = [_poly(pulled)]
    assert corner_metrics(gt, skewed, DEFAULTS, 256).matched == 4
    assert angle_metrics(gt, skewed, DEFAULTS, 256).matched == 2

    loose = MetricThresholds(angle_tol_deg=7.5)
    assert angle_metrics(gt, skewed, loose, 256).matched == 4


def test_angle_metrics_unmatched_corner():
    gt = [_poly(CENTER_SQUARE)]
    far = [_poly([(0.25 - 20 * PIXEL, 0.25)] + CENTER_SQUARE[1:])]
    counts = angle_metrics(gt, far, DEFAULTS, 256)
    assert counts.matched <= 3
    assert counts.predicted == counts.actual == 4


def test_greedy_and_optimal_pairs():
    # greedy takes the cheap (0, 0) pair and strands row 1
    cost = np.array([[4.0, 8.0], [6.0, 18.0]])
    accept = cost <= 10.0
    assert _greedy_pairs(cost, accept) == [(0, 0)]
    assert sorted(_optimal_pairs(cost, accept)) == [(0, 1), (1, 0)]

    assert _greedy_pairs(np.zeros((0, 3)), np.zeros((0, 3), bool)) == []
    assert _optimal_pairs(np.ones((2, 3)), np.zeros((2, 3), bool)) == []


def test_matcher_option():
    gt = [_poly(LEFT_RECT), _poly(RIGHT_RECT), _poly(L_SHAPE)]
    for matcher in Matcher:
        counts = room_metrics(gt, gt, DEFAULTS, 128, matcher=matcher)
        assert counts.as_tuple() == (1.0, 1.0, 1.0)


def test_evaluate_scene_identity():
    rng = np.random.default_rng(10)
    for _ in range(100):
        gt = _random_plan(rng)
        report = evaluate_scene(gt, gt, resolution=128)
        assert report.room.f1 == 1.0
        assert report.corner.f1 == 1.0
        assert report.angle.f1 == 1.0
        assert report.room_iou == 1.0


def test_evaluate_scene_inputs():
    gt = floorplan_of([LEFT_RECT, RIGHT_RECT], scene_id="s")

    report = evaluate_scene(gt, saturated(gt), resolution=128)
    assert report.to_dict(percent=True)["room"]["f1"] == 100.0
    assert report.scene_id == "s"

    polys = [_poly(LEFT_RECT), _poly(RIGHT_RECT)]
    assert evaluate_scene(gt, polys, resolution=128).corner.f1 == 1.0

    empty = saturated(make_floorplan([], SMALL))
    report = evaluate_scene(gt, empty, resolution=128)
    assert report.room.recall == report.corner.recall == report.angle.recall == 0.0
    assert report.room_iou == 0.0


def test_evaluate_scene_removing_a_room():
    gt = floorplan_of([LEFT_RECT, RIGHT_RECT, L_SHAPE])
    full = evaluate_scene(gt, gt, resolution=128)
    fewer = evaluate_scene(gt, floorplan_of([LEFT_RECT, L_SHAPE]), resolution=128)

    assert fewer.room.recall < full.room.recall
    assert fewer.room.precision >= full.room.precision


def _jittered(poly: PolygonVertices, rng) -> PolygonVertices:
    pts = poly.as_array() + rng.uniform(-0.02, 0.02, size=(len(poly), 2))
    return _poly(np.clip(pts, 0.0, 1.0))


def test_threshold_monotonicity():
    rng = np.random.default_rng(21)
    steps = [
        MetricThresholds(room_iou_min=0.9, corner_dist_max=2.0, angle_tol_deg=1.0),
        MetricThresholds(room_iou_min=0.7, corner_dist_max=5.0, angle_tol_deg=5.0),
        MetricThresholds(room_iou_min=0.5, corner_dist_max=10.0, angle_tol_deg=10.0),
    ]
    for _ in range(10):
        gt = floorplan_to_polygons(_random_plan(rng), 0.1)
        pred = [_jittered(p, rng) for p in gt]

        previous = (0, 0, 0)
        for t in steps:
            counts = (
                room_metrics(gt, pred, t, 128).matched,
                corner_metrics(gt, pred, t, 128).matched,
                angle_metrics(gt, pred, t, 128).matched,
            )
            assert all(c >= p for c, p in zip(counts, previous))
            previous = counts


def _two_scenes():
    a = evaluate_scene(
        floorplan_of([LEFT_RECT, RIGHT_RECT], scene_id="a"),
        [_poly(LEFT_RECT)],
        resolution=128,
    )
    spurious = [
        square_loop(0.0, 0.0, 0.1, 0.1),
        square_loop(0.9, 0.0, 1.0, 0.1),
        square_loop(0.0, 0.9, 0.1, 1.0),
    ]
    b = evaluate_scene(
        floorplan_of([CENTER_SQUARE], scene_id="b"),
        [_poly(CENTER_SQUARE)] + [_poly(s) for s in spurious],
        resolution=128,
    )
    return a, b


def test_aggregate_micro_average():
    a, b = _two_scenes()
    report = aggregate([a, b])

    assert report.micro.room == LevelCounts(matched=2, predicted=5, actual=3)
    assert report.micro.room.precision == pytest.approx(0.4)
    assert report.micro.room.recall == pytest.approx(2 / 3)
    assert report.macro["room"]["precision"] == pytest.approx(0.625)
    assert report.macro["room"]["recall"] == pytest.approx(0.75)
    assert report.micro.room_iou == pytest.approx((a.iou_sum + b.iou_sum) / 3)


def test_aggregate_empty():
    report = aggregate([])
    assert report.scenes == []
    assert report.micro == MetricsReport()
    assert report.macro["room"]["f1"] == 0.0


@pytest.mark.asyncio
async def test_evaluate_dataset():
    a_gt = floorplan_of([LEFT_RECT, RIGHT_RECT], scene_id="a")
    b_gt = floorplan_of([CENTER_SQUARE], scene_id="b")
    pairs = [(b_gt, saturated(b_gt)), (a_gt, [_poly(LEFT_RECT)])]

    report = await evaluate_dataset(pairs, workers=2, resolution=128)

    assert [s.scene_id for s in report.scenes] == ["a", "b"]
    assert report.micro.room == LevelCounts(matched=2, predicted=2, actual=3)


def test_sweep_eps():
    gt = floorplan_of([LEFT_RECT, L_SHAPE])
    results = sweep_eps(gt, saturated(gt), resolution=128)

    assert [eps for eps, _ in results] == [1e-4, 0.01, 0.05, 0.1, 0.2]
    assert all(r.room.f1 == 1.0 and r.corner.f1 == 1.0 for _, r in results)
