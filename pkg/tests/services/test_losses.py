import itertools
import math

import numpy as np
import pytest

from edgeplan.core.exceptions import CapacityMismatch, LengthMismatch, TooFewVertices
from edgeplan.core.models import DirectedEdge, ModelCapacity
from edgeplan.core.service import make_mock_room, make_room
from edgeplan.denoising.models import NoiseConfig
from edgeplan.denoising.service import perturb
from edgeplan.losses.exceptions import DimensionMismatch
from edgeplan.losses.models import LossWeights, RasterMask
from edgeplan.losses.raster import rasterize
from edgeplan.losses.service import (
    bce_cls_loss,
    denoising_terms,
    dice_loss,
    edge_l1_loss,
    room_mask,
    total_loss,
)
from edgeplan.matching.models import MatchResult, PredictedRoom, PredictionSet
from edgeplan.matching.service import build_cost_matrix, match_floorplans
from edgeplan.polygonization.models import PolygonVertices
from tests.utils import (
    CENTER_SQUARE,
    LEFT_RECT,
    RIGHT_RECT,
    SMALL,
    UNIT_SQUARE,
    edges_of,
    floorplan_of,
    saturated,
    square_loop,
)

TINY = ModelCapacity(M=3, N=8)
HALF_RECT = square_loop(0.0, 0.0, 0.5, 1.0)
WEIGHT_FIELDS = [
    "lambda_cls",
    "lambda_edge",
    "lambda_ras",
    "lambda_cls_dn",
    "lambda_edge_dn",
]


def _jittered_prediction(gt, seed: int = 0) -> PredictionSet:
    rng = np.random.default_rng(seed)
    rooms = []
    for room in gt.rooms:
        tokens = []
        for t in PredictedRoom.from_sequence(room).tokens:
            if t.confidence == 0.0:
                tokens.append(t.copy(update={"confidence": 0.1}))
                continue
            x1, y1, x2, y2 = np.clip(
                np.array(t.edge.as_list()) + rng.uniform(-0.01, 0.01, 4), 0.0, 1.0
            )
            edge = DirectedEdge.from_coords(x1, y1, x2, y2)
            tokens.append(t.copy(update={"confidence": 0.9, "edge": edge}))
        rooms.append(PredictedRoom(tokens=tokens))
    return PredictionSet(rooms=rooms, scene_id=gt.scene_id)


def test_bce_cls_loss():
    assert bce_cls_loss([1], [0.5]) == pytest.approx(math.log(2), abs=1e-12)
    assert bce_cls_loss([0], [0.5]) == pytest.approx(math.log(2), abs=1e-12)
    assert bce_cls_loss([1, 0], [1 - 1e-7, 1e-7]) == pytest.approx(1e-7, rel=1e-3)

    # saturated confidences are clamped, not infinite
    assert math.isfinite(bce_cls_loss([1, 0], [0.0, 1.0]))
    assert bce_cls_loss([], []) == 0.0

    with pytest.raises(LengthMismatch):
        bce_cls_loss([1, 0], [0.5])


def test_edge_l1_loss():
    edge = DirectedEdge.from_coords(0.1, 0.1, 0.5, 0.1)
    moved = DirectedEdge.from_coords(0.13, 0.14, 0.5, 0.1)
    gt = make_room([edge], SMALL)
    pred = PredictedRoom.from_sequence(make_room([moved], SMALL))
    assert edge_l1_loss(gt, pred) == pytest.approx(0.07, abs=1e-12)

    room = make_room(edges_of(UNIT_SQUARE), SMALL)
    assert edge_l1_loss(room, PredictedRoom.from_sequence(room)) == 0.0
    assert edge_l1_loss(make_mock_room(SMALL), PredictedRoom.from_sequence(room)) == 0.0

    with pytest.raises(LengthMismatch):
        edge_l1_loss(room, PredictedRoom.from_sequence(make_room([edge], TINY)))


def test_edge_l1_loss_averages_over_valid_edges():
    edges = edges_of(CENTER_SQUARE)
    moved = list(edges)
    moved[2] = DirectedEdge.from_coords(0.75, 0.75, 0.25, 0.85)
    pred = PredictedRoom.from_sequence(make_room(moved, SMALL))
    assert edge_l1_loss(make_room(edges, SMALL), pred) == pytest.approx(0.1 / 4)


def test_rasterize():
    mask = rasterize(PolygonVertices.from_tuples(CENTER_SQUARE), 256, 256)
    assert mask.shape == (256, 256)
    assert mask.area() == 128 * 128
    assert mask.occupancy[64:192, 64:192].all()

    full = rasterize(UNIT_SQUARE, 256, 256)
    assert full.occupancy.all()

    with pytest.raises(TooFewVertices):
        rasterize([(0.0, 0.0), (1.0, 1.0)], 8, 8)


def test_rasterize_orientation_and_shape():
    ccw = rasterize(LEFT_RECT, 64, 32)
    cw = rasterize(LEFT_RECT[::-1], 64, 32)
    assert ccw.shape == (32, 64)
    assert np.array_equal(ccw.occupancy, cw.occupancy)


def test_dice_loss():
    a = rasterize(LEFT_RECT, 64, 64)
    b = rasterize(RIGHT_RECT, 64, 64)
    assert dice_loss(a, a) == 0.0
    assert dice_loss(a, b) == 1.0
    assert dice_loss(RasterMask.empty(64, 64), RasterMask.empty(64, 64)) == 0.0

    with pytest.raises(DimensionMismatch):
        dice_loss(a, RasterMask.empty(32, 64))


def test_dice_loss_analytic():
    half = rasterize(HALF_RECT, 256, 256)
    full = rasterize(UNIT_SQUARE, 256, 256)
    assert dice_loss(half, full) == pytest.approx(1.0 / 3.0, rel=0.02)

    for x1, y1 in [(0.3, 0.7), (0.55, 0.45), (0.8, 0.9)]:
        a = rasterize(square_loop(0.0, 0.0, x1, y1), 256, 256)
        b = rasterize(square_loop(0.2, 0.1, 1.0, 1.0), 256, 256)
        inter = max(0.0, x1 - 0.2) * max(0.0, y1 - 0.1)
        expected = 1.0 - 2.0 * inter / (x1 * y1 + 0.8 * 0.9)
        assert dice_loss(a, b) == pytest.approx(expected, rel=0.02, abs=1e-3)


def test_dice_loss_monotone_in_overlap():
    b = rasterize(square_loop(0.5, 0.0, 1.0, 1.0), 128, 128)
    previous = 1.0
    for shift in np.linspace(0.0, 0.5, 6):
        a = rasterize(square_loop(shift, 0.0, shift + 0.5, 1.0), 128, 128)
        value = dice_loss(a, b)
        assert value <= previous
        previous = value
    assert previous == 0.0


def test_room_mask_collapsed_room_is_empty():
    edge = DirectedEdge.from_coords(0.1, 0.1, 0.9, 0.1)
    room = make_room([edge, edge.reversed()], SMALL)
    assert room_mask(room, 0.1, 32).is_empty()


def test_total_loss_perfect_prediction():
    gt = floorplan_of([LEFT_RECT, RIGHT_RECT], TINY)
    pred = saturated(gt)
    breakdown = total_loss(gt, pred, match_floorplans(gt, pred))

    assert breakdown.edge == 0.0
    assert breakdown.ras == 0.0
    assert breakdown.cls <= 1e-6
    assert breakdown.total <= 1e-6


def test_total_loss_perfect_prediction_default_capacity():
    gt = floorplan_of([LEFT_RECT, RIGHT_RECT, CENTER_SQUARE], ModelCapacity())
    pred = saturated(gt)
    queries = perturb(gt, NoiseConfig(lambda_geo=0.0, gamma_flip=0.0, seed=2))
    breakdown = total_loss(
        gt, pred, match_floorplans(gt, pred), dn_gt=gt, dn_pred=queries.as_prediction()
    )

    assert max(breakdown.dict().values()) <= 1e-6


def test_total_loss_zero_weights():
    gt = floorplan_of([LEFT_RECT, CENTER_SQUARE], TINY)
    pred = _jittered_prediction(gt)
    zero = LossWeights(
        lambda_cls=0, lambda_edge=0, lambda_ras=0, lambda_cls_dn=0, lambda_edge_dn=0
    )
    breakdown = total_loss(gt, pred, match_floorplans(gt, pred), weights=zero)
    assert breakdown.total == 0.0
    assert breakdown.edge > 0.0


@pytest.mark.parametrize("field", WEIGHT_FIELDS)
def test_total_loss_linear_in_weights(field):
    gt = floorplan_of([LEFT_RECT, RIGHT_RECT], TINY)
    pred = _jittered_prediction(gt, seed=1)
    match = match_floorplans(gt, pred)
    cfg = NoiseConfig(lambda_geo=0.1, gamma_flip=0.3, seed=9)
    dn = perturb(gt, cfg).as_predictions()

    base = LossWeights()
    doubled = base.copy(update={field: 2 * getattr(base, field)})
    a = total_loss(gt, pred, match, dn_gt=gt, dn_pred=dn, weights=base)
    b = total_loss(gt, pred, match, dn_gt=gt, dn_pred=dn, weights=doubled)

    term = {
        "lambda_cls": a.cls,
        "lambda_edge": a.edge,
        "lambda_ras": a.ras,
        "lambda_cls_dn": a.cls_dn,
        "lambda_edge_dn": a.edge_dn,
    }[field]
    assert term > 0.0
    expected = getattr(base, field) * term
    assert b.total - a.total == pytest.approx(expected, rel=1e-9, abs=1e-12)


def test_total_loss_non_negative():
    for seed in range(5):
        gt = floorplan_of([LEFT_RECT, CENTER_SQUARE], TINY)
        pred = _jittered_prediction(gt, seed)
        breakdown = total_loss(gt, pred, match_floorplans(gt, pred))
        assert min(breakdown.dict().values()) >= 0.0


def test_total_loss_hungarian_is_cheapest():
    gt = floorplan_of([LEFT_RECT, RIGHT_RECT, CENTER_SQUARE], ModelCapacity(M=4, N=8))
    pred = _jittered_prediction(gt, seed=3)
    costs = build_cost_matrix(gt, pred)
    best = total_loss(gt, pred, match_floorplans(gt, pred)).total

    for perm in itertools.permutations(range(4)):
        other = total_loss(gt, pred, MatchResult.from_assignment(costs, list(perm)))
        assert best <= other.total + 1e-12


def test_denoising_terms():
    gt = floorplan_of([LEFT_RECT], TINY)
    queries = perturb(gt, NoiseConfig(lambda_geo=0.0, gamma_flip=0.0, seed=1))
    cls_dn, edge_dn = denoising_terms(gt, queries.as_prediction())
    assert edge_dn == 0.0
    assert cls_dn <= 1e-6

    noisy = perturb(gt, NoiseConfig(lambda_geo=0.2, gamma_flip=0.0, seed=1))
    assert denoising_terms(gt, noisy.as_prediction())[1] > 0.0

    with pytest.raises(CapacityMismatch):
        denoising_terms(gt, saturated(floorplan_of([LEFT_RECT], SMALL)))


def test_total_loss_sums_denoising_groups():
    gt = floorplan_of([LEFT_RECT, RIGHT_RECT], TINY)
    pred = saturated(gt)
    match = match_floorplans(gt, pred)
    queries = perturb(gt, NoiseConfig(lambda_geo=0.1, gamma_flip=0.2, seed=4, groups=3))

    single = [denoising_terms(gt, p) for p in queries.as_predictions()]
    breakdown = total_loss(gt, pred, match, dn_gt=gt, dn_pred=queries.as_predictions())
    assert breakdown.cls_dn == pytest.approx(sum(c for c, _ in single))
    assert breakdown.edge_dn == pytest.approx(sum(e for _, e in single))
