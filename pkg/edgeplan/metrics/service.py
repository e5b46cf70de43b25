import asyncio
from typing import Iterable, List, Sequence, Tuple, Union

import anyio
import numpy as np
from loguru import logger
from scipy.optimize import linear_sum_assignment

from edgeplan.constants import SWEEP_EPS
from edgeplan.core.models import Floorplan
from edgeplan.losses.raster import rasterize
from edgeplan.matching.models import PredictionSet
from edgeplan.metrics.models import (
    DatasetReport,
    LevelCounts,
    Matcher,
    MetricsReport,
    MetricThresholds,
)
from edgeplan.polygonization.models import PolygonVertices
from edgeplan.polygonization.service import floorplan_to_polygons
from edgeplan.polygonization.utils import interior_angles_deg
from edgeplan.settings import settings

Prediction = Union[PredictionSet, Floorplan, Sequence[PolygonVertices]]


def polygon_iou(
    a: PolygonVertices, b: PolygonVertices, resolution: int = None
) -> float:
    if resolution is None:
        resolution = settings.raster_resolution
    ma = rasterize(a, resolution, resolution).occupancy
    mb = rasterize(b, resolution, resolution).occupancy
    return _mask_iou(ma, mb)


def _mask_iou(ma: np.ndarray, mb: np.ndarray) -> float:
    union = int(np.logical_or(ma, mb).sum())
    if union == 0:
        return 0.0
    return int(np.logical_and(ma, mb).sum()) / union


def _iou_matrix(gt_polys, pred_polys, resolution: int) -> np.ndarray:
    gt_masks = [rasterize(p, resolution, resolution).occupancy for p in gt_polys]
    pred_masks = [rasterize(p, resolution, resolution).occupancy for p in pred_polys]
    iou = np.zeros((len(gt_masks), len(pred_masks)))
    for i, a in enumerate(gt_masks):
        for j, b in enumerate(pred_masks):
            iou[i, j] = _mask_iou(a, b)
    return iou


def _greedy_pairs(cost: np.ndarray, accept: np.ndarray) -> List[Tuple[int, int]]:
    """One-to-one pairs by ascending cost; ties go to the lowest (row, col)."""
    if cost.size == 0:
        return []
    order = np.argsort(cost, axis=None, kind="stable")
    used_rows = set()
    used_cols = set()
    pairs = []
    for flat in order:
        i, j = np.unravel_index(flat, cost.shape)
        if not accept[i, j] or i in used_rows or j in used_cols:
            continue
        used_rows.add(i)
        used_cols.add(j)
        pairs.append((int(i), int(j)))
    return pairs


def _optimal_pairs(cost: np.ndarray, accept: np.ndarray) -> List[Tuple[int, int]]:
    """Minimum-cost assignment restricted to acceptable pairs."""
    if cost.size == 0:
        return []
    rows, cols = cost.shape
    size = max(rows, cols)
    # rejected and dummy cells cost more than any acceptable pairing
    blocked = float(cost[accept].sum()) + 1.0 if accept.any() else 1.0
    square = np.full((size, size), blocked)
    square[:rows, :cols] = np.where(accept, cost, blocked)

    _, assignment = linear_sum_assignment(square)
    return [
        (i, int(j))
        for i, j in enumerate(assignment[:rows])
        if j < cols and accept[i, j]
    ]


def _pairs(cost, accept, matcher: Matcher):
    if Matcher(matcher) == Matcher.HUNGARIAN:
        return _optimal_pairs(cost, accept)
    return _greedy_pairs(cost, accept)


def room_metrics(
    gt_polys: Sequence[PolygonVertices],
    pred_polys: Sequence[PolygonVertices],
    thresholds: MetricThresholds = None,
    resolution: int = None,
    matcher: Matcher = Matcher.GREEDY,
) -> LevelCounts:
    """Rooms match one-to-one by descending IoU when IoU >= room_iou_min."""
    if thresholds is None:
        thresholds = MetricThresholds.from_settings()
    if resolution is None:
        resolution = settings.raster_resolution

    iou = _iou_matrix(gt_polys, pred_polys, resolution)
    pairs = _pairs(1.0 - iou, iou >= thresholds.room_iou_min, matcher)
    return LevelCounts(
        matched=len(pairs), predicted=len(pred_polys), actual=len(gt_polys)
    )


def _corners(polys: Sequence[PolygonVertices], resolution: int):
    """Pixel-space corners and their interior angles, all rooms stacked."""
    if not polys:
        return np.zeros((0, 2)), np.zeros(0)
    pts = [p.as_array() for p in polys]
    angles = [interior_angles_deg(a) for a in pts]
    return np.concatenate(pts) * resolution, np.concatenate(angles)


def _corner_pairs(gt_polys, pred_polys, thresholds, resolution, matcher):
    gt_xy, gt_ang = _corners(gt_polys, resolution)
    pred_xy, pred_ang = _corners(pred_polys, resolution)

    dist = np.hypot(
        gt_xy[:, None, 0] - pred_xy[None, :, 0], gt_xy[:, None, 1] - pred_xy[None, :, 1]
    )
    pairs = _pairs(dist, dist <= thresholds.corner_dist_max, matcher)
    return pairs, gt_ang, pred_ang


def corner_metrics(
    gt_polys: Sequence[PolygonVertices],
    pred_polys: Sequence[PolygonVertices],
    thresholds: MetricThresholds = None,
    resolution: int = None,
    matcher: Matcher = Matcher.GREEDY,
) -> LevelCounts:
    """Corners match one-to-one by ascending pixel distance, inclusive bound."""
    if thresholds is None:
        thresholds = MetricThresholds.from_settings()
    if resolution is None:
        resolution = settings.raster_resolution

    pairs, gt_ang, pred_ang = _corner_pairs(
        gt_polys, pred_polys, thresholds, resolution, matcher
    )
    return LevelCounts(matched=len(pairs), predicted=len(pred_ang), actual=len(gt_ang))


def _count_angles(pairs, gt_ang, pred_ang, tol: float) -> int:
    return sum(1 for i, j in pairs if abs(gt_ang[i] - pred_ang[j]) <= tol)


def angle_metrics(
    gt_polys: Sequence[PolygonVertices],
    pred_polys: Sequence[PolygonVertices],
    thresholds: MetricThresholds = None,
    resolution: int = None,
    matcher: Matcher = Matcher.GREEDY,
) -> LevelCounts:
    """A matched corner counts when its interior angles agree within tolerance."""
    if thresholds is None:
        thresholds = MetricThresholds.from_settings()
    if resolution is None:
        resolution = settings.raster_resolution

    pairs, gt_ang, pred_ang = _corner_pairs(
        gt_polys, pred_polys, thresholds, resolution, matcher
    )
    correct = _count_angles(pairs, gt_ang, pred_ang, thresholds.angle_tol_deg)
    return LevelCounts(matched=correct, predicted=len(pred_ang), actual=len(gt_ang))


def _as_polygons(
    pred: Prediction, eps: float, threshold: float
) -> List[PolygonVertices]:
    if isinstance(pred, PredictionSet):
        pred = pred.to_floorplan(threshold)
    if isinstance(pred, Floorplan):
        return floorplan_to_polygons(pred, eps)
    return list(pred)


def evaluate_scene(
    gt: Floorplan,
    pred: Prediction,
    eps: float = None,
    thresholds: MetricThresholds = None,
    resolution: int = None,
    matcher: Matcher = Matcher.GREEDY,
    threshold: float = None,
) -> MetricsReport:
    """Room, corner and angle tallies plus room IoU for one scene.

    Predicted edge sets are polygonized first, keeping tokens whose
    confidence reaches ``threshold``.
    """
    if eps is None:
        eps = settings.polygon_eps
    if thresholds is None:
        thresholds = MetricThresholds.from_settings()
    if resolution is None:
        resolution = settings.raster_resolution
    if threshold is None:
        threshold = settings.confidence_threshold

    gt_polys = floorplan_to_polygons(gt, eps)
    pred_polys = _as_polygons(pred, eps, threshold)

    iou = _iou_matrix(gt_polys, pred_polys, resolution)
    room_pairs = _pairs(1.0 - iou, iou >= thresholds.room_iou_min, matcher)
    best_iou = iou.max(axis=1) if iou.shape[1] else np.zeros(len(gt_polys))

    corner_pairs, gt_ang, pred_ang = _corner_pairs(
        gt_polys, pred_polys, thresholds, resolution, matcher
    )
    correct_angles = _count_angles(
        corner_pairs, gt_ang, pred_ang, thresholds.angle_tol_deg
    )

    report = MetricsReport(
        scene_id=gt.scene_id,
        room=LevelCounts(
            matched=len(room_pairs), predicted=len(pred_polys), actual=len(gt_polys)
        ),
        corner=LevelCounts(
            matched=len(corner_pairs), predicted=len(pred_ang), actual=len(gt_ang)
        ),
        angle=LevelCounts(
            matched=correct_angles, predicted=len(pred_ang), actual=len(gt_ang)
        ),
        iou_sum=float(best_iou.sum()),
        iou_count=len(gt_polys),
    )
    logger.debug(
        f"Scene {gt.scene_id}: room f1 {report.room.f1:.4f}, "
        f"corner f1 {report.corner.f1:.4f}, angle f1 {report.angle.f1:.4f}"
    )
    return report


def aggregate(reports: Iterable[MetricsReport]) -> DatasetReport:
    """Micro-average summed tallies; macro-average per-scene scores."""
    reports = list(reports)
    micro = MetricsReport(scene_id=None)
    for r in reports:
        micro = MetricsReport(
            scene_id=None,
            room=micro.room + r.room,
            corner=micro.corner + r.corner,
            angle=micro.angle + r.angle,
            iou_sum=micro.iou_sum + r.iou_sum,
            iou_count=micro.iou_count + r.iou_count,
        )

    macro = {}
    for level in ("room", "corner", "angle"):
        scores = [getattr(r, level).scores() for r in reports]
        macro[level] = {
            key: float(np.mean([s[key] for s in scores])) if scores else 0.0
            for key in ("precision", "recall", "f1")
        }
    macro["room_iou"] = {
        "mean": float(np.mean([r.room_iou for r in reports])) if reports else 0.0
    }

    return DatasetReport(micro=micro, macro=macro, scenes=reports)


async def evaluate_dataset(
    pairs: Sequence[Tuple[Floorplan, Prediction]],
    workers: int = None,
    **kwargs,
) -> DatasetReport:
    """Evaluate scenes in worker threads; scenes come back sorted by id.

    ``kwargs`` are forwarded to ``evaluate_scene``.
    """
    if workers is None:
        workers = settings.eval_workers
    limiter = anyio.CapacityLimiter(max(1, workers))

    async def _run(gt: Floorplan, pred: Prediction) -> MetricsReport:
        return await anyio.to_thread.run_sync(
            lambda: evaluate_scene(gt, pred, **kwargs), limiter=limiter
        )

    reports = await asyncio.gather(*[_run(gt, pred) for gt, pred in pairs])
    reports = sorted(reports, key=lambda r: r.scene_id or "")
    logger.info(f"Evaluated {len(reports)} scene(s) with {workers} worker(s)")
    return aggregate(reports)


def sweep_eps(
    gt: Floorplan,
    pred: Prediction,
    eps_values: Sequence[float] = SWEEP_EPS,
    **kwargs,
) -> List[Tuple[float, MetricsReport]]:
    """Scene metrics at every polygonization threshold in ``eps_values``."""
    return [(eps, evaluate_scene(gt, pred, eps=eps, **kwargs)) for eps in eps_values]
