from typing import Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from edgeplan.constants import BCE_CLAMP
from edgeplan.core.exceptions import CapacityMismatch, EdgeplanError, LengthMismatch
from edgeplan.core.models import Floorplan, RoomEdgeSequence
from edgeplan.losses.exceptions import DimensionMismatch
from edgeplan.losses.models import LossBreakdown, LossWeights, RasterMask
from edgeplan.losses.raster import rasterize
from edgeplan.matching.models import MatchResult, PredictedRoom, PredictionSet
from edgeplan.matching.service import align_room
from edgeplan.polygonization.service import edges_to_polygon
from edgeplan.settings import settings


def bce_cls_loss(gt_labels, pred_conf) -> float:
    """Mean binary cross-entropy over the N token positions."""
    c = np.asarray(gt_labels, dtype=np.float64)
    p = np.asarray(pred_conf, dtype=np.float64)
    if c.shape != p.shape:
        raise LengthMismatch(c.size, p.size)
    if c.size == 0:
        return 0.0

    p = np.clip(p, BCE_CLAMP, 1.0 - BCE_CLAMP)
    return float(-np.mean(c * np.log(p) + (1.0 - c) * np.log(1.0 - p)))


def edge_l1_loss(gt_room: RoomEdgeSequence, pred_room: PredictedRoom) -> float:
    """Endpoint L1 distance averaged over the ground-truth valid edges.

    ``gt_room`` must already be aligned to the prediction (see ``align_room``).
    Mock rooms contribute 0.
    """
    if gt_room.capacity != pred_room.capacity:
        raise LengthMismatch(gt_room.capacity, pred_room.capacity)

    valid = gt_room.labels() == 1.0
    n_valid = int(valid.sum())
    if n_valid == 0:
        return 0.0

    diff = np.abs(gt_room.coords()[valid] - pred_room.coords()[valid])
    return float(diff.sum() / n_valid)


def dice_loss(a: RasterMask, b: RasterMask) -> float:
    if a.shape != b.shape:
        raise DimensionMismatch(a.shape, b.shape)

    size = a.area() + b.area()
    if size == 0:
        return 0.0
    overlap = int(np.logical_and(a.occupancy, b.occupancy).sum())
    return 1.0 - 2.0 * overlap / size


def room_mask(room: RoomEdgeSequence, eps: float, resolution: int) -> RasterMask:
    """Rasterized polygon of a room, empty when the room does not close."""
    try:
        poly = edges_to_polygon(room, eps)
    except EdgeplanError as e:
        logger.debug(f"Room rasterizes empty: {e.detail}")
        return RasterMask.empty(resolution, resolution)
    return rasterize(poly, resolution, resolution)


def denoising_terms(dn_gt: Floorplan, dn_pred: PredictionSet) -> Tuple[float, float]:
    """Classification and edge terms of index-aligned perturbed queries.

    Classification is averaged over the room slots, the edge term summed.
    """
    if dn_gt.capacity != dn_pred.capacity:
        raise CapacityMismatch(dn_gt.capacity.as_tuple(), dn_pred.capacity.as_tuple())

    cls_dn = 0.0
    edge_dn = 0.0
    for gt_room, pred_room in zip(dn_gt.rooms, dn_pred.rooms):
        cls_dn += bce_cls_loss(gt_room.labels(), pred_room.confidences())
        edge_dn += edge_l1_loss(gt_room, pred_room)
    return cls_dn / len(dn_gt.rooms), edge_dn


def total_loss(
    gt: Floorplan,
    pred: PredictionSet,
    match: MatchResult,
    dn_gt: Optional[Floorplan] = None,
    dn_pred: Union[PredictionSet, Sequence[PredictionSet], None] = None,
    weights: Optional[LossWeights] = None,
    eps: float = None,
    threshold: float = None,
    resolution: int = None,
) -> LossBreakdown:
    """Weighted sum of all supervision terms over the M room slots.

    Classification is averaged over all M slots, mock rooms included; edge
    and raster terms are summed over the real rooms.

    Matched terms follow ``match``; the edge term compares each prediction
    with its ground-truth room in the rotation the matcher chose, and the
    raster term compares the two rooms' polygons. ``dn_pred`` may hold one
    prediction set per denoising group, each aligned with ``dn_gt``.
    """
    if weights is None:
        weights = LossWeights.from_settings()
    if eps is None:
        eps = settings.polygon_eps
    if threshold is None:
        threshold = settings.confidence_threshold
    if resolution is None:
        resolution = settings.raster_resolution
    if gt.capacity != pred.capacity:
        raise CapacityMismatch(gt.capacity.as_tuple(), pred.capacity.as_tuple())

    cls_term = 0.0
    edge = 0.0
    ras = 0.0
    for m, gt_room in enumerate(gt.rooms):
        pred_room = pred.rooms[match.assignment[m]]
        cls_term += bce_cls_loss(gt_room.labels(), pred_room.confidences())
        if gt_room.is_mock:
            continue

        aligned = align_room(gt_room, match.best_rotation[m], match.reversed[m])
        edge += edge_l1_loss(aligned, pred_room)

        gt_mask = room_mask(gt_room, eps, resolution)
        pred_mask = room_mask(pred_room.to_sequence(threshold), eps, resolution)
        ras += dice_loss(gt_mask, pred_mask)
    cls_term /= len(gt.rooms)

    cls_dn = 0.0
    edge_dn = 0.0
    if dn_gt is not None and dn_pred is not None:
        groups = [dn_pred] if isinstance(dn_pred, PredictionSet) else list(dn_pred)
        for group in groups:
            c, e = denoising_terms(dn_gt, group)
            cls_dn += c
            edge_dn += e

    breakdown = LossBreakdown.from_terms(weights, cls_term, edge, ras, cls_dn, edge_dn)
    logger.debug(f"Loss for scene {gt.scene_id}: {breakdown}")
    return breakdown
