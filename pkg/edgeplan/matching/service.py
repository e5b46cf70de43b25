from typing import NamedTuple, Tuple

import numpy as np
from loguru import logger
from scipy.optimize import linear_sum_assignment

from edgeplan.core.exceptions import CapacityMismatch, LengthMismatch
from edgeplan.core.models import Floorplan, RoomEdgeSequence
from edgeplan.core.service import reverse_room, rotate_room
from edgeplan.matching.models import (
    CostMatrix,
    MatchResult,
    PredictedRoom,
    PredictionSet,
)
from edgeplan.settings import settings


class PairCost(NamedTuple):
    cost: float
    rotation: int
    reversed: bool


def _orbit(gt_valid: np.ndarray, allow_reverse: bool) -> Tuple[np.ndarray, int]:
    """All cyclic rotations of the valid edges, shape (R, k, 4).

    Orbit entry ``r < k`` places valid edge ``(i + r) mod k`` at position i;
    with ``allow_reverse`` entries ``k + r`` do the same for the reversed
    traversal.
    """
    k = gt_valid.shape[0]
    idx = (np.arange(k)[None, :] + np.arange(k)[:, None]) % k
    orbit = gt_valid[idx]
    if allow_reverse:
        backwards = gt_valid[::-1][:, [2, 3, 0, 1]]
        orbit = np.concatenate([orbit, backwards[idx]], axis=0)
    return orbit, k


def _room_costs(
    gt: RoomEdgeSequence,
    pred_conf: np.ndarray,
    pred_coords: np.ndarray,
    lambda_cls: float,
    allow_reverse: bool,
):
    """Costs of one ground-truth room against a stack of predicted rooms.

    ``pred_conf`` is (P, N), ``pred_coords`` (P, N, 4). Returns per-prediction
    cost, rotation and reversal arrays of length P.
    """
    n_pred = pred_conf.shape[0]
    gt_valid = gt.valid_coords()
    if gt_valid.shape[0] == 0:
        return (
            np.zeros(n_pred),
            np.zeros(n_pred, dtype=np.int64),
            np.zeros(n_pred, dtype=bool),
        )

    cls_term = lambda_cls * np.abs(gt.labels()[None, :] - pred_conf).sum(axis=1)

    orbit, k = _orbit(gt_valid, allow_reverse)
    # (P, R) geometric L1 over valid positions only
    geo = np.abs(orbit[None, :, :, :] - pred_coords[:, None, :k, :]).sum(axis=(2, 3))
    best = np.argmin(geo, axis=1)
    geo_best = geo[np.arange(n_pred), best]

    return cls_term + geo_best, best % k, best >= k


def pair_cost(
    gt: RoomEdgeSequence,
    pred: PredictedRoom,
    lambda_cls: float = None,
    allow_reverse: bool = False,
) -> PairCost:
    """Rotation-aware matching cost between a ground-truth and a predicted room.

    Mock ground-truth rooms cost nothing. Ties between rotations resolve to
    the smallest rotation, forward traversal first.
    """
    if lambda_cls is None:
        lambda_cls = settings.lambda_cls
    if gt.capacity != pred.capacity:
        raise LengthMismatch(gt.capacity, pred.capacity)

    costs, rotations, reversed_ = _room_costs(
        gt,
        pred.confidences()[None, :],
        pred.coords()[None, :, :],
        lambda_cls,
        allow_reverse,
    )
    return PairCost(float(costs[0]), int(rotations[0]), bool(reversed_[0]))


def build_cost_matrix(
    gt: Floorplan,
    pred: PredictionSet,
    lambda_cls: float = None,
    allow_reverse: bool = False,
) -> CostMatrix:
    if lambda_cls is None:
        lambda_cls = settings.lambda_cls
    if gt.capacity != pred.capacity:
        raise CapacityMismatch(gt.capacity.as_tuple(), pred.capacity.as_tuple())

    size = len(gt.rooms)
    pred_conf = np.stack([r.confidences() for r in pred.rooms])
    pred_coords = np.stack([r.coords() for r in pred.rooms])

    values = np.zeros((size, size))
    rotations = np.zeros((size, size), dtype=np.int64)
    reversed_ = np.zeros((size, size), dtype=bool)
    for m, room in enumerate(gt.rooms):
        if room.is_mock:
            continue
        values[m], rotations[m], reversed_[m] = _room_costs(
            room, pred_conf, pred_coords, lambda_cls, allow_reverse
        )

    return CostMatrix(values=values, rotations=rotations, reversed=reversed_)


def hungarian(costs: CostMatrix) -> MatchResult:
    """Minimum total cost perfect assignment of ground-truth rows to predictions."""
    _, cols = linear_sum_assignment(costs.values)
    return MatchResult.from_assignment(costs, cols.tolist())


def match_floorplans(
    gt: Floorplan,
    pred: PredictionSet,
    lambda_cls: float = None,
    allow_reverse: bool = False,
) -> MatchResult:
    costs = build_cost_matrix(gt, pred, lambda_cls, allow_reverse)
    result = hungarian(costs)
    logger.debug(
        f"Matched scene {gt.scene_id}: total cost {result.total_cost:.6f}, "
        f"assignment {result.assignment}"
    )
    return result


def align_room(
    room: RoomEdgeSequence, rotation: int, reversed_: bool
) -> RoomEdgeSequence:
    """Apply a matching alignment so valid edge i faces predicted token i."""
    if reversed_:
        room = reverse_room(room)
    return rotate_room(room, rotation)
