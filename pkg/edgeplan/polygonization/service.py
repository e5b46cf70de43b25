from typing import List, Optional, Tuple

from loguru import logger

from edgeplan.constants import DUPLICATE_TOL, PARALLEL_TOL
from edgeplan.core.exceptions import EdgeplanError
from edgeplan.core.models import DirectedEdge, Floorplan, Point2, RoomEdgeSequence
from edgeplan.polygonization.exceptions import EmptyResult, TooFewEdges
from edgeplan.polygonization.models import (
    IntersectionKind,
    IntersectionOutcome,
    PolygonVertices,
)
from edgeplan.polygonization.utils import merge_duplicates
from edgeplan.settings import settings


def _cross(ax: float, ay: float, bx: float, by: float) -> float:
    return ax * by - ay * bx


def _line_parameters(
    e1: DirectedEdge, e2: DirectedEdge
) -> Optional[Tuple[float, float]]:
    """Parameters (t1, t2) of the supporting-line intersection.

    ``e1.p1 + t1 * d1 == e2.p1 + t2 * d2``; t in [0, 1] lies on the segment.
    Returns None for parallel (or collinear) lines.
    """
    d1x, d1y = e1.direction()
    d2x, d2y = e2.direction()
    denom = _cross(d1x, d1y, d2x, d2y)
    if abs(denom) < PARALLEL_TOL:
        return None

    wx = e2.p1.x - e1.p1.x
    wy = e2.p1.y - e1.p1.y
    t1 = _cross(wx, wy, d2x, d2y) / denom
    t2 = _cross(wx, wy, d1x, d1y) / denom
    return t1, t2


def _point_on(e: DirectedEdge, t: float) -> Point2:
    dx, dy = e.direction()
    return Point2(x=e.p1.x + t * dx, y=e.p1.y + t * dy)


def line_intersection(e1: DirectedEdge, e2: DirectedEdge) -> Optional[Point2]:
    """Intersection of the infinite supporting lines, None when parallel."""
    params = _line_parameters(e1, e2)
    if params is None:
        return None
    return _point_on(e1, params[0])


def classify_intersection(
    e1: DirectedEdge, e2: DirectedEdge, eps: float
) -> IntersectionOutcome:
    """Resolve the junction between consecutive edges ``e1`` -> ``e2``.

    ``eps`` is the slack in line-parameter units, i.e. a fraction of each
    edge's own length.
    """
    params = _line_parameters(e1, e2)

    if params is None:
        if e1.p2 == e2.p1:
            return IntersectionOutcome(
                kind=IntersectionKind.PARALLEL, vertex_contribution=[e1.p2]
            )
        return IntersectionOutcome(
            kind=IntersectionKind.TYPE_IV, vertex_contribution=[e1.p2, e2.p1]
        )

    # exact shared corner, keep the stored coordinates bit for bit
    if e1.p2 == e2.p1:
        return IntersectionOutcome(
            kind=IntersectionKind.TYPE_I, vertex_contribution=[e1.p2]
        )

    t1, t2 = params
    lo, hi = -eps, 1.0 + eps
    if not (lo <= t1 <= hi and lo <= t2 <= hi):
        return IntersectionOutcome(
            kind=IntersectionKind.TYPE_IV, vertex_contribution=[e1.p2, e2.p1]
        )

    outside = int(not 0.0 <= t1 <= 1.0) + int(not 0.0 <= t2 <= 1.0)
    kind = (
        IntersectionKind.TYPE_I,
        IntersectionKind.TYPE_II,
        IntersectionKind.TYPE_III,
    )[outside]
    return IntersectionOutcome(kind=kind, vertex_contribution=[_point_on(e1, t1)])


def edges_to_polygon(room: RoomEdgeSequence, eps: float = None) -> PolygonVertices:
    """Convert the ordered valid edges of ``room`` into a closed vertex loop.

    Each consecutive pair (last pairs with first) contributes its junction
    vertex, or both bridged endpoints when the lines meet too far away.
    """
    if eps is None:
        eps = settings.polygon_eps

    edges = room.valid_edges
    k = len(edges)
    if k < 2:
        raise TooFewEdges(k)

    points = []
    bridged = 0
    for i in range(k):
        outcome = classify_intersection(edges[i], edges[(i + 1) % k], eps)
        points.extend(outcome.vertex_contribution)
        bridged += outcome.kind == IntersectionKind.TYPE_IV

    if bridged:
        logger.debug(f"Bridged {bridged} of {k} junction(s) at eps={eps}")

    merged = merge_duplicates(points, DUPLICATE_TOL)
    if len(merged) < 3:
        raise EmptyResult(len(merged))

    return PolygonVertices(vertices=merged)


def floorplan_to_indexed_polygons(
    fp: Floorplan, eps: float = None
) -> List[Tuple[int, PolygonVertices]]:
    polys = []
    for m, room in enumerate(fp.rooms):
        if room.valid_count < 2:
            continue
        try:
            polys.append((m, edges_to_polygon(room, eps)))
        except EdgeplanError as e:
            logger.warning(f"Skipping room {m} of scene {fp.scene_id}: {e.detail}")
    return polys


def floorplan_to_polygons(fp: Floorplan, eps: float = None) -> List[PolygonVertices]:
    """Polygonize every room with at least two valid edges, in room order.

    Mock rooms are skipped silently, rooms that fail to close are skipped
    with a warning.
    """
    return [p for _, p in floorplan_to_indexed_polygons(fp, eps)]
