from typing import List, Sequence, Tuple

import numpy as np

from edgeplan.core.models import DirectedEdge, Floorplan, ModelCapacity, Point2
from edgeplan.core.service import edges_from_vertex_loop, make_floorplan, make_room
from edgeplan.matching.models import PredictionSet

SMALL = ModelCapacity(M=4, N=12)

UNIT_SQUARE = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
CENTER_SQUARE = [(0.25, 0.25), (0.75, 0.25), (0.75, 0.75), (0.25, 0.75)]
LEFT_RECT = [(0.0625, 0.125), (0.375, 0.125), (0.375, 0.875), (0.0625, 0.875)]
RIGHT_RECT = [(0.5, 0.125), (0.9375, 0.125), (0.9375, 0.5), (0.5, 0.5)]
L_SHAPE = [
    (0.5, 0.5625),
    (0.9375, 0.5625),
    (0.9375, 0.9375),
    (0.625, 0.9375),
    (0.625, 0.75),
    (0.5, 0.75),
]


def square_loop(
    x0: float, y0: float, x1: float, y1: float
) -> List[Tuple[float, float]]:
    return [(x0, y0), (x1, y0), (x1, y1), (x0, y1)]


def edges_of(loop: Sequence[Tuple[float, float]]) -> List[DirectedEdge]:
    return edges_from_vertex_loop([Point2.from_tuple(p) for p in loop])


def floorplan_of(
    loops: Sequence[Sequence[Tuple[float, float]]],
    capacity: ModelCapacity = SMALL,
    scene_id: str = None,
) -> Floorplan:
    rooms = [make_room(edges_of(loop), capacity) for loop in loops]
    return make_floorplan(rooms, capacity, scene_id=scene_id)


def saturated(fp: Floorplan) -> PredictionSet:
    return PredictionSet.from_floorplan(fp)


def star_polygon(
    rng: np.random.Generator, k: int, center=(0.5, 0.5), r_min=0.1, r_max=0.45
) -> List[Tuple[float, float]]:
    """Random simple polygon: k vertices at sorted angles around ``center``."""
    gaps = rng.uniform(0.2, 1.0, size=k)
    angles = np.cumsum(gaps) / gaps.sum() * 2 * np.pi
    radii = rng.uniform(r_min, r_max, size=k)
    xs = center[0] + radii * np.cos(angles)
    ys = center[1] + radii * np.sin(angles)
    return [(float(x), float(y)) for x, y in zip(xs, ys)]


def shrink(edges: Sequence[DirectedEdge], frac: float) -> List[DirectedEdge]:
    """Cut ``frac`` of every edge's length off both ends."""
    out = []
    for e in edges:
        dx, dy = e.direction()
        out.append(
            DirectedEdge.from_coords(
                e.p1.x + frac * dx,
                e.p1.y + frac * dy,
                e.p2.x - frac * dx,
                e.p2.y - frac * dy,
            )
        )
    return out


def max_cyclic_error(
    got: Sequence[Tuple[float, float]], want: Sequence[Tuple[float, float]]
) -> float:
    """Smallest max-vertex distance over all cyclic alignments of ``got``."""
    a = np.asarray(got, dtype=np.float64)
    b = np.asarray(want, dtype=np.float64)
    if a.shape != b.shape:
        return float("inf")
    return min(
        float(np.max(np.hypot(*(np.roll(a, -s, axis=0) - b).T))) for s in range(len(a))
    )
