from typing import Optional, Tuple

import numpy as np
from loguru import logger

from edgeplan.core.models import Point2
from edgeplan.projection.exceptions import DegenerateBounds, EmptyCloud, OutOfExtent
from edgeplan.projection.models import Bounds, DensityMap, PointCloud
from edgeplan.settings import settings


def tight_bounds(cloud: PointCloud, margin: float = None) -> Bounds:
    """Axis-aligned xy bounding box grown by ``margin`` of its extent per side."""
    if margin is None:
        margin = settings.bbox_margin
    if len(cloud) == 0:
        raise EmptyCloud()

    xy = cloud.points[:, :2]
    lo = xy.min(axis=0)
    hi = xy.max(axis=0)
    pad = (hi - lo) * margin
    b = Bounds(
        min_x=float(lo[0] - pad[0]),
        min_y=float(lo[1] - pad[1]),
        max_x=float(hi[0] + pad[0]),
        max_y=float(hi[1] + pad[1]),
    )
    if b.is_degenerate():
        raise DegenerateBounds(b.as_tuple())
    return b


def project(
    cloud: PointCloud,
    width: int = None,
    height: int = None,
    bounds: Optional[Bounds] = None,
    margin: float = None,
    z_range: Optional[Tuple[float, float]] = None,
) -> DensityMap:
    """Project a point cloud vertically into a max-normalized density map.

    Points bin into half-open pixels ``[i, i + 1)`` after linear scaling of
    ``bounds`` onto the grid; points outside the bounds are discarded.
    ``z_range`` optionally keeps only points with ``zmin <= z <= zmax``.
    """
    if width is None:
        width = settings.raster_resolution
    if height is None:
        height = settings.raster_resolution

    if len(cloud) == 0:
        raise EmptyCloud()

    points = cloud.points
    if z_range is not None:
        z = points[:, 2]
        points = points[(z >= z_range[0]) & (z <= z_range[1])]
        if points.shape[0] == 0:
            raise EmptyCloud(f"No point inside height range {z_range}")

    if bounds is None:
        bounds = tight_bounds(PointCloud(points=points), margin)
    elif bounds.is_degenerate():
        raise DegenerateBounds(bounds.as_tuple())

    sx = width / (bounds.max_x - bounds.min_x)
    sy = height / (bounds.max_y - bounds.min_y)
    col = np.floor((points[:, 0] - bounds.min_x) * sx).astype(np.int64)
    row = np.floor((points[:, 1] - bounds.min_y) * sy).astype(np.int64)

    inside = (col >= 0) & (col < width) & (row >= 0) & (row < height)
    dropped = int(points.shape[0] - inside.sum())
    if dropped:
        logger.warning(
            f"Discarded {dropped} point(s) outside bounds {bounds.as_tuple()}"
        )

    # integer counts, independent of point order
    counts = np.bincount(
        row[inside] * width + col[inside], minlength=width * height
    ).reshape(height, width)

    max_count = int(counts.max()) if counts.size else 0
    if max_count == 0:
        logger.warning("No point fell inside the projection bounds")
        values = np.zeros((height, width), dtype=np.float64)
    else:
        values = counts / float(max_count)

    logger.debug(
        f"Projected {int(inside.sum())} point(s) into {width}x{height}, "
        f"max count {max_count}"
    )
    return DensityMap(
        width=width, height=height, values=values, bounds=bounds, max_count=max_count
    )


def pixel_to_normalized(px: Tuple[int, int], dmap: DensityMap) -> Point2:
    """Map pixel ``(col, row)`` to its center in normalized [0,1]^2 units."""
    col, row = px
    if not (0 <= col < dmap.width and 0 <= row < dmap.height):
        raise OutOfExtent(px, (dmap.width, dmap.height))
    return Point2(x=(col + 0.5) / dmap.width, y=(row + 0.5) / dmap.height)


def normalized_to_pixel(p: Point2, dmap: DensityMap) -> Tuple[int, int]:
    """Pixel ``(col, row)`` whose bin contains ``p``."""
    if not p.in_unit_square():
        raise OutOfExtent(p.as_tuple(), (0.0, 1.0))
    col = min(int(np.floor(p.x * dmap.width)), dmap.width - 1)
    row = min(int(np.floor(p.y * dmap.height)), dmap.height - 1)
    return col, row


def scene_to_normalized(x: float, y: float, dmap: DensityMap) -> Point2:
    """Express a scene-unit position in the map's normalized frame."""
    b = dmap.bounds
    return Point2(
        x=(x - b.min_x) / (b.max_x - b.min_x), y=(y - b.min_y) / (b.max_y - b.min_y)
    )
