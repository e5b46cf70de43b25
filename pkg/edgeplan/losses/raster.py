from typing import Sequence, Union

import numpy as np

from edgeplan.core.exceptions import TooFewVertices
from edgeplan.losses.models import RasterMask
from edgeplan.polygonization.models import PolygonVertices
from edgeplan.settings import settings


def rasterize(
    poly: Union[PolygonVertices, Sequence],
    width: int = None,
    height: int = None,
) -> RasterMask:
    """Even-odd fill sampled at pixel centers.

    Normalized vertices are scaled by (width, height); pixel ``[row, col]``
    is set iff ``(col + 0.5, row + 0.5)`` lies inside, i.e. a horizontal ray
    from the center to the right crosses the boundary an odd number of times.
    """
    if width is None:
        width = settings.raster_resolution
    if height is None:
        height = settings.raster_resolution

    if isinstance(poly, PolygonVertices):
        pts = poly.as_array()
    else:
        pts = np.asarray(poly, dtype=np.float64).reshape(-1, 2)
    if pts.shape[0] < 3:
        raise TooFewVertices(pts.shape[0])

    x1 = pts[:, 0] * width
    y1 = pts[:, 1] * height
    x2 = np.roll(x1, -1)
    y2 = np.roll(y1, -1)

    xc = np.arange(width) + 0.5
    yc = np.arange(height) + 0.5

    # (E, H): edge spans the scanline, half-open in y so shared vertices count once
    spans = (y1[:, None] > yc[None, :]) != (y2[:, None] > yc[None, :])
    dy = np.where(y2 != y1, y2 - y1, 1.0)
    x_at = x1[:, None] + (yc[None, :] - y1[:, None]) * ((x2 - x1) / dy)[:, None]

    # (E, H, W) crossings to the right of each center
    hits = spans[:, :, None] & (xc[None, None, :] < x_at[:, :, None])
    occupancy = (hits.sum(axis=0) % 2).astype(bool)

    return RasterMask(width=width, height=height, occupancy=occupancy)
