import base64
from pathlib import Path
from typing import Optional, Sequence, Union

import cv2
import numpy as np

from edgeplan.io.exceptions import IoError
from edgeplan.polygonization.models import PolygonVertices
from edgeplan.projection.models import DensityMap

PALETTE = (
    "#e6194b",
    "#3cb44b",
    "#4363d8",
    "#f58231",
    "#911eb4",
    "#42d4f4",
    "#f032e6",
    "#bfef45",
    "#469990",
    "#9a6324",
)

DEFAULT_SIZE = 512


def _background(dmap: DensityMap) -> str:
    pixels = np.rint(dmap.values * 255.0).astype(np.uint8)
    ok, buf = cv2.imencode(".png", pixels)
    if not ok:
        raise IoError("<background>", "PNG encoding failed")
    return base64.b64encode(buf.tobytes()).decode("ascii")


def _path_data(poly: PolygonVertices, width: int, height: int) -> str:
    pts = [f"{p.x * width:.3f} {p.y * height:.3f}" for p in poly.vertices]
    return "M " + " L ".join(pts) + " Z"


def render_svg(
    polys: Sequence[PolygonVertices],
    background: Optional[DensityMap] = None,
    path: Union[str, Path, None] = None,
) -> str:
    """Static SVG of room outlines, optionally over a density map.

    The canvas takes the density map's pixel size; normalized coordinates
    scale onto it. Output depends on the inputs only, so reruns are
    byte-identical.
    """
    if background is not None:
        width, height = background.width, background.height
    else:
        width = height = DEFAULT_SIZE

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'xmlns:xlink="http://www.w3.org/1999/xlink" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
    ]
    if background is not None:
        lines.append(
            f'<image x="0" y="0" width="{width}" height="{height}" '
            f'xlink:href="data:image/png;base64,{_background(background)}"/>'
        )
    for i, poly in enumerate(polys):
        color = PALETTE[i % len(PALETTE)]
        lines.append(
            f'<path d="{_path_data(poly, width, height)}" fill="none" '
            f'stroke="{color}" stroke-width="2"/>'
        )
    lines.append("</svg>")
    svg = "\n".join(lines) + "\n"

    if path is not None:
        try:
            Path(path).write_text(svg, encoding="utf-8")
        except OSError as e:
            raise IoError(path, str(e))
    return svg
