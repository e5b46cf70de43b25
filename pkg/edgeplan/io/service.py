import json
import warnings
from pathlib import Path
from typing import List, Type, TypeVar, Union

import cv2
import numpy as np
from loguru import logger
from pydantic import BaseModel, ValidationError

from edgeplan.core.models import Floorplan
from edgeplan.denoising.models import PerturbedQuerySet
from edgeplan.io.documents import (
    DensityMapHeader,
    FloorplanDocument,
    PerturbedDocument,
    PolygonDocument,
    PredictionDocument,
)
from edgeplan.io.exceptions import BadMagic, IoError, ParseError, SchemaViolation
from edgeplan.matching.models import PredictionSet
from edgeplan.polygonization.models import PolygonVertices
from edgeplan.projection.models import Bounds, DensityMap, PointCloud

PathLike = Union[str, Path]
Doc = TypeVar("Doc", bound=BaseModel)

PGM_MAGIC = b"P5"


def _read_text(path: PathLike) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise IoError(path, str(e))


def _write_text(path: PathLike, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise IoError(path, str(e))


def _parse_json(path: PathLike):
    text = _read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, path=path, line=e.lineno, column=e.colno)


def _load_document(path: PathLike, doc_type: Type[Doc]) -> Doc:
    raw = _parse_json(path)
    try:
        return doc_type.parse_obj(raw)
    except ValidationError as e:
        raise SchemaViolation.from_validation_error(e, path)


def _save_document(doc: BaseModel, path: PathLike) -> None:
    _write_text(path, doc.json(indent=2) + "\n")


def _build(factory, value, path):
    """Build a document from a domain object, mapping schema errors."""
    try:
        return factory(value)
    except ValidationError as e:
        raise SchemaViolation.from_validation_error(e, path)


def load_floorplan(path: PathLike) -> Floorplan:
    return _load_document(path, FloorplanDocument).to_floorplan()


def save_floorplan(fp: Floorplan, path: PathLike) -> None:
    _save_document(_build(FloorplanDocument.from_floorplan, fp, path), path)


def load_predictions(path: PathLike) -> PredictionSet:
    return _load_document(path, PredictionDocument).to_prediction_set()


def save_predictions(pred: PredictionSet, path: PathLike) -> None:
    _save_document(_build(PredictionDocument.from_prediction_set, pred, path), path)


def load_polygons(path: PathLike) -> List[PolygonVertices]:
    return _load_document(path, PolygonDocument).to_polygons()


def save_polygons(
    polys: List[PolygonVertices], path: PathLike, scene_id: str = None
) -> None:
    _save_document(PolygonDocument.from_polygons(polys, scene_id), path)


def load_perturbed(path: PathLike) -> PerturbedQuerySet:
    return _load_document(path, PerturbedDocument).to_queries()


def save_perturbed(queries: PerturbedQuerySet, path: PathLike) -> None:
    _save_document(_build(PerturbedDocument.from_queries, queries, path), path)


def load_any_prediction(
    path: PathLike, group: int = 0
) -> Union[PredictionSet, List[PolygonVertices]]:
    """Read a prediction, polygon or perturbed query file.

    Floorplan files parse as predictions with confidence = validity; a
    perturbed query file yields the requested group.
    """
    raw = _parse_json(path)
    if isinstance(raw, dict) and "polygons" in raw:
        doc_type = PolygonDocument
    elif isinstance(raw, dict) and "groups" in raw:
        doc_type = PerturbedDocument
    else:
        doc_type = PredictionDocument

    try:
        doc = doc_type.parse_obj(raw)
    except ValidationError as e:
        raise SchemaViolation.from_validation_error(e, path)

    if isinstance(doc, PolygonDocument):
        return doc.to_polygons()
    if isinstance(doc, PerturbedDocument):
        return doc.to_queries().as_prediction(group)
    return doc.to_prediction_set()


def read_xyz(path: PathLike) -> PointCloud:
    """ASCII point cloud, one ``x y z`` triple per line, ``#`` comments."""
    if not Path(path).is_file():
        raise IoError(path, "no such file")
    try:
        with warnings.catch_warnings():
            # empty files are reported as an empty cloud, not a warning
            warnings.simplefilter("ignore", UserWarning)
            arr = np.loadtxt(path, comments="#", dtype=np.float64, ndmin=2)
    except ValueError as e:
        raise ParseError(str(e), path=path)

    if arr.size == 0:
        return PointCloud(points=np.zeros((0, 3)))
    if arr.shape[1] != 3:
        raise ParseError(f"expected 3 columns, found {arr.shape[1]}", path=path)
    return PointCloud(points=arr)


def sidecar_path(path: PathLike) -> Path:
    path = Path(path)
    return path.with_name(path.name + ".json")


def write_density_pgm(dmap: DensityMap, path: PathLike) -> None:
    """Binary PGM with maxval 255 plus a JSON sidecar holding bounds and max_count."""
    pixels = np.rint(dmap.values * 255.0).astype(np.uint8)
    ok, buf = cv2.imencode(".pgm", pixels, [cv2.IMWRITE_PXM_BINARY, 1])
    if not ok:
        raise IoError(path, "PGM encoding failed")
    try:
        Path(path).write_bytes(buf.tobytes())
    except OSError as e:
        raise IoError(path, str(e))
    _save_document(DensityMapHeader.from_density_map(dmap), sidecar_path(path))


def read_density_pgm(path: PathLike) -> DensityMap:
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise IoError(path, str(e))
    if data[:2] != PGM_MAGIC:
        raise BadMagic(path, data[:2])

    pixels = cv2.imdecode(np.frombuffer(data, dtype=np.uint8), cv2.IMREAD_UNCHANGED)
    if pixels is None:
        raise IoError(path, "unreadable PGM payload")
    if pixels.dtype != np.uint8:
        raise ParseError(f"expected an 8-bit PGM, found {pixels.dtype}", path=path)
    height, width = pixels.shape[:2]

    side = sidecar_path(path)
    if side.is_file():
        header = _load_document(side, DensityMapHeader)
        bounds, max_count = header.model_bounds, header.max_count
    else:
        logger.warning(f"No sidecar for {path}, assuming unit bounds")
        bounds, max_count = Bounds(min_x=0.0, min_y=0.0, max_x=1.0, max_y=1.0), 0

    try:
        return DensityMap(
            width=width,
            height=height,
            values=pixels.astype(np.float64) / 255.0,
            bounds=bounds,
            max_count=max_count,
        )
    except ValidationError as e:
        raise SchemaViolation.from_validation_error(e, path=path)
