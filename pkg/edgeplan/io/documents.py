"""On-disk JSON schemas.

Edge records are ``[x1, y1, x2, y2, flag]`` with normalized coordinates;
the flag is the 0/1 validity in floorplans and the confidence in
predictions. Trailing padding tokens and trailing mock rooms are omitted
when writing and restored from ``capacity`` when reading.
"""

from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, confloat, conint, root_validator, validator

from edgeplan.constants import SCHEMA_VERSION
from edgeplan.core.models import (
    DirectedEdge,
    EdgeToken,
    Floorplan,
    ModelCapacity,
    RoomEdgeSequence,
)
from edgeplan.core.service import make_floorplan
from edgeplan.denoising.models import NoiseConfig, PerturbedQuerySet
from edgeplan.io.exceptions import CapacityExceeded
from edgeplan.matching.models import PredictedRoom, PredictedToken, PredictionSet
from edgeplan.polygonization.models import PolygonVertices
from edgeplan.projection.models import Bounds, DensityMap

Coord = confloat(ge=0.0, le=1.0)
Validity = conint(strict=True, ge=0, le=1)
Confidence = confloat(ge=0.0, le=1.0)

EdgeRecord = Tuple[Coord, Coord, Coord, Coord, Validity]
PredictedRecord = Tuple[Coord, Coord, Coord, Coord, Confidence]

_PADDING_RECORD = [0.0, 0.0, 0.0, 0.0, 0]


def _trim(records: List[list]) -> List[list]:
    end = len(records)
    while end and list(records[end - 1]) == _PADDING_RECORD:
        end -= 1
    return records[:end]


def _edge(record) -> DirectedEdge:
    return DirectedEdge.from_coords(*(float(c) for c in record[:4]))


class _Document(BaseModel):
    schema_version: int = SCHEMA_VERSION

    @validator("schema_version")
    def supported_version(cls, v):
        if v != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema version {v}")
        return v


class _EdgeDocument(_Document):
    capacity: Tuple[conint(ge=1), conint(ge=3)]
    scene_id: Optional[str] = None
    metadata: Dict[str, str] = {}

    @root_validator(skip_on_failure=True)
    def within_capacity(cls, values):
        m, n = values["capacity"]
        rooms = values["rooms"]
        if len(rooms) > m:
            raise CapacityExceeded("rooms", len(rooms), m, {"field": "rooms"})
        for i, room in enumerate(rooms):
            if len(room) > n:
                raise CapacityExceeded("edges", len(room), n, {"field": f"rooms.{i}"})
        return values

    @property
    def model_capacity(self) -> ModelCapacity:
        return ModelCapacity(M=self.capacity[0], N=self.capacity[1])


class FloorplanDocument(_EdgeDocument):
    rooms: List[List[EdgeRecord]]

    @classmethod
    def from_floorplan(cls, fp: Floorplan) -> "FloorplanDocument":
        rooms = [
            _trim([t.edge.as_list() + [t.validity] for t in room.tokens])
            for room in fp.rooms
        ]
        while rooms and not rooms[-1]:
            rooms.pop()
        return cls(
            capacity=fp.capacity.as_tuple(),
            scene_id=fp.scene_id,
            metadata=fp.metadata,
            rooms=rooms,
        )

    def to_floorplan(self) -> Floorplan:
        capacity = self.model_capacity
        rooms = []
        for records in self.rooms:
            tokens = [EdgeToken(edge=_edge(r), validity=r[4]) for r in records]
            tokens.extend([EdgeToken.padding()] * (capacity.N - len(tokens)))
            rooms.append(RoomEdgeSequence(tokens=tokens))
        return make_floorplan(
            rooms, capacity, scene_id=self.scene_id, metadata=self.metadata
        )


class PredictionDocument(_EdgeDocument):
    rooms: List[List[PredictedRecord]]

    @classmethod
    def from_prediction_set(cls, pred: PredictionSet) -> "PredictionDocument":
        rooms = [
            _trim([t.edge.as_list() + [t.confidence] for t in room.tokens])
            for room in pred.rooms
        ]
        while rooms and not rooms[-1]:
            rooms.pop()
        return cls(
            capacity=pred.capacity.as_tuple(), scene_id=pred.scene_id, rooms=rooms
        )

    def to_prediction_set(self) -> PredictionSet:
        m, n = self.capacity
        padding = PredictedToken(confidence=0.0, edge=EdgeToken.padding().edge)
        rooms = []
        for records in self.rooms:
            tokens = [PredictedToken(confidence=r[4], edge=_edge(r)) for r in records]
            tokens.extend([padding] * (n - len(tokens)))
            rooms.append(PredictedRoom(tokens=tokens))
        rooms.extend([PredictedRoom(tokens=[padding] * n)] * (m - len(rooms)))
        return PredictionSet(rooms=rooms, scene_id=self.scene_id)


class PolygonDocument(_Document):
    scene_id: Optional[str] = None
    polygons: List[List[Tuple[float, float]]]

    @classmethod
    def from_polygons(
        cls, polys: List[PolygonVertices], scene_id: Optional[str] = None
    ) -> "PolygonDocument":
        return cls(scene_id=scene_id, polygons=[p.as_tuples() for p in polys])

    def to_polygons(self) -> List[PolygonVertices]:
        return [PolygonVertices.from_tuples(p) for p in self.polygons]


class PerturbedDocument(_Document):
    """Every denoising group as a full floorplan plus the noise bookkeeping."""

    config: NoiseConfig
    groups: List[FloorplanDocument]
    displacements: List[List[List[Tuple[float, float, float, float]]]]
    flipped: List[List[List[bool]]]

    @classmethod
    def from_queries(cls, queries: PerturbedQuerySet) -> "PerturbedDocument":
        return cls(
            config=queries.config,
            groups=[FloorplanDocument.from_floorplan(g) for g in queries.groups],
            displacements=queries.displacements.tolist(),
            flipped=queries.flipped.tolist(),
        )

    def to_queries(self) -> PerturbedQuerySet:
        return PerturbedQuerySet(
            groups=[g.to_floorplan() for g in self.groups],
            displacements=np.asarray(self.displacements, dtype=np.float64),
            flipped=np.asarray(self.flipped, dtype=bool),
            config=self.config,
        )


class DensityMapHeader(_Document):
    """Sidecar metadata of a PGM density map."""

    width: int
    height: int
    bounds: Tuple[float, float, float, float]
    max_count: int = 0

    @classmethod
    def from_density_map(cls, dmap: DensityMap) -> "DensityMapHeader":
        return cls(
            width=dmap.width,
            height=dmap.height,
            bounds=dmap.bounds.as_tuple(),
            max_count=dmap.max_count,
        )

    @property
    def model_bounds(self) -> Bounds:
        return Bounds.from_tuple(self.bounds)
