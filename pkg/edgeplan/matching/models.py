from typing import List, Optional

import numpy as np
from loguru import logger
from pydantic import BaseModel, confloat, validator

from edgeplan.core.models import (
    DirectedEdge,
    EdgeToken,
    Floorplan,
    FrozenModel,
    ModelCapacity,
    RoomEdgeSequence,
)


class PredictedToken(FrozenModel):
    confidence: confloat(ge=0.0, le=1.0)
    edge: DirectedEdge


class PredictedRoom(FrozenModel):
    tokens: List[PredictedToken]

    @classmethod
    def from_sequence(cls, room: RoomEdgeSequence) -> "PredictedRoom":
        return cls(
            tokens=[
                PredictedToken(confidence=float(t.validity), edge=t.edge)
                for t in room.tokens
            ]
        )

    @property
    def capacity(self) -> int:
        return len(self.tokens)

    def confidences(self) -> np.ndarray:
        return np.array([t.confidence for t in self.tokens], dtype=np.float64)

    def coords(self) -> np.ndarray:
        return np.array([t.edge.as_list() for t in self.tokens], dtype=np.float64)

    def to_sequence(self, threshold: float) -> RoomEdgeSequence:
        """Keep tokens with confidence >= threshold, in order, as valid edges."""
        kept = []
        for n, t in enumerate(self.tokens):
            if t.confidence < threshold:
                continue
            if t.edge.is_degenerate():
                logger.debug(f"Dropping degenerate predicted edge {n}")
                continue
            kept.append(EdgeToken(edge=t.edge, validity=1))
        kept.extend([EdgeToken.padding()] * (len(self.tokens) - len(kept)))
        return RoomEdgeSequence(tokens=kept)


class PredictionSet(FrozenModel):
    rooms: List[PredictedRoom]
    scene_id: Optional[str] = None

    @validator("rooms")
    def rooms_share_capacity(cls, rooms):
        if len(rooms) == 0:
            raise ValueError("a prediction set holds at least one room slot")
        sizes = {r.capacity for r in rooms}
        if len(sizes) != 1:
            raise ValueError(f"rooms have differing token counts {sorted(sizes)}")
        return rooms

    @classmethod
    def from_floorplan(cls, fp: Floorplan) -> "PredictionSet":
        """Treat ground truth as a saturated prediction (confidence = validity)."""
        return cls(
            rooms=[PredictedRoom.from_sequence(r) for r in fp.rooms],
            scene_id=fp.scene_id,
        )

    @property
    def capacity(self) -> ModelCapacity:
        return ModelCapacity(M=len(self.rooms), N=self.rooms[0].capacity)

    def to_floorplan(self, threshold: float) -> Floorplan:
        return Floorplan(
            rooms=[r.to_sequence(threshold) for r in self.rooms],
            scene_id=self.scene_id,
        )


class CostMatrix(BaseModel):
    """Square cost grid; row = ground-truth room, column = predicted room.

    ``rotations[m, j]`` / ``reversed[m, j]`` record the ground-truth alignment
    that achieved ``values[m, j]``.
    """

    values: np.ndarray
    rotations: np.ndarray
    reversed: np.ndarray

    class Config:
        frozen = True
        arbitrary_types_allowed = True

    @validator("values")
    def square_finite(cls, v):
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError(f"cost matrix must be square, got {v.shape}")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ValueError("costs must be finite and non-negative")
        return v

    @classmethod
    def from_values(cls, values) -> "CostMatrix":
        arr = np.asarray(values, dtype=np.float64)
        return cls(
            values=arr,
            rotations=np.zeros(arr.shape, dtype=np.int64),
            reversed=np.zeros(arr.shape, dtype=bool),
        )

    @property
    def size(self) -> int:
        return int(self.values.shape[0])


class MatchResult(FrozenModel):
    """``assignment[m]`` is the prediction index matched to ground-truth room m."""

    assignment: List[int]
    per_pair_cost: List[float]
    best_rotation: List[int]
    reversed: List[bool]

    @validator("assignment")
    def is_permutation(cls, v):
        if sorted(v) != list(range(len(v))):
            raise ValueError("assignment must be a permutation")
        return v

    @classmethod
    def from_assignment(cls, costs: CostMatrix, assignment: List[int]) -> "MatchResult":
        rows = range(len(assignment))
        return cls(
            assignment=[int(j) for j in assignment],
            per_pair_cost=[float(costs.values[m, j]) for m, j in zip(rows, assignment)],
            best_rotation=[
                int(costs.rotations[m, j]) for m, j in zip(rows, assignment)
            ],
            reversed=[bool(costs.reversed[m, j]) for m, j in zip(rows, assignment)],
        )

    @property
    def total_cost(self) -> float:
        return float(sum(self.per_pair_cost))
