from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, validator
from pydantic.types import conint

from edgeplan.settings import settings


class FrozenModel(BaseModel):
    class Config:
        frozen = True
        # nested models are immutable, sharing them is safe
        copy_on_model_validation = "none"


class Point2(FrozenModel):
    x: float
    y: float

    @classmethod
    def from_tuple(cls, p: Sequence[float]) -> "Point2":
        return cls(x=float(p[0]), y=float(p[1]))

    def as_tuple(self) -> Tuple[float, float]:
        return (self.x, self.y)

    def in_unit_square(self) -> bool:
        return 0.0 <= self.x <= 1.0 and 0.0 <= self.y <= 1.0

    def clamped(self) -> "Point2":
        return Point2(x=min(max(self.x, 0.0), 1.0), y=min(max(self.y, 0.0), 1.0))

    def distance(self, other: "Point2") -> float:
        return float(np.hypot(self.x - other.x, self.y - other.y))


ORIGIN = Point2(x=0.0, y=0.0)


class DirectedEdge(FrozenModel):
    p1: Point2
    p2: Point2

    @classmethod
    def from_coords(cls, x1: float, y1: float, x2: float, y2: float) -> "DirectedEdge":
        return cls(p1=Point2(x=x1, y=y1), p2=Point2(x=x2, y=y2))

    def as_list(self) -> List[float]:
        return [self.p1.x, self.p1.y, self.p2.x, self.p2.y]

    def is_degenerate(self) -> bool:
        return self.p1 == self.p2

    def direction(self) -> Tuple[float, float]:
        return (self.p2.x - self.p1.x, self.p2.y - self.p1.y)

    def length(self) -> float:
        return self.p1.distance(self.p2)

    def reversed(self) -> "DirectedEdge":
        return DirectedEdge(p1=self.p2, p2=self.p1)


PADDING_EDGE = DirectedEdge(p1=ORIGIN, p2=ORIGIN)


class EdgeToken(FrozenModel):
    edge: DirectedEdge
    validity: conint(ge=0, le=1) = 1

    @classmethod
    def padding(cls) -> "EdgeToken":
        return _PADDING_TOKEN

    @property
    def is_valid(self) -> bool:
        return self.validity == 1


_PADDING_TOKEN = EdgeToken(edge=PADDING_EDGE, validity=0)


class RoomEdgeSequence(FrozenModel):
    """Fixed-capacity sequence of edge tokens describing one room.

    The canonical form stores all valid tokens first. Sequences that break
    that rule can still be built (documents may contain them) and are
    reported by ``validate_floorplan``.
    """

    tokens: List[EdgeToken]

    @property
    def capacity(self) -> int:
        return len(self.tokens)

    @property
    def valid_count(self) -> int:
        return sum(t.validity for t in self.tokens)

    @property
    def is_mock(self) -> bool:
        return self.valid_count == 0

    @property
    def valid_edges(self) -> List[DirectedEdge]:
        return [t.edge for t in self.tokens if t.is_valid]

    def labels(self) -> np.ndarray:
        return np.array([t.validity for t in self.tokens], dtype=np.float64)

    def coords(self) -> np.ndarray:
        """(N, 4) array of x1, y1, x2, y2 per token."""
        return np.array([t.edge.as_list() for t in self.tokens], dtype=np.float64)

    def valid_coords(self) -> np.ndarray:
        rows = [e.as_list() for e in self.valid_edges]
        return np.array(rows, dtype=np.float64).reshape(-1, 4)


class ModelCapacity(FrozenModel):
    M: conint(ge=1) = 20
    N: conint(ge=3) = 40

    @classmethod
    def from_settings(cls) -> "ModelCapacity":
        return cls(M=settings.max_rooms, N=settings.max_edges)

    def as_tuple(self) -> Tuple[int, int]:
        return (self.M, self.N)


class Floorplan(FrozenModel):
    rooms: List[RoomEdgeSequence]
    scene_id: Optional[str] = None
    metadata: Dict[str, str] = {}

    @validator("rooms")
    def rooms_share_capacity(cls, rooms):
        if len(rooms) == 0:
            raise ValueError("a floorplan holds at least one room slot")
        sizes = {r.capacity for r in rooms}
        if len(sizes) != 1:
            raise ValueError(f"rooms have differing token counts {sorted(sizes)}")
        return rooms

    @property
    def capacity(self) -> ModelCapacity:
        return ModelCapacity(M=len(self.rooms), N=self.rooms[0].capacity)

    @property
    def real_room_indices(self) -> List[int]:
        return [i for i, r in enumerate(self.rooms) if not r.is_mock]

    @property
    def real_rooms(self) -> List[RoomEdgeSequence]:
        return [r for r in self.rooms if not r.is_mock]


class ViolationKind(str, Enum):
    OUT_OF_RANGE = "out_of_range"
    DEGENERATE_EDGE = "degenerate_edge"
    PADDING_ORDER = "padding_order"


class Violation(FrozenModel):
    kind: ViolationKind
    room: int
    index: int
    detail: str = ""
