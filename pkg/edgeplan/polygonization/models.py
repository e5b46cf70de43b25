from enum import Enum
from typing import List, Tuple

import numpy as np
from pydantic import validator

from edgeplan.core.exceptions import DegenerateEdge, TooFewVertices
from edgeplan.core.models import FrozenModel, Point2


class PolygonVertices(FrozenModel):
    """Closed vertex loop; the last vertex connects back to the first."""

    vertices: List[Point2]

    @validator("vertices")
    def closed_loop(cls, v):
        if len(v) < 3:
            raise TooFewVertices(len(v))
        for i in range(len(v)):
            a, b = v[i], v[(i + 1) % len(v)]
            if abs(a.x - b.x) <= 1e-12 and abs(a.y - b.y) <= 1e-12:
                raise DegenerateEdge(index=i)
        return v

    @classmethod
    def from_tuples(cls, pts) -> "PolygonVertices":
        return cls(vertices=[Point2.from_tuple(p) for p in pts])

    def as_array(self) -> np.ndarray:
        return np.array([p.as_tuple() for p in self.vertices], dtype=np.float64)

    def as_tuples(self) -> List[Tuple[float, float]]:
        return [p.as_tuple() for p in self.vertices]

    def __len__(self) -> int:
        return len(self.vertices)


class IntersectionKind(str, Enum):
    TYPE_I = "type_i"
    TYPE_II = "type_ii"
    TYPE_III = "type_iii"
    TYPE_IV = "type_iv"
    PARALLEL = "parallel"


class IntersectionOutcome(FrozenModel):
    kind: IntersectionKind
    vertex_contribution: List[Point2]

    @validator("vertex_contribution")
    def contribution_size(cls, v, values):
        expected = 2 if values.get("kind") == IntersectionKind.TYPE_IV else 1
        if len(v) != expected:
            raise ValueError(f"{values.get('kind')} contributes {expected} point(s)")
        return v
