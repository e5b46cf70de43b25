from typing import Tuple

import numpy as np
from pydantic import BaseModel, validator


class _ArrayModel(BaseModel):
    class Config:
        frozen = True
        arbitrary_types_allowed = True
        copy_on_model_validation = "none"


class Bounds(BaseModel):
    min_x: float
    min_y: float
    max_x: float
    max_y: float

    class Config:
        frozen = True

    @classmethod
    def from_tuple(cls, b) -> "Bounds":
        return cls(min_x=b[0], min_y=b[1], max_x=b[2], max_y=b[3])

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.min_x, self.min_y, self.max_x, self.max_y)

    def is_degenerate(self) -> bool:
        return not (self.min_x < self.max_x and self.min_y < self.max_y)

    def translated(self, dx: float, dy: float) -> "Bounds":
        return Bounds(
            min_x=self.min_x + dx,
            min_y=self.min_y + dy,
            max_x=self.max_x + dx,
            max_y=self.max_y + dy,
        )


class PointCloud(_ArrayModel):
    points: np.ndarray

    @validator("points", pre=True)
    def as_xyz(cls, v):
        arr = np.asarray(v, dtype=np.float64)
        if arr.size == 0:
            return arr.reshape(0, 3)
        if arr.ndim != 2 or arr.shape[1] != 3:
            raise ValueError(f"expected an (n, 3) array of x y z, got {arr.shape}")
        return arr

    def __len__(self) -> int:
        return int(self.points.shape[0])

    def translated(self, dx: float, dy: float, dz: float = 0.0) -> "PointCloud":
        return PointCloud(points=self.points + np.array([dx, dy, dz]))


class DensityMap(_ArrayModel):
    """Row-major occupancy grid; ``values[row, col]`` with row along y."""

    width: int
    height: int
    values: np.ndarray
    bounds: Bounds
    max_count: int = 0

    @validator("values", pre=True)
    def as_grid(cls, v, values):
        arr = np.asarray(v, dtype=np.float64)
        shape = (values.get("height"), values.get("width"))
        if arr.shape != shape:
            raise ValueError(f"values have shape {arr.shape}, expected {shape}")
        if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
            raise ValueError("density values must lie in [0, 1]")
        return arr

    def as_array(self) -> np.ndarray:
        return self.values

    def counts(self) -> np.ndarray:
        """Reconstructed per-pixel point counts."""
        return np.rint(self.values * self.max_count).astype(np.int64)

    def pixel(self, col: int, row: int) -> float:
        return float(self.values[row, col])

