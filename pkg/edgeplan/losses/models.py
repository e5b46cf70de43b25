import numpy as np
from pydantic import BaseModel, confloat, validator

from edgeplan.core.models import FrozenModel
from edgeplan.settings import settings


class RasterMask(BaseModel):
    """Binary occupancy grid indexed ``[row, col]`` (row = y, col = x)."""

    width: int
    height: int
    occupancy: np.ndarray

    class Config:
        frozen = True
        arbitrary_types_allowed = True

    @validator("occupancy")
    def boolean_grid(cls, v, values):
        v = np.asarray(v, dtype=bool)
        shape = (values.get("height"), values.get("width"))
        if v.shape != shape:
            raise ValueError(f"occupancy shape {v.shape} != {shape}")
        return v

    @classmethod
    def empty(cls, width: int, height: int) -> "RasterMask":
        return cls(
            width=width, height=height, occupancy=np.zeros((height, width), bool)
        )

    @property
    def shape(self):
        return (self.height, self.width)

    def area(self) -> int:
        return int(self.occupancy.sum())

    def is_empty(self) -> bool:
        return not self.occupancy.any()


class LossWeights(FrozenModel):
    lambda_cls: confloat(ge=0) = 0.6
    lambda_edge: confloat(ge=0) = 6.0
    lambda_ras: confloat(ge=0) = 1.0
    lambda_cls_dn: confloat(ge=0) = 0.6
    lambda_edge_dn: confloat(ge=0) = 6.0

    @classmethod
    def from_settings(cls) -> "LossWeights":
        return cls(
            lambda_cls=settings.lambda_cls,
            lambda_edge=settings.lambda_edge,
            lambda_ras=settings.lambda_ras,
            lambda_cls_dn=settings.lambda_cls_dn,
            lambda_edge_dn=settings.lambda_edge_dn,
        )


class LossBreakdown(FrozenModel):
    cls: float
    edge: float
    ras: float
    cls_dn: float = 0.0
    edge_dn: float = 0.0
    total: float

    @classmethod
    def from_terms(
        cls,
        weights: LossWeights,
        cls_term: float,
        edge: float,
        ras: float,
        cls_dn: float = 0.0,
        edge_dn: float = 0.0,
    ) -> "LossBreakdown":
        total = (
            weights.lambda_cls * cls_term
            + weights.lambda_edge * edge
            + weights.lambda_ras * ras
            + weights.lambda_cls_dn * cls_dn
            + weights.lambda_edge_dn * edge_dn
        )
        return cls(
            cls=cls_term,
            edge=edge,
            ras=ras,
            cls_dn=cls_dn,
            edge_dn=edge_dn,
            total=total,
        )
