from typing import List, Optional

import numpy as np
from pydantic import BaseModel, validator

from edgeplan.core.models import Floorplan, FrozenModel, ModelCapacity
from edgeplan.denoising.exceptions import InvalidConfig
from edgeplan.matching.models import PredictionSet
from edgeplan.settings import settings


class NoiseConfig(FrozenModel):
    lambda_geo: float = 0.4
    gamma_flip: float = 0.2
    seed: Optional[int] = None
    groups: int = 1

    @validator("lambda_geo")
    def non_negative_scale(cls, v):
        if not v >= 0:
            raise InvalidConfig("lambda_geo", v)
        return v

    @validator("gamma_flip")
    def probability(cls, v):
        if not 0.0 <= v <= 1.0:
            raise InvalidConfig("gamma_flip", v)
        return v

    @validator("groups")
    def at_least_one_group(cls, v):
        if v < 1:
            raise InvalidConfig("groups", v)
        return v

    @classmethod
    def from_settings(cls, seed: Optional[int] = None) -> "NoiseConfig":
        return cls(
            lambda_geo=settings.noise_lambda,
            gamma_flip=settings.noise_gamma,
            seed=seed,
            groups=settings.noise_groups,
        )


class PerturbedQuerySet(BaseModel):
    """Noised copies of a ground-truth floorplan, one per denoising group.

    ``groups[g].rooms[m].tokens[n]`` originates from ground-truth token
    ``(m, n)``. ``displacements[g, m, n]`` holds the pre-clamp endpoint
    offsets ``dx1, dy1, dx2, dy2`` in normalized units (zero for padding) and
    ``flipped[g, m, n]`` marks relabelled tokens.
    """

    groups: List[Floorplan]
    displacements: np.ndarray
    flipped: np.ndarray
    config: NoiseConfig

    class Config:
        frozen = True
        arbitrary_types_allowed = True

    @validator("displacements")
    def displacement_shape(cls, v, values):
        groups = values.get("groups") or []
        if groups:
            m, n = groups[0].capacity.as_tuple()
            if v.shape != (len(groups), m, n, 4):
                raise ValueError(f"displacements shape {v.shape} does not fit groups")
        return v

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    @property
    def capacity(self) -> ModelCapacity:
        return self.groups[0].capacity

    @property
    def tokens_per_group(self) -> int:
        m, n = self.capacity.as_tuple()
        return m * n

    @property
    def group_id(self) -> np.ndarray:
        """Group index of every token, flattened group-major then room, edge."""
        return np.repeat(np.arange(self.n_groups), self.tokens_per_group)

    @property
    def origin(self) -> np.ndarray:
        """(room, edge) back-reference of every token, same order as ``group_id``."""
        m, n = self.capacity.as_tuple()
        rooms, edges = np.meshgrid(np.arange(m), np.arange(n), indexing="ij")
        pairs = np.stack([rooms.ravel(), edges.ravel()], axis=1)
        return np.tile(pairs, (self.n_groups, 1))

    def as_prediction(self, group: int = 0) -> PredictionSet:
        """The group as a prediction whose confidences are the noised labels."""
        return PredictionSet.from_floorplan(self.groups[group])

    def as_predictions(self) -> List[PredictionSet]:
        return [self.as_prediction(g) for g in range(self.n_groups)]


class AttentionMask(BaseModel):
    """Boolean grid over ``[perturbed groups | latent]``; True = may attend."""

    allowed: np.ndarray
    n_groups: int
    tokens_per_group: int
    n_latent: int

    class Config:
        frozen = True
        arbitrary_types_allowed = True

    @property
    def size(self) -> int:
        return int(self.allowed.shape[0])

    @property
    def n_perturbed(self) -> int:
        return self.n_groups * self.tokens_per_group

    def group_of(self, index: int) -> Optional[int]:
        """Group of a perturbed position, None for latent positions."""
        if index < self.n_perturbed:
            return index // self.tokens_per_group
        return None

    def can_attend(self, query: int, key: int) -> bool:
        return bool(self.allowed[query, key])
