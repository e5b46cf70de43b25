from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import confloat

from edgeplan.core.models import FrozenModel
from edgeplan.settings import settings


class Matcher(str, Enum):
    GREEDY = "greedy"
    HUNGARIAN = "hungarian"


class MetricThresholds(FrozenModel):
    room_iou_min: confloat(gt=0.0, le=1.0) = 0.7
    corner_dist_max: confloat(gt=0.0) = 10.0
    angle_tol_deg: confloat(gt=0.0) = 5.0

    @classmethod
    def from_settings(cls) -> "MetricThresholds":
        return cls(
            room_iou_min=settings.room_iou_min,
            corner_dist_max=settings.corner_dist_max,
            angle_tol_deg=settings.angle_tol_deg,
        )


class LevelCounts(FrozenModel):
    """Tallies behind one precision/recall/F1 triple.

    Conventions: no predictions gives precision 0, no ground truth gives
    recall 0, and nothing on either side counts as a perfect score.
    """

    matched: int = 0
    predicted: int = 0
    actual: int = 0

    def __add__(self, other: "LevelCounts") -> "LevelCounts":
        return LevelCounts(
            matched=self.matched + other.matched,
            predicted=self.predicted + other.predicted,
            actual=self.actual + other.actual,
        )

    @property
    def precision(self) -> float:
        if self.predicted == 0:
            return 1.0 if self.actual == 0 else 0.0
        return self.matched / self.predicted

    @property
    def recall(self) -> float:
        if self.actual == 0:
            return 1.0 if self.predicted == 0 else 0.0
        return self.matched / self.actual

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        if p + r == 0:
            return 0.0
        return 2 * p * r / (p + r)

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.precision, self.recall, self.f1)

    def scores(self, scale: float = 1.0) -> Dict[str, float]:
        return {
            "precision": self.precision * scale,
            "recall": self.recall * scale,
            "f1": self.f1 * scale,
        }


class MetricsReport(FrozenModel):
    """Room, corner and angle tallies of one scene plus its room IoU.

    ``room_iou`` is the mean, over ground-truth rooms, of the best IoU any
    predicted room reaches; ``iou_sum``/``iou_count`` keep it summable.
    """

    scene_id: Optional[str] = None
    room: LevelCounts = LevelCounts()
    corner: LevelCounts = LevelCounts()
    angle: LevelCounts = LevelCounts()
    iou_sum: float = 0.0
    iou_count: int = 0

    @property
    def room_iou(self) -> float:
        if self.iou_count == 0:
            return 0.0
        return self.iou_sum / self.iou_count

    def to_dict(self, percent: bool = False) -> Dict:
        scale = 100.0 if percent else 1.0
        return {
            "scene_id": self.scene_id,
            "room": self.room.scores(scale),
            "corner": self.corner.scores(scale),
            "angle": self.angle.scores(scale),
            "room_iou": self.room_iou * scale,
            "counts": {
                level: getattr(self, level).dict()
                for level in ("room", "corner", "angle")
            },
        }


class DatasetReport(FrozenModel):
    """Micro-averaged totals, per-scene macro means and the scene reports."""

    micro: MetricsReport
    macro: Dict[str, Dict[str, float]]
    scenes: List[MetricsReport]

    def to_dict(self, percent: bool = False) -> Dict:
        scale = 100.0 if percent else 1.0
        return {
            "micro": self.micro.to_dict(percent),
            "macro": {
                level: {k: v * scale for k, v in values.items()}
                for level, values in self.macro.items()
            },
            "scenes": [s.to_dict(percent) for s in self.scenes],
        }
