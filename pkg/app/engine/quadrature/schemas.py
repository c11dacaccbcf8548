from dataclasses import dataclass
from enum import Enum

import numpy as np
from pydantic import BaseModel, Field


class SelfTermStrategy(str, Enum):
    ANALYTIC_BALL = 'analytic_ball'
    DUFFY = 'duffy'


class SingularPolicy(BaseModel):
    near_threshold: float = Field(2.0, ge=1.0)
    depth: int = Field(4, ge=0, le=8)
    self_term: SelfTermStrategy = SelfTermStrategy.ANALYTIC_BALL

    class Config:
        allow_mutation = False
        extra = 'forbid'


@dataclass(frozen=True)
class TriangleRule:
    """Barycentric points (q, 3) and weights (q,) summing to 1."""
    order: int
    points: np.ndarray
    weights: np.ndarray

    def map(self, corners: np.ndarray) -> np.ndarray:
        """Physical points (..., q, 3) for panels with corners (..., 3, 3)."""
        return np.einsum('qk,...kj->...qj', self.points, corners)

    def integrate(self, fn, corners: np.ndarray) -> np.ndarray:
        corners = np.asarray(corners, dtype=float)
        area = 0.5 * np.linalg.norm(
            np.cross(corners[..., 1, :] - corners[..., 0, :], corners[..., 2, :] - corners[..., 0, :]), axis=-1,
        )
        return area * np.sum(self.weights * fn(self.map(corners)), axis=-1)


@dataclass(frozen=True)
class TetRule:
    """Barycentric points (q, 4) and weights (q,) summing to 1."""
    order: int
    points: np.ndarray
    weights: np.ndarray

    def map(self, corners: np.ndarray) -> np.ndarray:
        return np.einsum('qk,...kj->...qj', self.points, corners)

    def integrate(self, fn, corners: np.ndarray) -> np.ndarray:
        corners = np.asarray(corners, dtype=float)
        e1 = corners[..., 1, :] - corners[..., 0, :]
        e2 = corners[..., 2, :] - corners[..., 0, :]
        e3 = corners[..., 3, :] - corners[..., 0, :]
        volume = np.abs(np.einsum('...i,...i->...', np.cross(e1, e2), e3)) / 6.0
        return volume * np.sum(self.weights * fn(self.map(corners)), axis=-1)
