"""Finsler transport cost of a tangent vector (v, w) at a solution u

The vertical shift v and the horizontal shift w of the characteristics enter four
weighted integrals: horizontal transport, vertical transport, slope change and change
of the base measure (1 + u_x²)² dx.
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator

from src.core.grid_function import GridFunction, decay_weights, derivative, second_derivative, trapezoid_weights
from src.errors import NonFiniteInputError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TangentFrame:
    """v, v_x, w, w_x on the grid of a reference solution"""

    v: np.ndarray
    vx: np.ndarray
    w: np.ndarray
    wx: np.ndarray

    def __post_init__(self):
        n = None
        for name in ("v", "vx", "w", "wx"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arr)
            if n is None:
                n = arr.shape
            if arr.ndim != 1 or arr.shape != n:
                raise ValueError("tangent frame fields must be 1-d arrays of equal length")
            if not np.all(np.isfinite(arr)):
                raise NonFiniteInputError(f"tangent field {name}")

    @classmethod
    def from_fields(cls, v: GridFunction, w: Optional[GridFunction] = None) -> "TangentFrame":
        w_values = np.zeros(v.n) if w is None else w.values
        return cls(v.values, derivative(v.values, v.dx), w_values, derivative(w_values, v.dx))

    @classmethod
    def zeros(cls, n: int) -> "TangentFrame":
        z = np.zeros(n)
        return cls(z, z, z, z)

    @classmethod
    def translation(cls, u: GridFunction, h: float) -> "TangentFrame":
        """Tangent of the family u(x - εh): v = -h u_x, w = h"""
        return cls(
            -h * derivative(u.values, u.dx),
            -h * second_derivative(u.values, u.dx),
            np.full(u.n, float(h)),
            np.zeros(u.n),
        )

    @property
    def n(self) -> int:
        return self.v.size

    def scaled(self, factor: float) -> "TangentFrame":
        return TangentFrame(factor * self.v, factor * self.vx, factor * self.w, factor * self.wx)

    def check_aligned(self, u: GridFunction) -> None:
        if self.n != u.n:
            raise ValueError(f"tangent frame has {self.n} samples, solution has {u.n}")


class CostBreakdown(BaseModel):
    """The four cost integrals; I4 stays 0 for the Camassa-Holm cost"""

    I1: float = Field(ge=0)
    I2: float = Field(ge=0)
    I3: float = Field(ge=0)
    I4: float = Field(default=0.0, ge=0)
    total: float = 0.0

    @model_validator(mode="after")
    def _sum_parts(self) -> "CostBreakdown":
        self.total = self.I1 + self.I2 + self.I3 + self.I4
        return self


def cost_weights(u: GridFunction, weighted: bool = True) -> np.ndarray:
    """Quadrature weights for ∫ · e^{-|x|} dx, or for plain ∫ · dx"""
    if weighted:
        return decay_weights(u)
    return trapezoid_weights(u.n) * u.dx


def finsler_cost(u: GridFunction, tf: TangentFrame, weighted: bool = True) -> CostBreakdown:
    """Cost of (v, w) at u; ``weighted=False`` drops e^{-|x|}"""
    tf.check_aligned(u)
    ux = derivative(u.values, u.dx)
    uxx = second_derivative(u.values, u.dx)
    q = 1.0 + ux ** 2
    slope_change = tf.vx + uxx * tf.w
    W = cost_weights(u, weighted)
    return CostBreakdown(
        I1=float(W @ (np.abs(tf.w) * q ** 2)),
        I2=float(W @ (np.abs(tf.v + ux * tf.w) * q ** 2)),
        I3=float(W @ (np.abs(slope_change) * q)),
        I4=float(W @ np.abs(4 * (ux + ux ** 3) * slope_change + q ** 2 * tf.wx)),
    )


# Builds a candidate transport w for the vertical shift v at u
Candidate = Callable[[GridFunction, GridFunction], TangentFrame]
CostFn = Callable[..., CostBreakdown]


def zero_shift(u: GridFunction, v: GridFunction) -> TangentFrame:
    return TangentFrame.from_fields(v)


def translation_shift(u: GridFunction, v: GridFunction) -> TangentFrame:
    """Constant w = h minimising ∫(v + u_x h)², i.e. h = -∫v u_x / ∫u_x²"""
    ux = derivative(u.values, u.dx)
    denom = float(np.dot(ux, ux))
    h = -float(np.dot(v.values, ux)) / denom if denom > 0 else 0.0
    w = np.full(u.n, h)
    return TangentFrame(v.values, derivative(v.values, v.dx), w, np.zeros(u.n))


def carried_shift(frame: TangentFrame) -> Candidate:
    """Candidate that returns a transport computed elsewhere, e.g. along a trajectory"""

    def candidate(u: GridFunction, v: GridFunction) -> TangentFrame:
        return frame

    return candidate


DEFAULT_CANDIDATES: List[Candidate] = [zero_shift, translation_shift]


def finsler_norm_upper(
    u: GridFunction,
    v: GridFunction,
    w_candidates: Optional[List[Candidate]] = None,
    weighted: bool = True,
    cost: CostFn = finsler_cost,
) -> float:
    """Least cost over the candidate transports: an upper bound on the norm of v"""
    candidates = DEFAULT_CANDIDATES if w_candidates is None else w_candidates
    if not candidates:
        raise ValueError("empty candidate set")
    totals = [cost(u, candidate(u, v), weighted=weighted).total for candidate in candidates]
    best = int(np.argmin(totals))
    logger.debug("finsler norm %.6e from candidate %d of %d", totals[best], best, len(totals))
    return float(totals[best])
