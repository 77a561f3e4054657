"""Transport of tangent frames (v, v_x, w, w_x) along a stored smooth solution

Each RK4 step between stored slices freezes the background u by linear interpolation
in time. The v and v_x equations are the linearised flow and its x-derivative; w and
w_x move the characteristic shift with speed u² (Novikov) or u (Camassa-Holm).
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel

from src.core.grid_function import GridFunction, derivative, second_derivative, trapezoid_weights
from src.core.kernels import kernel_pair
from src.core.rk4 import rk4_step
from src.metric.finsler import DEFAULT_CANDIDATES, CostFn, TangentFrame, carried_shift, finsler_cost, finsler_norm_upper
from src.smooth.novikov_solver import SLOPE_GUARD, check_slope
from src.smooth.stepper import FieldTrajectory

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Background:
    """u and its first two x-derivatives at one instant"""

    u: np.ndarray
    ux: np.ndarray
    uxx: np.ndarray
    grid: GridFunction

    @classmethod
    def of(cls, u: GridFunction) -> "Background":
        return cls(u.values, derivative(u.values, u.dx), second_derivative(u.values, u.dx), u)

    def sym_anti(self, f: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """½∫e^{-|x-y|}f(y)dy and its x-derivative"""
        return kernel_pair(self.grid.x, f * trapezoid_weights(f.size) * self.grid.dx)


Frame = Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]
TangentRHS = Callable[[Background, Frame], Frame]


def novikov_tangent_rhs(bg: Background, y: Frame) -> Frame:
    u, ux, uxx = bg.u, bg.ux, bg.uxx
    v, vx, w, wx = y
    dx = bg.grid.dx
    vxx = derivative(vx, dx)
    wxx = derivative(wx, dx)
    linear_p1 = 1.5 * ux ** 2 * v + 3 * u * ux * vx + 3 * u ** 2 * v
    sym1, anti1 = bg.sym_anti(linear_p1)
    sym2, anti2 = bg.sym_anti(ux ** 2 * vx)

    v_t = -(u ** 2) * vx - 2 * u * ux * v - anti1 - 1.5 * sym2
    vx_t = (
        -(u ** 2) * vxx - u * ux * vx - 0.5 * ux ** 2 * v - 2 * u * uxx * v + 3 * u ** 2 * v
        - sym1 - 1.5 * anti2
    )
    shift = v + ux * w
    w_t = -(u ** 2) * wx + 2 * u * shift
    # x-derivative of the w equation; the 2uu_x w_x terms from both sides cancel
    wx_t = -(u ** 2) * wxx + 2 * ux * shift + 2 * u * (vx + uxx * w)
    return v_t, vx_t, w_t, wx_t


def transport(
    u_traj: FieldTrajectory,
    tf0: TangentFrame,
    rhs: TangentRHS,
    guard: Optional[float] = None,
) -> List[TangentFrame]:
    """Frames at every stored time of ``u_traj``"""
    if not u_traj.states:
        raise ValueError("empty solution trajectory")
    tf0.check_aligned(u_traj.states[0])
    frames = [tf0]
    y: Frame = (tf0.v, tf0.vx, tf0.w, tf0.wx)
    for k in range(len(u_traj) - 1):
        u_a, u_b = u_traj.states[k], u_traj.states[k + 1]
        if guard is not None:
            check_slope(u_b, guard)
        t_a, t_b = u_traj.times[k], u_traj.times[k + 1]
        span = t_b - t_a
        cache = {}

        def stage(t, state, u_a=u_a, u_b=u_b, t_a=t_a, span=span, cache=cache):
            theta = round((t - t_a) / span, 12)
            if theta not in cache:
                cache[theta] = Background.of(u_a.like((1 - theta) * u_a.values + theta * u_b.values))
            return rhs(cache[theta], state)

        y = rk4_step(stage, t_a, y, span)
        frames.append(TangentFrame(*y))
    return frames


def evolve_tangent(u_traj: FieldTrajectory, tf0: TangentFrame) -> List[TangentFrame]:
    """Novikov tangent frames along a smooth solution"""
    return transport(u_traj, tf0, novikov_tangent_rhs, guard=SLOPE_GUARD)


class GrowthReport(BaseModel):
    times: List[float]
    norms: List[float]
    fitted_rate: float
    envelope_rate: float
    max_ratio: float

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"t": self.times, "norm": self.norms})


def growth_report(times: Sequence[float], norms: Sequence[float]) -> GrowthReport:
    """Least-squares slope of log(norm) against t, plus the smallest C with
    norms[k] ≤ e^{C t_k} norms[0]"""
    t = np.asarray(times, dtype=float)
    n = np.asarray(norms, dtype=float)
    if n[0] <= 0:
        grows = bool(np.any(n > 0))
        rate = float("inf") if grows else 0.0
        return GrowthReport(times=list(t), norms=list(n), fitted_rate=rate, envelope_rate=rate, max_ratio=rate)
    ratio = n / n[0]
    logs = np.log(np.maximum(ratio, np.finfo(float).tiny))
    fitted = float(np.polyfit(t, logs, 1)[0]) if t.size > 1 else 0.0
    later = t > t[0]
    envelope = float(np.max(logs[later] / (t[later] - t[0]))) if np.any(later) else 0.0
    return GrowthReport(
        times=list(t),
        norms=list(n),
        fitted_rate=fitted,
        envelope_rate=max(envelope, 0.0),
        max_ratio=float(np.max(ratio)),
    )


def verify_growth(
    u_traj: FieldTrajectory,
    tf_traj: List[TangentFrame],
    cost: CostFn = finsler_cost,
) -> GrowthReport:
    """Norm upper bounds along the transported frames and their exponential growth rate"""
    if len(tf_traj) != len(u_traj):
        raise ValueError(f"{len(tf_traj)} frames for {len(u_traj)} solution slices")
    norms = []
    for u, tf in zip(u_traj.states, tf_traj):
        v = u.like(tf.v)
        candidates = DEFAULT_CANDIDATES + [carried_shift(tf)]
        norms.append(finsler_norm_upper(u, v, candidates, cost=cost))
    report = growth_report(u_traj.times, norms)
    logger.info(
        "tangent growth: fitted rate %.4f, envelope rate %.4f, max ratio %.4f",
        report.fitted_rate, report.envelope_rate, report.max_ratio,
    )
    return report
