"""Multi-peakon ODE system and collision detection"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from src.core.grid_function import GridFunction
from src.core.profile import Profile
from src.core.rk4 import n_steps, rk4_step
from src.errors import BlowupError

logger = logging.getLogger(__name__)

MIN_SPACING = 1e-8
MAX_AMPLITUDE = 1e8


@dataclass(frozen=True, eq=False)
class PeakonState:
    """Amplitudes p and positions q of an N-peakon configuration at time t"""

    t: float
    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        p = np.atleast_1d(np.asarray(self.p, dtype=float))
        q = np.atleast_1d(np.asarray(self.q, dtype=float))
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        if p.size == 0 or p.shape != q.shape:
            raise ValueError("p and q must be non-empty and of equal length")
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(q))):
            raise BlowupError(detail=f"non-finite peakon state at t={self.t}")
        if np.any(np.diff(q) <= 0):
            raise ValueError("peak positions must be strictly increasing")

    @property
    def N(self) -> int:
        return self.p.size

    def min_spacing(self) -> float:
        return float(np.min(np.diff(self.q))) if self.N > 1 else np.inf


@dataclass
class PeakonTrajectory:
    states: List[PeakonState] = field(default_factory=list)
    halted: bool = False
    reason: str = ""

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    def to_frame(self) -> pd.DataFrame:
        """Rows ``t,p1..pN,q1..qN``"""
        N = self.states[0].N
        columns = ["t"] + [f"p{i + 1}" for i in range(N)] + [f"q{i + 1}" for i in range(N)]
        rows = [np.concatenate(([s.t], s.p, s.q)) for s in self.states]
        return pd.DataFrame(rows, columns=columns)


def _rhs_arrays(p: np.ndarray, q: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    diff = q[:, None] - q[None, :]
    kernel = np.exp(-np.abs(diff))
    # The double sums over (j, k) factor into products of single sums
    a = kernel @ p
    b = (np.sign(diff) * kernel) @ p
    return p * a * b, a * a


def peakon_rhs(s: PeakonState) -> Tuple[np.ndarray, np.ndarray]:
    """(dp, dq) of the peakon equations of motion, with sgn(0) = 0"""
    return _rhs_arrays(s.p, s.q)


def _collapsed(p: np.ndarray, q: np.ndarray) -> str:
    if p.size > 1 and np.min(np.diff(q)) < MIN_SPACING:
        return "spacing"
    if np.max(np.abs(p)) > MAX_AMPLITUDE:
        return "amplitude"
    return ""


def integrate_peakons(s0: PeakonState, t_end: float, dt: float) -> PeakonTrajectory:
    """RK4 trajectory sampled every dt, halting on spacing collapse or amplitude growth"""
    steps = n_steps(s0.t, t_end, dt)
    traj = PeakonTrajectory(states=[s0])

    def rhs(_t, y):
        return _rhs_arrays(*y)

    y = (s0.p, s0.q)
    t = s0.t
    for k in range(1, steps + 1):
        p, q = rk4_step(rhs, t, y, dt)
        t = s0.t + k * dt
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(q))):
            raise BlowupError(partial=traj.states, detail=f"non-finite peakon state at t={t:.6f}")
        reason = _collapsed(p, q)
        if reason:
            # A crossed frame has no valid ordering and is not stored
            if np.all(np.diff(q) > 0):
                traj.states.append(PeakonState(t, p, q))
            traj.halted, traj.reason = True, reason
            logger.info("peakon integration halted on %s at t=%.6f", reason, t)
            break
        traj.states.append(PeakonState(t, p, q))
        y = (p, q)
    return traj


def peakon_profile(s: PeakonState) -> Profile:
    """Exact (u, u_x) of Σ p_i e^{-|x-q_i|} at arbitrary points; the tips are the kinks"""

    def evaluate(x: np.ndarray, side) -> Tuple[np.ndarray, np.ndarray]:
        diff = x[..., None] - s.q
        kernel = np.exp(-np.abs(diff))
        sign = np.where(diff == 0, np.asarray(side, dtype=float)[..., None], np.sign(diff))
        return kernel @ s.p, (-sign * kernel) @ s.p

    return Profile(evaluate, kinks=tuple(float(q) for q in s.q))


def peakon_field(s: PeakonState, grid: GridFunction) -> GridFunction:
    """u(x) = Σ p_i e^{-|x-q_i|} sampled on the template grid"""
    u, _ = peakon_profile(s)(grid.x)
    return grid.like(u)


def peakon_energy(s: PeakonState) -> float:
    """Exact H¹ energy 2 Σ p_i p_j e^{-|q_i-q_j|}"""
    kernel = np.exp(-np.abs(s.q[:, None] - s.q[None, :]))
    return float(2.0 * s.p @ kernel @ s.p)


def detect_crossing(traj: PeakonTrajectory) -> Optional[Tuple[float, float]]:
    """Collision (t*, q*) linearly extrapolated from the last two frames of a spacing halt"""
    if not traj.halted or traj.reason != "spacing" or len(traj.states) < 2:
        return None
    a, b = traj.states[-2], traj.states[-1]
    gaps_a, gaps_b = np.diff(a.q), np.diff(b.q)
    i = int(np.argmin(gaps_b))
    closing = gaps_a[i] - gaps_b[i]
    if closing <= 0:
        return None
    tau = gaps_b[i] / closing
    t_star = b.t + tau * (b.t - a.t)
    mid_a = 0.5 * (a.q[i] + a.q[i + 1])
    mid_b = 0.5 * (b.q[i] + b.q[i + 1])
    q_star = mid_b + tau * (mid_b - mid_a)
    return float(t_star), float(q_star)
