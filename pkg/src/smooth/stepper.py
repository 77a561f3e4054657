"""Fixed-step RK4 evolution of a single grid field u_t = rate(u)"""

import logging
from dataclasses import dataclass, field
from typing import Callable, List

import numpy as np
import pandas as pd

from src.core.grid_function import GridFunction
from src.core.rk4 import n_steps, rk4_step
from src.errors import BlowupError, NonFiniteInputError

logger = logging.getLogger(__name__)

# dt ≤ CFL_FACTOR · dx / max speed
CFL_FACTOR = 0.25

Rate = Callable[[GridFunction], np.ndarray]
Speed = Callable[[np.ndarray], np.ndarray]


@dataclass
class FieldTrajectory:
    """Stored slices of an x-space solution at uniform spacing ``dt * store_every``"""

    states: List[GridFunction] = field(default_factory=list)
    times: List[float] = field(default_factory=list)

    @property
    def dt(self) -> float:
        return self.times[1] - self.times[0] if len(self.times) > 1 else 0.0

    def __len__(self) -> int:
        return len(self.states)

    def to_frame(self) -> pd.DataFrame:
        """Long format ``t,x,u``"""
        frames = [
            pd.DataFrame({"t": t, "x": u.x, "u": u.values})
            for t, u in zip(self.times, self.states)
        ]
        return pd.concat(frames, ignore_index=True)


def check_cfl(u: GridFunction, dt: float, speed: Speed) -> None:
    fastest = float(np.max(np.abs(speed(u.values))))
    if fastest > 0 and dt > CFL_FACTOR * u.dx / fastest:
        raise ValueError(
            f"dt={dt} violates dt <= {CFL_FACTOR}*dx/max speed = {CFL_FACTOR * u.dx / fastest:.3e}"
        )


def field_step(u: GridFunction, dt: float, rate: Rate, speed: Speed) -> GridFunction:
    """One RK4 step; every stage re-validates the field through ``rate``"""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    check_cfl(u, dt, speed)

    def rhs(_t, y):
        return (rate(u.like(y[0])),)

    (values,) = rk4_step(rhs, 0.0, (u.values,), dt)
    return u.like(values)


def evolve_field(
    u0: GridFunction,
    t_end: float,
    dt: float,
    rate: Rate,
    speed: Speed,
    store_every: int = 1,
    t0: float = 0.0,
) -> FieldTrajectory:
    steps = n_steps(t0, t_end, dt)
    traj = FieldTrajectory(states=[u0], times=[t0])
    u = u0
    for k in range(1, steps + 1):
        try:
            u = field_step(u, dt, rate, speed)
        except NonFiniteInputError as exc:
            raise BlowupError(partial=traj.states, detail=f"t={t0 + k * dt:.6f}") from exc
        if k % store_every == 0 or k == steps:
            traj.states.append(u)
            traj.times.append(t0 + k * dt)
    logger.debug("evolved %d steps to t=%.6f", steps, traj.times[-1])
    return traj
