"""Classical fourth-order Runge-Kutta step on tuples of arrays"""

from typing import Callable, Tuple

import numpy as np

State = Tuple[np.ndarray, ...]
RHS = Callable[[float, State], State]


def _axpy(y: State, a: float, k: State) -> State:
    return tuple(yi + a * ki for yi, ki in zip(y, k))


def rk4_step(rhs: RHS, t: float, y: State, dt: float) -> State:
    """One RK4 step of y' = rhs(t, y); dt may be negative"""
    k1 = rhs(t, y)
    k2 = rhs(t + dt / 2, _axpy(y, dt / 2, k1))
    k3 = rhs(t + dt / 2, _axpy(y, dt / 2, k2))
    k4 = rhs(t + dt, _axpy(y, dt, k3))
    return tuple(
        yi + dt / 6 * (a + 2 * b + 2 * c + d)
        for yi, a, b, c, d in zip(y, k1, k2, k3, k4)
    )


def n_steps(t0: float, t_end: float, dt: float) -> int:
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if not t_end > t0:
        raise ValueError(f"t_end ({t_end}) must exceed the start time ({t0})")
    return max(1, int(round((t_end - t0) / dt)))
