"""Novikov equation u_t + u²u_x + ∂xP1 + P2 = 0 for smooth data

P1 = G*(3/2 uu_x² + u³) and P2 = ½G*(u_x³) with G = ½e^{-|x|}.
"""

from typing import NamedTuple

import numpy as np

from src.core.grid_function import GridFunction, derivative, second_derivative
from src.core.kernels import green_pair
from src.errors import NearBreakingError
from src.smooth.stepper import FieldTrajectory, evolve_field, field_step

# Largest |u_x| the x-space solver accepts
SLOPE_GUARD = 10.0


class SourceFields(NamedTuple):
    P1: GridFunction
    dxP1: GridFunction
    P2: GridFunction
    dxP2: GridFunction


class FieldRates(NamedTuple):
    u_t: GridFunction
    u_xt: GridFunction


def check_slope(u: GridFunction, guard: float = SLOPE_GUARD) -> np.ndarray:
    ux = derivative(u.values, u.dx)
    steepest = float(np.max(np.abs(ux)))
    if steepest > guard:
        raise NearBreakingError(steepest, guard)
    return ux


def novikov_sources(u: GridFunction) -> SourceFields:
    ux = derivative(u.values, u.dx)
    P1, dxP1 = green_pair(u.like(1.5 * u.values * ux ** 2 + u.values ** 3))
    sym2, anti2 = green_pair(u.like(ux ** 3))
    return SourceFields(P1, dxP1, u.like(0.5 * sym2.values), u.like(0.5 * anti2.values))


def novikov_rhs(u: GridFunction, guard: float = SLOPE_GUARD) -> FieldRates:
    """(u_t, u_xt); raises NearBreakingError once max |u_x| exceeds ``guard``"""
    ux = check_slope(u, guard)
    uxx = second_derivative(u.values, u.dx)
    src = novikov_sources(u)
    v = u.values
    u_t = -(v ** 2) * ux - src.dxP1.values - src.P2.values
    u_xt = -(v ** 2) * uxx - 0.5 * v * ux ** 2 + v ** 3 - src.P1.values - src.dxP2.values
    return FieldRates(u.like(u_t), u.like(u_xt))


def _rate(u: GridFunction) -> np.ndarray:
    return novikov_rhs(u).u_t.values


def _speed(values: np.ndarray) -> np.ndarray:
    return values ** 2


def smooth_step(u: GridFunction, dt: float) -> GridFunction:
    """One RK4 step, subject to dt ≤ 0.25·dx/max(u²)"""
    return field_step(u, dt, _rate, _speed)


def evolve_smooth(u0: GridFunction, t_end: float, dt: float = 1e-3, store_every: int = 1) -> FieldTrajectory:
    return evolve_field(u0, t_end, dt, _rate, _speed, store_every=store_every)
