"""Camassa-Holm u_t + uu_x + ∂xP = 0, P = ½e^{-|x|} * (u² + ½u_x²), and its tangent machinery"""

from typing import List, NamedTuple

import numpy as np

from src.core.grid_function import GridFunction, derivative, second_derivative
from src.core.kernels import green_pair
from src.energy.energy_analysis import energy_E
from src.metric.finsler import CostBreakdown, TangentFrame, cost_weights
from src.metric.tangent_transport import Background, Frame, GrowthReport, transport, verify_growth
from src.smooth.novikov_solver import SLOPE_GUARD, FieldRates, check_slope
from src.smooth.stepper import FieldTrajectory, evolve_field, field_step


class CHSources(NamedTuple):
    P: GridFunction
    Px: GridFunction


def ch_sources(u: GridFunction) -> CHSources:
    ux = derivative(u.values, u.dx)
    P, Px = green_pair(u.like(u.values ** 2 + 0.5 * ux ** 2))
    return CHSources(P, Px)


def ch_rhs(u: GridFunction, guard: float = SLOPE_GUARD) -> FieldRates:
    """u_t = -uu_x - P_x and u_xt = -uu_xx - ½u_x² + u² - P"""
    ux = check_slope(u, guard)
    uxx = second_derivative(u.values, u.dx)
    src = ch_sources(u)
    v = u.values
    u_t = -v * ux - src.Px.values
    u_xt = -v * uxx - 0.5 * ux ** 2 + v ** 2 - src.P.values
    return FieldRates(u.like(u_t), u.like(u_xt))


def _rate(u: GridFunction) -> np.ndarray:
    return ch_rhs(u).u_t.values


def _speed(values: np.ndarray) -> np.ndarray:
    return values


def ch_step(u: GridFunction, dt: float) -> GridFunction:
    return field_step(u, dt, _rate, _speed)


def ch_evolve(u0: GridFunction, t_end: float, dt: float = 1e-3, store_every: int = 1) -> FieldTrajectory:
    return evolve_field(u0, t_end, dt, _rate, _speed, store_every=store_every)


def ch_energy(u: GridFunction) -> float:
    """H¹ energy ∫ u² + u_x²"""
    return energy_E(u)


def ch_tangent_rhs(bg: Background, y: Frame) -> Frame:
    u, ux, uxx = bg.u, bg.ux, bg.uxx
    v, vx, w, wx = y
    dx = bg.grid.dx
    vxx = derivative(vx, dx)
    wxx = derivative(wx, dx)
    sym, anti = bg.sym_anti(2 * u * v + ux * vx)

    v_t = -u * vx - v * ux - anti
    vx_t = -u * vxx - ux * vx - v * uxx + 2 * u * v - sym
    w_t = -u * wx + v + ux * w
    wx_t = -u * wxx + vx + uxx * w
    return v_t, vx_t, w_t, wx_t


def ch_evolve_tangent(u_traj: FieldTrajectory, tf0: TangentFrame) -> List[TangentFrame]:
    """Frames along a CH solution; w is carried with speed u"""
    return transport(u_traj, tf0, ch_tangent_rhs, guard=SLOPE_GUARD)


def ch_finsler_cost(u: GridFunction, tf: TangentFrame, weighted: bool = True) -> CostBreakdown:
    tf.check_aligned(u)
    ux = derivative(u.values, u.dx)
    uxx = second_derivative(u.values, u.dx)
    q = 1.0 + ux ** 2
    W = cost_weights(u, weighted)
    return CostBreakdown(
        I1=float(W @ (np.abs(tf.w) * q)),
        I2=float(W @ (np.abs(tf.v + ux * tf.w) * q)),
        I3=float(W @ np.abs(2 * ux * (tf.vx + uxx * tf.w) + ux ** 2 * tf.wx)),
    )


def ch_verify_growth(u_traj: FieldTrajectory, tf_traj: List[TangentFrame]) -> GrowthReport:
    return verify_growth(u_traj, tf_traj, cost=ch_finsler_cost)
