"""Conserved energies, a-priori bounds and energy concentration at collisions

    E = ∫ u² + u_x² dx,    F = ∫ u⁴ + 2u²u_x² - ⅓u_x⁴ dx,    K = √(3E(2E² - F))

In characteristic coordinates the densities become

    E:  (u²cos²(α/2) + sin²(α/2)) ξ cos²(α/2)
    F:  (u⁴cos⁴(α/2) + 2u²cos²(α/2)sin²(α/2) - ⅓sin⁴(α/2)) ξ
    L:  sin⁴(α/2) ξ          (the u_x⁴ part, which may concentrate)
"""

import logging
from typing import List, NamedTuple, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field
from scipy.integrate import cumulative_trapezoid

from src.characteristic.semilinear_solver import SingularEvent, singular_time
from src.characteristic.transform import CharState
from src.core.grid_function import GridFunction, derivative, trapezoid_integral
from src.errors import EnergyInconsistencyError, NoCollisionError
from src.smooth.novikov_solver import novikov_sources

logger = logging.getLogger(__name__)

E_VANISH_FRACTION = 0.02
L_POSITIVE_FRACTION = 0.05
# Relative slack for bound checks evaluated by quadrature
BOUND_SLACK = 1e-9


def energy_E(u: GridFunction) -> float:
    ux = derivative(u.values, u.dx)
    return trapezoid_integral(u.like(u.values ** 2 + ux ** 2))


def energy_F(u: GridFunction) -> float:
    ux = derivative(u.values, u.dx)
    v = u.values
    return trapezoid_integral(u.like(v ** 4 + 2 * v ** 2 * ux ** 2 - ux ** 4 / 3))


def k_constant(E: float, F: float) -> float:
    discriminant = 2 * E * E - F
    if discriminant < -BOUND_SLACK * max(1.0, 2 * E * E):
        raise EnergyInconsistencyError(E, F)
    return float(np.sqrt(3 * E * max(discriminant, 0.0)))


# Characteristic-coordinate densities


class WindowEnergies(NamedTuple):
    E_win: float
    F_win: float
    L_win: float


def _densities(s: CharState):
    cos2 = np.cos(s.alpha / 2) ** 2
    sin2 = np.sin(s.alpha / 2) ** 2
    u = s.u
    e = (u ** 2 * cos2 + sin2) * s.xi * cos2
    f = (u ** 4 * cos2 ** 2 + 2 * u ** 2 * cos2 * sin2 - sin2 ** 2 / 3) * s.xi
    l = sin2 ** 2 * s.xi
    return e, f, l


def _window_integral(s: CharState, density: np.ndarray, Y1: float, Y2: float) -> float:
    running = cumulative_trapezoid(density, s.Y, initial=0.0)
    Y = s.Y
    return float(np.interp(Y2, Y, running) - np.interp(Y1, Y, running))


def char_energy(s: CharState, Y1: float, Y2: float) -> WindowEnergies:
    """E, F and L between the characteristics labelled Y1 < Y2"""
    Y = s.Y
    if not (Y[0] <= Y1 < Y2 <= Y[-1]):
        raise ValueError(f"window [{Y1}, {Y2}] is not inside the grid [{Y[0]}, {Y[-1]}]")
    return WindowEnergies(*(_window_integral(s, d, Y1, Y2) for d in _densities(s)))


def char_totals(s: CharState) -> WindowEnergies:
    """The three integrals over the whole Y-grid"""
    Y = s.Y
    return char_energy(s, float(Y[0]), float(Y[-1]))


def energy_time_series(traj: Sequence[CharState], Y1: float, Y2: float) -> pd.DataFrame:
    """Rows ``t,E,F,E_win,F_win,L_win``"""
    rows = []
    for s in traj:
        total = char_totals(s)
        window = char_energy(s, Y1, Y2)
        rows.append(
            {"t": s.t, "E": total.E_win, "F": total.F_win,
             "E_win": window.E_win, "F_win": window.F_win, "L_win": window.L_win}
        )
    return pd.DataFrame(rows, columns=["t", "E", "F", "E_win", "F_win", "L_win"])


# A-priori bounds


class BoundCheck(BaseModel):
    name: str
    value: float
    bound: float
    passed: bool
    margin: float = Field(description="bound - value")


class BoundReport(BaseModel):
    E: float
    F: float
    K: float
    checks: List[BoundCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def _check(name: str, value: float, bound: float) -> BoundCheck:
    ok = value <= bound * (1 + BOUND_SLACK) + BOUND_SLACK
    return BoundCheck(name=name, value=value, bound=bound, passed=ok, margin=bound - value)


def apriori_bounds(u: GridFunction) -> BoundReport:
    """‖u_x‖³_{L³} ≤ K and the sup and L² bounds on P1, ∂xP1, P2, ∂xP2"""
    E, F = energy_E(u), energy_F(u)
    K = k_constant(E, F)
    ux = derivative(u.values, u.dx)
    src = novikov_sources(u)

    def l2(f: GridFunction) -> float:
        return float(np.sqrt(trapezoid_integral(f.like(f.values ** 2))))

    p1_sup, p2_sup = 0.75 * E ** 1.5, 0.25 * K
    p1_l2, p2_l2 = 1.5 / np.sqrt(2) * E ** 1.5, K / (2 * np.sqrt(2))
    checks = [_check("ux_L3_cubed", trapezoid_integral(u.like(np.abs(ux) ** 3)), K)]
    for name, field in (("P1", src.P1), ("dxP1", src.dxP1)):
        checks.append(_check(f"{name}_sup", field.sup_norm(), p1_sup))
        checks.append(_check(f"{name}_L2", l2(field), p1_l2))
    for name, field in (("P2", src.P2), ("dxP2", src.dxP2)):
        checks.append(_check(f"{name}_sup", field.sup_norm(), p2_sup))
        checks.append(_check(f"{name}_L2", l2(field), p2_l2))
    report = BoundReport(E=E, F=F, K=K, checks=checks)
    if not report.passed:
        failed = [c.name for c in checks if not c.passed]
        logger.warning("a-priori bounds violated: %s", ", ".join(failed))
    return report


# Concentration


class WindowReport(BaseModel):
    Y1: float
    Y2: float
    E_win: float
    F_win: float
    L_win: float = Field(ge=0)


class EnergyReport(BaseModel):
    t: float
    E_total: float = Field(ge=0)
    F_total: float
    window: Optional[WindowReport] = None
    E_vanishes: bool = False
    L_positive: bool = False
    # ∫u_x⁴ dx lost by the absolutely continuous part at t*, and its outside-window share as t → t*⁻
    w14_jump: Optional[float] = None
    L_outside: Optional[float] = None
    events: List[dict] = Field(default_factory=list)


def _u_x4_from_below(traj: Sequence[CharState], t_star: float, Y1: float, Y2: float) -> Optional[np.ndarray]:
    """(outside-window, total) ∫u_x⁴ dx extrapolated to t* from the last two slices before it"""
    before = [s for s in traj if s.t < t_star][-2:]
    if not before:
        return None
    rows = []
    for s in before:
        total = char_totals(s).L_win
        rows.append((total - char_energy(s, Y1, Y2).L_win, total))
    values = np.array(rows)
    if len(before) == 1:
        return values[0]
    rate = (values[1] - values[0]) / (before[1].t - before[0].t)
    return values[1] + (t_star - before[1].t) * rate


def concentration_report(
    traj: Sequence[CharState],
    events: Sequence[SingularEvent],
    Y1: float,
    Y2: float,
    t_star: Optional[float] = None,
) -> EnergyReport:
    """Window energies at the slice nearest t*, the first crossing (or touch)

    At t* the window's u_x⁴ mass leaves the graph: only the outside part is still
    ∫u_x⁴ dx of a function, so the W^{1,4} norm drops by about L_win.
    """
    if not events:
        raise NoCollisionError()
    t_star = singular_time(events) if t_star is None else t_star
    times = np.array([s.t for s in traj])
    at = traj[int(np.argmin(np.abs(times - t_star)))]
    total = char_totals(at)
    window = char_energy(at, Y1, Y2)
    F_scale = char_totals(traj[0]).F_win
    below = _u_x4_from_below(traj, t_star, Y1, Y2)
    w14_jump = L_outside = None
    if below is not None:
        L_outside = float(below[0])
        w14_jump = float(below[1] - (total.L_win - window.L_win))

    report = EnergyReport(
        t=at.t,
        E_total=max(total.E_win, 0.0),
        F_total=total.F_win,
        window=WindowReport(Y1=Y1, Y2=Y2, E_win=window.E_win, F_win=window.F_win, L_win=max(window.L_win, 0.0)),
        E_vanishes=window.E_win < E_VANISH_FRACTION * total.E_win,
        L_positive=window.L_win > L_POSITIVE_FRACTION * F_scale,
        w14_jump=w14_jump,
        L_outside=L_outside,
        events=[e.to_dict() for e in ([e for e in events if e.t == t_star][:1] or events[:1])],
    )
    logger.info(
        "concentration at t=%.6f: E_win/E=%.3e, L_win=%.4f (E_vanishes=%s, L_positive=%s)",
        at.t, window.E_win / total.E_win if total.E_win > 0 else 0.0,
        window.L_win, report.E_vanishes, report.L_positive,
    )
    return report
