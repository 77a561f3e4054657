"""Semi-linear system in (t, Y) coordinates

    u_t = -∂xP1 - P2
    α_t = -u sin²(α/2) + 2u³cos²(α/2) - 2cos²(α/2)(P1 + ∂xP2)
    ξ_t = ξ[(2u³ + u) - 2(P1 + ∂xP2)] sin α
    x_t = u²

with the nonlocal sources written as Y-integrals against e^{-|c(Y) - c(Ȳ)|},
c(Y) = ∫₀^Y ξcos⁴(α/2). The system stays regular through wave breaking.
"""

import logging
import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import cumulative_trapezoid

from src.characteristic.transform import CharState, x_of_Y
from src.core.kernels import kernel_pair
from src.core.rk4 import n_steps, rk4_step
from src.errors import BlowupError, NonFiniteInputError, PicardStalledError, XiPositivityError

logger = logging.getLogger(__name__)

X_DRIFT_TOL = 1e-4
SINGULAR_EPS = 1e-4


class XDriftWarning(RuntimeWarning):
    """Evolved x and reintegrated x_Y = ξcos⁴(α/2) disagree"""


@dataclass
class SourceTerms:
    P1: np.ndarray
    dxP1: np.ndarray
    P2: np.ndarray
    dxP2: np.ndarray

    def check_bounds(self, E: float, K: float, slack: float = 1e-9) -> Dict[str, Tuple[float, float, bool]]:
        """A-priori sup bounds: |P1|, |∂xP1| ≤ ¾E^{3/2}; |P2|, |∂xP2| ≤ K/4"""
        p1_bound = 0.75 * E ** 1.5
        p2_bound = 0.25 * K
        checks = {}
        for name, values, bound in (
            ("P1", self.P1, p1_bound),
            ("dxP1", self.dxP1, p1_bound),
            ("P2", self.P2, p2_bound),
            ("dxP2", self.dxP2, p2_bound),
        ):
            sup = float(np.max(np.abs(values)))
            checks[name] = (sup, bound, sup <= bound * (1 + slack) + slack)
        return checks


def _sources(u: np.ndarray, alpha: np.ndarray, xi: np.ndarray, Y: np.ndarray) -> SourceTerms:
    if np.min(xi) <= 0:
        raise XiPositivityError(float(np.min(xi)))
    cos2 = np.cos(alpha / 2) ** 2
    sin2 = np.sin(alpha / 2) ** 2
    c = cumulative_trapezoid(xi * cos2 ** 2, Y, initial=0.0)
    h = 0.5 * np.diff(Y)
    below = np.concatenate(([0.0], h))
    above = np.concatenate((h, [0.0]))
    weights = below + above

    g1 = (0.375 * u * np.sin(alpha) ** 2 + u ** 3 * cos2 ** 2) * xi
    g2 = xi * np.sin(alpha) * sin2
    P1, dxP1 = kernel_pair(c, g1 * weights)
    sym2, anti2 = kernel_pair(c, g2 * weights)
    # A node's own half cells sit on opposite sides of the kernel's sign change;
    # they cancel on a uniform stretch but not at a kink pair or the grid ends.
    own = 0.5 * (above - below)
    dxP1 = dxP1 + own * g1
    anti2 = anti2 + own * g2
    # kernel_pair carries ½; the P2 integrals carry 1/8
    return SourceTerms(P1=P1, dxP1=dxP1, P2=0.25 * sym2, dxP2=0.25 * anti2)


def nonlocal_sources(s: CharState) -> SourceTerms:
    """P1, ∂xP1, P2, ∂xP2 on the Y-grid in O(n)"""
    return _sources(s.u, s.alpha, s.xi, s.Y)


def _rhs(y: Tuple[np.ndarray, ...], Y: np.ndarray) -> Tuple[np.ndarray, ...]:
    _x, u, alpha, xi = y
    src = _sources(u, alpha, xi, Y)
    cos2 = np.cos(alpha / 2) ** 2
    sin2 = np.sin(alpha / 2) ** 2
    forcing = src.P1 + src.dxP2
    x_t = u ** 2
    u_t = -src.dxP1 - src.P2
    alpha_t = -u * sin2 + 2 * u ** 3 * cos2 - 2 * cos2 * forcing
    xi_t = xi * ((2 * u ** 3 + u) - 2 * forcing) * np.sin(alpha)
    return x_t, u_t, alpha_t, xi_t


def char_rhs(s: CharState) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Time derivatives (x_t, u_t, α_t, ξ_t)"""
    return _rhs((s.x, s.u, s.alpha, s.xi), s.Y)


def step_rk4(s: CharState, dt: float) -> CharState:
    """One classical RK4 step of the semi-linear system"""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    Y = s.Y
    x, u, alpha, xi = rk4_step(lambda _t, y: _rhs(y, Y), s.t, (s.x, s.u, s.alpha, s.xi), dt)
    if np.min(xi) <= 0:
        raise XiPositivityError(float(np.min(xi)))
    new = s.replace(t=s.t + dt, x=x, u=u, alpha=alpha, xi=xi)
    drift = float(np.max(np.abs(x - x_of_Y(new))))
    logger.debug("t=%.6f x drift %.3e", new.t, drift)
    if drift > X_DRIFT_TOL:
        warnings.warn("evolved x drifts from reintegrated x_Y", XDriftWarning, stacklevel=2)
    return new


@dataclass
class SingularEvent:
    t: float
    Y: float
    kind: str  # "crossing" or "touch"

    def to_dict(self) -> dict:
        return {"t": self.t, "Y": self.Y, "kind": self.kind}


class SingularityMonitor:
    """First time each Y-node's unwrapped α crosses an odd multiple of π

    A node whose α comes within ``eps`` of such a level (in cos²(α/2)) without a
    crossing step is reported once as a touch; a later crossing is still reported.
    """

    def __init__(self, eps: float = SINGULAR_EPS):
        self.eps = eps
        self._crossed: Dict[int, SingularEvent] = {}
        self._touched: Dict[int, SingularEvent] = {}

    @staticmethod
    def _branch(alpha: np.ndarray) -> np.ndarray:
        # k with α in [(2k-1)π, (2k+1)π)
        return np.floor((alpha / np.pi + 1.0) / 2.0).astype(int)

    def start(self, s: CharState) -> List[SingularEvent]:
        return self._touches(s, np.ones(s.n, dtype=bool))

    def _touches(self, s: CharState, candidates: np.ndarray) -> List[SingularEvent]:
        touching = candidates & (np.cos(s.alpha / 2) ** 2 < self.eps)
        Y = s.Y
        found = []
        for j in np.flatnonzero(touching):
            if j not in self._touched:
                self._touched[j] = SingularEvent(float(s.t), float(Y[j]), "touch")
                found.append(self._touched[j])
        return found

    def update(self, prev: CharState, new: CharState) -> List[SingularEvent]:
        """Events first seen between two consecutive slices"""
        k_prev, k_new = self._branch(prev.alpha), self._branch(new.alpha)
        crossed = k_prev != k_new
        Y = new.Y
        found = []
        for j in np.flatnonzero(crossed):
            if j in self._crossed:
                continue
            level = np.pi * (2 * max(k_prev[j], k_new[j]) - 1)
            a0, a1 = prev.alpha[j], new.alpha[j]
            tau = (level - a0) / (a1 - a0) if a1 != a0 else 0.0
            t = prev.t + float(np.clip(tau, 0.0, 1.0)) * (new.t - prev.t)
            self._crossed[j] = SingularEvent(float(t), float(Y[j]), "crossing")
            found.append(self._crossed[j])
        found.extend(self._touches(new, ~crossed))
        return found

    @property
    def events(self) -> List[SingularEvent]:
        return sorted([*self._crossed.values(), *self._touched.values()], key=lambda e: (e.t, e.Y))


def singular_time(events: Sequence[SingularEvent]) -> Optional[float]:
    """Earliest crossing, or the earliest touch when α never crosses"""
    crossings = [e.t for e in events if e.kind == "crossing"]
    if crossings:
        return min(crossings)
    return min((e.t for e in events), default=None)


def detect_singularity(traj: List[CharState], eps: float = SINGULAR_EPS) -> List[SingularEvent]:
    """First crossings of α through odd multiples of π per Y-node, earliest first"""
    if not traj:
        return []
    monitor = SingularityMonitor(eps)
    monitor.start(traj[0])
    for prev, new in zip(traj[:-1], traj[1:]):
        monitor.update(prev, new)
    return monitor.events


@dataclass
class CharTrajectory:
    states: List[CharState] = field(default_factory=list)
    events: List[SingularEvent] = field(default_factory=list)

    @property
    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    @property
    def t_star(self) -> Optional[float]:
        return singular_time(self.events)

    def nearest(self, t: float) -> CharState:
        return self.states[int(np.argmin(np.abs(self.times - t)))]


def integrate_characteristics(
    s0: CharState,
    t_end: float,
    dt: float = 1e-3,
    store_every: int = 1,
    eps: float = SINGULAR_EPS,
) -> CharTrajectory:
    """RK4 run storing every ``store_every`` steps

    α is monitored at every step. The slices around the first touch and the first
    crossing are always kept, plus one slice landed on the first crossing time.
    A non-finite step ends the run with the slices so far attached to the error.
    """
    steps = n_steps(s0.t, t_end, dt)
    monitor = SingularityMonitor(eps)
    monitor.start(s0)
    traj = CharTrajectory(states=[s0])
    s = s0
    kinds_seen = {e.kind for e in monitor.events}
    for k in range(1, steps + 1):
        try:
            new = step_rk4(s, dt)
        except NonFiniteInputError as exc:
            raise BlowupError(partial=traj.states, detail=f"non-finite characteristic step at t={s.t:.6f}") from exc
        found = monitor.update(s, new)
        fresh = [e for e in found if e.kind not in kinds_seen]
        if fresh:
            kinds_seen.update(e.kind for e in fresh)
            logger.info("first %s near t=%.6f (%d nodes)", fresh[0].kind, min(e.t for e in fresh), len(fresh))
            if traj.states[-1] is not s:
                traj.states.append(s)
            crossing = min((e.t for e in fresh if e.kind == "crossing"), default=None)
            if crossing is not None and s.t < crossing < new.t:
                traj.states.append(step_rk4(s, crossing - s.t))
            traj.states.append(new)
        elif k % store_every == 0 or k == steps:
            traj.states.append(new)
        s = new
    traj.events = monitor.events
    return traj


@dataclass
class PicardResult:
    state: CharState
    iterations: int
    residuals: List[float]
    slices: List[CharState]


def picard_solve(
    s0: CharState,
    t: float,
    max_iter: int = 50,
    tol: float = 1e-10,
    n_slices: int = 64,
) -> PicardResult:
    """Fixed-point iteration of the integrated system on ``n_slices`` uniform time slices

    Each sweep evaluates the right-hand side at the previous iterate and integrates it
    in time by the trapezoid rule from the initial datum.
    """
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    times = s0.t + np.linspace(0.0, t, n_slices + 1)
    Y = s0.Y
    start = (s0.x, s0.u, s0.alpha, s0.xi)
    iterate = [np.tile(f, (n_slices + 1, 1)) for f in start]
    residuals: List[float] = []

    for it in range(1, max_iter + 1):
        rates = [np.empty_like(f) for f in iterate]
        for m in range(n_slices + 1):
            for rate, value in zip(rates, _rhs(tuple(f[m] for f in iterate), Y)):
                rate[m] = value
        updated = [
            f0[None, :] + cumulative_trapezoid(rate, times, axis=0, initial=0.0)
            for f0, rate in zip(start, rates)
        ]
        # x is slaved to u and not part of the stopping rule
        residual = max(float(np.max(np.abs(new - old))) for new, old in zip(updated[1:], iterate[1:]))
        residuals.append(residual)
        iterate = updated
        logger.debug("picard sweep %d residual %.3e", it, residual)
        if np.min(iterate[3]) <= 0:
            raise XiPositivityError(float(np.min(iterate[3])))
        if residual < tol:
            slices = [
                s0.replace(t=float(times[m]), x=iterate[0][m], u=iterate[1][m], alpha=iterate[2][m], xi=iterate[3][m])
                for m in range(n_slices + 1)
            ]
            return PicardResult(state=slices[-1], iterations=it, residuals=residuals, slices=slices)
    raise PicardStalledError(residuals)
