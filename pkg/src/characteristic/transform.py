"""Characteristic coordinates: initial data to (Y; x, u, α, ξ) and back to x-space graphs

The label Y(x) = ∫₀^x (1 + u0_x²)² dx' is constant along the characteristics
dx/dt = u², and the unknowns are α = 2 arctan u_x and ξ = (1 + u_x²)² / Y_x.

Kinks of the initial datum (peakon tips) sit on the uniform label grid as a pair
of nodes with one label: the left and the right limit. Every Y-quadrature then
sees only smooth integrands between nodes.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Any, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import CubicSpline, PchipInterpolator

from src.core.grid_function import GridFunction, MIN_SAMPLES
from src.core.profile import Profile
from src.errors import NonFiniteInputError, XiPositivityError

logger = logging.getLogger(__name__)

# Graph nodes closer than this (relative to dY) count as one collapsed point
COLLAPSE_TOL = 1e-8
GAUSS_POINTS = 6
NEWTON_MAX_ITER = 50
NEWTON_TOL = 1e-13
# Kink labels within this fraction of a cell from a node are placed on it
ALIGN_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class CharState:
    """(x, u, α, ξ) on the uniform Lagrangian grid Y_k = Y0 + k dY at time t

    Each index in ``breaks`` repeats the label of the node before it; the two nodes
    carry the left and right limits across a kink.
    """

    t: float
    Y0: float
    dY: float
    x: np.ndarray
    u: np.ndarray
    alpha: np.ndarray
    xi: np.ndarray
    breaks: Tuple[int, ...] = ()

    def __post_init__(self):
        arrays = {}
        for name in ("x", "u", "alpha", "xi"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arr)
            arrays[name] = arr
        n = self.x.size
        if n < MIN_SAMPLES or any(a.shape != (n,) for a in arrays.values()):
            raise ValueError(f"x, u, alpha, xi must be 1-d of equal length >= {MIN_SAMPLES}")
        if not self.dY > 0:
            raise ValueError(f"dY must be positive, got {self.dY}")
        breaks = tuple(int(k) for k in self.breaks)
        object.__setattr__(self, "breaks", breaks)
        if any(not 0 < k < n for k in breaks) or any(b - a < 2 for a, b in zip(breaks, breaks[1:])):
            raise ValueError(f"breaks must be increasing node indices in [1, {n}) at least two apart")
        if not all(np.all(np.isfinite(a)) for a in arrays.values()):
            raise NonFiniteInputError("characteristic state")
        if np.min(self.xi) <= 0:
            raise XiPositivityError(float(np.min(self.xi)))

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def Y(self) -> np.ndarray:
        repeated = np.zeros(self.n, dtype=int)
        repeated[list(self.breaks)] = 1
        return self.Y0 + self.dY * (np.arange(self.n) - np.cumsum(repeated))

    @property
    def weights(self) -> np.ndarray:
        """Trapezoid weights in Y; a kink pair splits one node weight between its sides"""
        h = np.diff(self.Y)
        w = np.zeros(self.n)
        w[:-1] += 0.5 * h
        w[1:] += 0.5 * h
        return w

    @property
    def center_index(self) -> int:
        """Node tracking the characteristic labelled Y = 0"""
        return int(np.argmin(np.abs(self.Y)))

    def replace(self, **changes) -> "CharState":
        fields = {name: getattr(self, name) for name in ("t", "Y0", "dY", "x", "u", "alpha", "xi", "breaks")}
        fields.update(changes)
        return CharState(**fields)

    @classmethod
    def zeros(cls, Y_half_width: float, n: int, t: float = 0.0) -> "CharState":
        Y = np.linspace(-Y_half_width, Y_half_width, n)
        zero = np.zeros(n)
        return cls(t=t, Y0=Y[0], dY=Y[1] - Y[0], x=Y.copy(), u=zero, alpha=zero, xi=np.ones(n))

    # Serialization

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"Y": self.Y, "x": self.x, "u": self.u, "alpha": self.alpha, "xi": self.xi})

    def to_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(path, index=False, float_format="%.17g")
        return path

    def to_dict(self) -> Dict[str, Any]:
        return {
            "t": self.t,
            "Y0": self.Y0,
            "dY": self.dY,
            "breaks": list(self.breaks),
            "x": self.x.tolist(),
            "u": self.u.tolist(),
            "alpha": self.alpha.tolist(),
            "xi": self.xi.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CharState":
        fields = {k: data[k] for k in ("t", "Y0", "dY", "x", "u", "alpha", "xi")}
        return cls(**fields, breaks=tuple(data.get("breaks", ())))


def grid_profile(u0: GridFunction) -> Profile:
    """Cubic-spline (u, u_x) of grid data, u_x from centered differences"""
    x = u0.x
    spline_u = CubicSpline(x, u0.values)
    spline_ux = CubicSpline(x, u0.derivative().values)
    return Profile(lambda z, _side: (spline_u(z), spline_ux(z)))


def _density_integral(profile: Profile, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Gauss-Legendre ∫_a^b (1 + u_x²)² for intervals free of kinks in their interior"""
    nodes, weights = np.polynomial.legendre.leggauss(GAUSS_POINTS)
    half = 0.5 * (b - a)
    z = (0.5 * (a + b))[..., None] + half[..., None] * nodes
    _, ux = profile(z)
    return half * (((1.0 + ux ** 2) ** 2) @ weights)


class LabelMap:
    """Y(x) with Y(0) = 0 on the span of ``nodes``, integrated piecewise between nodes and kinks"""

    def __init__(self, profile: Profile, nodes: np.ndarray):
        self.profile = profile
        lo, hi = float(nodes[0]), float(nodes[-1])
        self.kinks = np.array([k for k in profile.kinks if lo < k < hi], dtype=float)
        self.breaks = np.union1d(nodes, self.kinks)
        pieces = _density_integral(profile, self.breaks[:-1], self.breaks[1:])
        running = np.concatenate(([0.0], np.cumsum(pieces)))
        if np.any(np.diff(running) <= 0):
            raise RuntimeError("cumulative characteristic label is not strictly increasing")
        self._running = running
        self._offset = 0.0
        self._offset = float(self(np.array([np.clip(0.0, lo, hi)]))[0])
        self.at_breaks = running - self._offset

    def _piece(self, x: np.ndarray) -> np.ndarray:
        return np.clip(np.searchsorted(self.breaks, x, side="right") - 1, 0, self.breaks.size - 2)

    def __call__(self, x) -> np.ndarray:
        x = np.clip(np.asarray(x, dtype=float), self.breaks[0], self.breaks[-1])
        i = self._piece(x)
        return self._running[i] + _density_integral(self.profile, self.breaks[i], x) - self._offset

    def invert(self, labels) -> np.ndarray:
        """x with Y(x) = label by Newton iteration kept inside each bracketing piece"""
        labels = np.asarray(labels, dtype=float)
        i = np.clip(np.searchsorted(self.at_breaks, labels, side="right") - 1, 0, self.breaks.size - 2)
        a, b = self.breaks[i], self.breaks[i + 1]
        ya, yb = self.at_breaks[i], self.at_breaks[i + 1]
        x = np.clip(a + (labels - ya) / (yb - ya) * (b - a), a, b)
        for _ in range(NEWTON_MAX_ITER):
            residual = ya + _density_integral(self.profile, a, x) - labels
            # the right limit is the in-piece slope at a kink on the left end
            _, ux = self.profile(x, 1.0)
            step = residual / (1.0 + ux ** 2) ** 2
            x = np.clip(x - step, a, b)
            if np.max(np.abs(step), initial=0.0) <= NEWTON_TOL:
                break
        return x


def label_map(u0: GridFunction, profile: Optional[Profile] = None) -> Tuple[np.ndarray, np.ndarray]:
    """(x nodes, Y(x)) with Y(0) = 0"""
    labels = LabelMap(profile or grid_profile(u0), u0.x)
    return u0.x, labels(u0.x)


def window_labels(u0: GridFunction, points: Sequence[float], profile: Optional[Profile] = None) -> np.ndarray:
    """Lagrangian labels Y(0, x) of the given points"""
    return LabelMap(profile or grid_profile(u0), u0.x)(points)


def _label_grid(lo: float, hi: float, tips: np.ndarray, n: int) -> Tuple[float, float, int]:
    """(Y0, dY, distinct labels) inside [lo, hi] with the first and last kink label on nodes"""
    if tips.size == 0:
        return lo, (hi - lo) / (n - 1), n
    m = n - tips.size
    nominal = (hi - lo) / m
    span = float(tips[-1] - tips[0])
    dY = span / np.ceil(span / nominal) if span > 0 else nominal
    Y0 = tips[0] - np.floor((tips[0] - lo) / dY) * dY
    return float(Y0), float(dY), m


def to_characteristic(u0: GridFunction, profile: Optional[Profile] = None) -> CharState:
    """Initial data in characteristic coordinates; ``profile`` supplies exact (u, u_x) if known"""
    profile = profile or grid_profile(u0)
    labels = LabelMap(profile, u0.x)
    tips = labels(labels.kinks)
    Y0, dY, m = _label_grid(float(labels.at_breaks[0]), float(labels.at_breaks[-1]), tips, u0.n)
    offsets = (tips - Y0) / dY
    tip_nodes = np.rint(offsets).astype(int)
    aligned = (np.abs(offsets - tip_nodes) < ALIGN_TOL) & (tip_nodes >= 0) & (tip_nodes < m)
    if not np.all(aligned):
        logger.warning("%d kink(s) fall between label nodes and are smoothed", int(np.sum(~aligned)))
    x = labels.invert(Y0 + dY * np.arange(m))
    x[tip_nodes[aligned]] = labels.kinks[aligned]
    take = np.sort(np.concatenate((np.arange(m), tip_nodes[aligned])))
    breaks = np.flatnonzero(np.diff(take) == 0) + 1
    side = np.zeros(take.size)
    side[breaks - 1] = -1.0
    side[breaks] = 1.0
    xs = x[take]
    u, ux = profile(xs, side)
    return CharState(
        t=0.0,
        Y0=Y0,
        dY=dY,
        x=xs,
        u=u,
        alpha=2.0 * np.arctan(ux),
        xi=np.ones(take.size),
        breaks=tuple(int(k) for k in breaks),
    )


def x_of_Y(s: CharState) -> np.ndarray:
    """Reintegrate x_Y = ξ cos⁴(α/2), anchored at the tracked center characteristic"""
    slope = s.xi * np.cos(s.alpha / 2) ** 4
    c = cumulative_trapezoid(slope, s.Y, initial=0.0)
    k = s.center_index
    return c - c[k] + s.x[k]


def graph_to_x(s: CharState, grid: GridFunction) -> GridFunction:
    """Sample the parametric graph {(x(Y), u(Y))} on an x-grid; zero outside its span"""
    x, u = s.x, s.u
    # Collapsed characteristics share one x and (since u_Y = 0 there) one u
    previous_max = np.concatenate(([-np.inf], np.maximum.accumulate(x)[:-1]))
    keep = x > previous_max + COLLAPSE_TOL * s.dY
    x, u = x[keep], u[keep]
    if x.size < 4:
        return grid.like(np.where(np.abs(grid.x - x[0]) <= grid.dx, u[0], 0.0))
    collapsed = keep.size != x.size
    interpolant = PchipInterpolator(x, u) if collapsed else CubicSpline(x, u)
    values = np.zeros(grid.n)
    inside = (grid.x >= x[0]) & (grid.x <= x[-1])
    values[inside] = interpolant(grid.x[inside])
    return grid.like(values)
