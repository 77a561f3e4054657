"""Uniformly sampled real functions on a truncated line"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Any, Union

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid

from src.errors import NonFiniteInputError

MIN_SAMPLES = 8


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples of a function on [x0, x0 + (n-1) dx], taken to be zero outside"""

    x0: float
    dx: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if not self.dx > 0:
            raise ValueError(f"grid spacing must be positive, got {self.dx}")
        if values.ndim != 1 or values.size < MIN_SAMPLES:
            raise ValueError(f"need a 1-d array of at least {MIN_SAMPLES} samples")
        if not np.all(np.isfinite(values)):
            raise NonFiniteInputError()

    @classmethod
    def on_interval(cls, L: float, n: int, fn: Callable[[np.ndarray], np.ndarray]) -> "GridFunction":
        """Sample ``fn`` on n nodes spanning [-L, L]"""
        x = np.linspace(-L, L, n)
        return cls(x0=-L, dx=x[1] - x[0], values=fn(x))

    @classmethod
    def zeros(cls, L: float, n: int) -> "GridFunction":
        return cls.on_interval(L, n, np.zeros_like)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.n)

    @property
    def x_end(self) -> float:
        return self.x0 + self.dx * (self.n - 1)

    def like(self, values: np.ndarray) -> "GridFunction":
        """Same grid, new samples"""
        return GridFunction(self.x0, self.dx, values)

    def derivative(self) -> "GridFunction":
        return self.like(derivative(self.values, self.dx))

    def second_derivative(self) -> "GridFunction":
        return self.like(second_derivative(self.values, self.dx))

    def integral(self) -> float:
        return trapezoid_integral(self)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    # Serialization

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"x": self.x, "value": self.values})

    def to_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(path, index=False, float_format="%.17g")
        return path

    def to_dict(self) -> Dict[str, Any]:
        return {"x0": self.x0, "dx": self.dx, "values": self.values.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "GridFunction":
        return cls(x0=float(data["x0"]), dx=float(data["dx"]), values=np.asarray(data["values"], dtype=float))

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "GridFunction":
        frame = pd.read_csv(path, float_precision="round_trip")
        x = frame["x"].to_numpy()
        return cls(x0=float(x[0]), dx=float(x[1] - x[0]), values=frame["value"].to_numpy())


def derivative(values: np.ndarray, dx: float) -> np.ndarray:
    """Centered second-order differences, one-sided second-order at the ends"""
    return np.gradient(values, dx, edge_order=2)


def second_derivative(values: np.ndarray, dx: float) -> np.ndarray:
    # D(D f) keeps v_x + u_xx w = 0 exact for frames built with the same operator
    return derivative(derivative(values, dx), dx)


def trapezoid_weights(n: int) -> np.ndarray:
    w = np.ones(n)
    w[0] = w[-1] = 0.5
    return w


def trapezoid_integral(f: GridFunction) -> float:
    """Composite trapezoid rule over the grid support"""
    if not np.all(np.isfinite(f.values)):
        raise NonFiniteInputError()
    return float(trapezoid(f.values, dx=f.dx))


def sample_linear(f: GridFunction, x: float) -> float:
    """Linear interpolation inside the support, zero outside"""
    return float(np.interp(x, f.x, f.values, left=0.0, right=0.0))


def decay_weights(f: GridFunction) -> np.ndarray:
    """Product-trapezoid weights W with Σ W_k g_k = ∫ g e^{-|x|} dx exactly for piecewise-linear g"""
    x = f.x
    a, b = x[:-1], x[1:]
    h = f.dx
    split = np.clip(0.0, a, b)

    def moments(lo, hi, sign):
        # ∫ e^{sign·x} and ∫ (x - a) e^{sign·x} over [lo, hi]
        e_lo, e_hi = np.exp(sign * lo), np.exp(sign * hi)
        m0 = (e_hi - e_lo) * sign
        m1 = ((hi - a) * e_hi - (lo - a) * e_lo) * sign - (e_hi - e_lo)
        return m0, m1

    m0_neg, m1_neg = moments(a, split, 1.0)
    m0_pos, m1_pos = moments(split, b, -1.0)
    m0, m1 = m0_neg + m0_pos, m1_neg + m1_pos
    weights = np.zeros(f.n)
    weights[:-1] += m0 - m1 / h
    weights[1:] += m1 / h
    return weights
