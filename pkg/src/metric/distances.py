"""Path lengths, geodesic upper bounds and the comparison metrics they dominate"""

import logging
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid

from src.core.grid_function import GridFunction, decay_weights, derivative, trapezoid_integral
from src.metric.finsler import Candidate, TangentFrame, carried_shift, finsler_norm_upper

logger = logging.getLogger(__name__)

DEFAULT_N_THETA = 33
# Slack on the C¹ test-function bounds for grid derivatives
C1_TOL = 1e-6

PathPoint = Tuple[GridFunction, TangentFrame]


def path_length(
    path: Sequence[PathPoint],
    w_candidates: Optional[List[Candidate]] = None,
    weighted: bool = True,
) -> float:
    """Trapezoid integral over θ ∈ [0, 1] of the norm of each supplied tangent

    The supplied frame is always a candidate; ``w_candidates`` adds alternatives.
    """
    if len(path) < 3:
        raise ValueError(f"path needs at least 3 theta samples, got {len(path)}")
    extra = w_candidates or []
    norms = [
        finsler_norm_upper(u, u.like(tf.v), [carried_shift(tf)] + extra, weighted=weighted)
        for u, tf in path
    ]
    theta = np.linspace(0.0, 1.0, len(path))
    return float(trapezoid(norms, theta))


def sampled_path(fields: Sequence[GridFunction]) -> List[PathPoint]:
    """Tangents dγ/dθ of uniformly θ-sampled fields by centered differences, w ≡ 0"""
    if len(fields) < 3:
        raise ValueError(f"path needs at least 3 theta samples, got {len(fields)}")
    stack = np.stack([f.values for f in fields])
    dtheta = 1.0 / (len(fields) - 1)
    tangents = np.gradient(stack, dtheta, axis=0, edge_order=2)
    return [(f, TangentFrame.from_fields(f.like(v))) for f, v in zip(fields, tangents)]


def interpolation_path(u: GridFunction, u2: GridFunction, n_theta: int = DEFAULT_N_THETA) -> List[PathPoint]:
    """u^θ = θ u2 + (1 - θ) u with tangent u2 - u and w ≡ 0"""
    if u.n != u2.n:
        raise ValueError("fields must share a grid")
    v = u.like(u2.values - u.values)
    frame = TangentFrame.from_fields(v)
    return [
        (u.like(theta * u2.values + (1 - theta) * u.values), frame)
        for theta in np.linspace(0.0, 1.0, n_theta)
    ]


def geodesic_upper_bound(
    u: GridFunction,
    u2: GridFunction,
    n_theta: int = DEFAULT_N_THETA,
    weighted: bool = True,
) -> float:
    """Length of the straight interpolation path; ``weighted=False`` gives the unweighted d*"""
    return path_length(interpolation_path(u, u2, n_theta), weighted=weighted)


def sobolev_terms(u: GridFunction, u2: GridFunction) -> Dict[str, float]:
    d = u.values - u2.values
    dd = derivative(d, u.dx)
    W = decay_weights(u)
    return {
        "h1": float(np.sqrt(trapezoid_integral(u.like(d ** 2 + dd ** 2)))),
        "weighted_l1": float(W @ np.abs(d)),
        "weighted_slope_l1": float(W @ np.abs(dd)),
        "slope_l4": float(trapezoid_integral(u.like(dd ** 4)) ** 0.25),
    }


def sobolev_comparison(u: GridFunction, u2: GridFunction) -> float:
    """‖u-u2‖_{H¹} + ‖(u-u2)e^{-|x|}‖_{L¹} + ‖(u-u2)_x e^{-|x|}‖_{L¹} + ‖(u-u2)_x‖_{L⁴}"""
    return float(sum(sobolev_terms(u, u2).values()))


def weighted_L1_distance(u: GridFunction, u2: GridFunction) -> float:
    return float(decay_weights(u) @ np.abs(u.values - u2.values))


def kr_discrepancy(u: GridFunction, u2: GridFunction, f: GridFunction) -> float:
    """|∫f(1+u_x²)² - ∫f(1+u2_x²)²| for a test function with ‖f‖_∞, ‖f'‖_∞ ≤ 1"""
    if np.max(np.abs(f.values)) > 1 + C1_TOL or np.max(np.abs(f.derivative().values)) > 1 + C1_TOL:
        raise ValueError("test function violates the C1 bound ||f|| <= 1, ||f'|| <= 1")
    density = (1 + derivative(u.values, u.dx) ** 2) ** 2
    density2 = (1 + derivative(u2.values, u2.dx) ** 2) ** 2
    return abs(trapezoid_integral(u.like(f.values * (density - density2))))


TEST_FUNCTIONS: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "one": np.ones_like,
    "sin": np.sin,
    "cos": np.cos,
    "tanh": np.tanh,
    "sech": lambda x: 1.0 / np.cosh(x),
}


def kr_lower_bound(u: GridFunction, u2: GridFunction) -> float:
    """Largest discrepancy over a fixed family of admissible test functions"""
    return max(kr_discrepancy(u, u2, u.like(fn(u.x))) for fn in TEST_FUNCTIONS.values())


def gaussian(grid: GridFunction, amp: float, width: float, center: float) -> GridFunction:
    return grid.like(amp * np.exp(-(((grid.x - center) / width) ** 2)))


def gaussian_pair_family(
    grid: GridFunction,
    n_pairs: int,
    seed: int,
    amp: Tuple[float, float] = (0.2, 0.8),
    width: Tuple[float, float] = (1.0, 2.0),
    center: Tuple[float, float] = (-1.0, 1.0),
) -> List[Tuple[GridFunction, GridFunction]]:
    """Seeded random pairs of Gaussians, moderate enough to keep |u_x| < 1"""
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(n_pairs):
        params = rng.uniform([amp[0], width[0], center[0]] * 2, [amp[1], width[1], center[1]] * 2)
        pairs.append((gaussian(grid, *params[:3]), gaussian(grid, *params[3:])))
    return pairs


def comparison_table(
    pairs: Sequence[Tuple[GridFunction, GridFunction]],
    n_theta: int = DEFAULT_N_THETA,
) -> pd.DataFrame:
    """Columns ``pair_id,upper_bound,sobolev_rhs,weighted_l1,kr`` plus the unweighted bound d*"""
    rows = []
    for pair_id, (u, u2) in enumerate(pairs):
        rows.append(
            {
                "pair_id": pair_id,
                "upper_bound": geodesic_upper_bound(u, u2, n_theta),
                "sobolev_rhs": sobolev_comparison(u, u2),
                "weighted_l1": weighted_L1_distance(u, u2),
                "kr": kr_lower_bound(u, u2),
                "unweighted_bound": geodesic_upper_bound(u, u2, n_theta, weighted=False),
            }
        )
        logger.debug("pair %d: %s", pair_id, rows[-1])
    return pd.DataFrame(rows)


def comparison_ratios(table: pd.DataFrame) -> Dict[str, float]:
    """Smallest constants C valid over the whole family"""
    return {
        "sobolev": float((table["upper_bound"] / table["sobolev_rhs"]).max()),
        "weighted_l1": float((table["weighted_l1"] / table["upper_bound"]).max()),
        "kr": float((table["kr"] / table["unweighted_bound"]).max()),
    }
