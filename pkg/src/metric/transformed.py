"""Tangent vectors and their cost in characteristic coordinates

A perturbation (x, u, α, ξ) + ε(X, U, A, ζ) with the labels Y held fixed.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from src.characteristic.transform import CharState
from src.core.grid_function import GridFunction, derivative, second_derivative
from src.errors import NonFiniteInputError
from src.metric.finsler import TangentFrame


@dataclass(frozen=True, eq=False)
class CharTangent:
    X: np.ndarray
    U: np.ndarray
    A: np.ndarray
    zeta: np.ndarray

    def __post_init__(self):
        for name in ("X", "U", "A", "zeta"):
            arr = np.asarray(getattr(self, name), dtype=float)
            object.__setattr__(self, name, arr)
            if not np.all(np.isfinite(arr)):
                raise NonFiniteInputError(f"char tangent {name}")

    @classmethod
    def zeros(cls, n: int) -> "CharTangent":
        z = np.zeros(n)
        return cls(z, z, z, z)


def char_cost(s: CharState, ct: CharTangent) -> float:
    """Σ∫|J_ℓ| dY with J = (Xξ, Uξ, ½Aξ, ζ) e^{-|x|}"""
    if any(getattr(ct, name).shape != (s.n,) for name in ("X", "U", "A", "zeta")):
        raise ValueError("char tangent is not aligned with the state")
    weight = np.exp(-np.abs(s.x))
    integrand = (np.abs(ct.X) + np.abs(ct.U) + 0.5 * np.abs(ct.A)) * s.xi * weight + np.abs(ct.zeta) * weight
    return float(trapezoid(integrand, s.Y))


def frame_to_char_tangent(s: CharState, u: GridFunction, tf: TangentFrame) -> CharTangent:
    """Map an x-space tangent of u to characteristic coordinates (identity relabeling)

    X = w, U = v + u_x w, A = 2cos²(α/2)(v_x + u_xx w) and ζ carries the
    base-measure change times x_Y = ξcos⁴(α/2).
    """
    tf.check_aligned(u)
    ux = derivative(u.values, u.dx)
    uxx = second_derivative(u.values, u.dx)

    def at_chars(values: np.ndarray) -> np.ndarray:
        return np.interp(s.x, u.x, values)

    v, vx, w, wx = (at_chars(f) for f in (tf.v, tf.vx, tf.w, tf.wx))
    ux_c, uxx_c = at_chars(ux), at_chars(uxx)
    cos2 = np.cos(s.alpha / 2) ** 2
    slope_change = vx + uxx_c * w
    measure_change = 4 * (ux_c + ux_c ** 3) * slope_change + (1 + ux_c ** 2) ** 2 * wx
    return CharTangent(
        X=w,
        U=v + ux_c * w,
        A=2 * cos2 * slope_change,
        zeta=measure_change * s.xi * cos2 ** 2,
    )
