"""Exponential-kernel nonlocal operators in O(n)

Both the x-space operators ½∫e^{-|x-y|}f(y)dy and their Y-space analogues with
kernel e^{-|c(Y)-c(Ȳ)|} reduce to the one-sided sums

    lower_k = Σ_{j<k} e^{-(c_k - c_j)} g_j,    upper_k = Σ_{j>k} e^{-(c_j - c_k)} g_j

for a nondecreasing coordinate c and quadrature-weighted samples g.
"""

from typing import Literal, Tuple

import numpy as np

from src.core.grid_function import GridFunction, trapezoid_weights
from src.errors import NonFiniteInputError

# Largest coordinate span rescaled inside one block; e^30 keeps the partial sums far from overflow.
BLOCK_SPAN = 30.0

ConvolutionMode = Literal["symmetric", "antisymmetric"]


def _lower_sums(c: np.ndarray, g: np.ndarray) -> np.ndarray:
    n = c.size
    out = np.empty(n)
    carry = 0.0
    start = 0
    while start < n:
        stop = int(np.searchsorted(c, c[start] + BLOCK_SPAN, side="right"))
        stop = max(stop, start + 1)
        s = c[start:stop] - c[start]
        terms = np.exp(s) * g[start:stop]
        exclusive = np.concatenate(([0.0], np.cumsum(terms)[:-1]))
        out[start:stop] = np.exp(-s) * (carry + exclusive)
        if stop < n:
            carry = np.exp(-(c[stop] - c[stop - 1])) * (out[stop - 1] + g[stop - 1])
        start = stop
    return out


def exponential_sums(c: np.ndarray, g: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Strict lower and upper exponential sums for a nondecreasing coordinate ``c``"""
    c = np.asarray(c, dtype=float)
    g = np.asarray(g, dtype=float)
    if not (np.all(np.isfinite(c)) and np.all(np.isfinite(g))):
        raise NonFiniteInputError("kernel sums")
    lower = _lower_sums(c, g)
    upper = _lower_sums(-c[::-1], g[::-1])[::-1]
    return lower, upper


def kernel_pair(c: np.ndarray, weighted: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """(½Σ e^{-|c_k-c_j|} g_j, ½(Σ_{j>k} - Σ_{j<k}) e^{-|c_k-c_j|} g_j)

    ``weighted`` already carries the quadrature weights. In the antisymmetric sum the
    split-point half weights of the two one-sided trapezoid rules cancel.
    """
    lower, upper = exponential_sums(c, weighted)
    return 0.5 * (lower + upper + weighted), 0.5 * (upper - lower)


def exp_convolution(f: GridFunction, mode: ConvolutionMode = "symmetric") -> GridFunction:
    """Convolution with the Green's function ½e^{-|x|} of (1 - ∂²), or its x-derivative"""
    if mode not in ("symmetric", "antisymmetric"):
        raise ValueError(f"unknown convolution mode: {mode}")
    weighted = f.values * trapezoid_weights(f.n) * f.dx
    symmetric, antisymmetric = kernel_pair(f.x, weighted)
    return f.like(symmetric if mode == "symmetric" else antisymmetric)


def green_pair(f: GridFunction) -> Tuple[GridFunction, GridFunction]:
    """Both modes from a single pass"""
    weighted = f.values * trapezoid_weights(f.n) * f.dx
    symmetric, antisymmetric = kernel_pair(f.x, weighted)
    return f.like(symmetric), f.like(antisymmetric)
