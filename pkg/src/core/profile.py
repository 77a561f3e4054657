"""Initial data known in closed form, smooth between finitely many kinks"""

from dataclasses import dataclass
from typing import Callable, Tuple, Union

import numpy as np

Side = Union[float, np.ndarray]


@dataclass(frozen=True)
class Profile:
    """(u, u_x) at arbitrary points; u_x may jump at the sorted ``kinks``

    ``side`` selects the slope at a kink: -1 the left limit, +1 the right limit,
    0 the mean. It broadcasts against the points.
    """

    evaluate: Callable[[np.ndarray, Side], Tuple[np.ndarray, np.ndarray]]
    kinks: Tuple[float, ...] = ()

    def __call__(self, x, side: Side = 0.0) -> Tuple[np.ndarray, np.ndarray]:
        u, ux = self.evaluate(np.asarray(x, dtype=float), side)
        return np.asarray(u, dtype=float), np.asarray(ux, dtype=float)
