"""Exceptions raised by the novikov-lab numerics"""

from typing import Any, List, Optional


class NovikovLabError(Exception):
    """Base class for all library errors"""


class NonFiniteInputError(NovikovLabError, ValueError):
    def __init__(self, what: str = "grid function"):
        super().__init__(f"non-finite input ({what})")


class BlowupError(NovikovLabError, ArithmeticError):
    """Integration produced a non-finite state; ``partial`` holds what was computed"""

    def __init__(self, partial: Optional[List[Any]] = None, detail: str = ""):
        self.partial = partial or []
        msg = "blowup"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class XiPositivityError(NovikovLabError, ValueError):
    def __init__(self, min_xi: float):
        self.min_xi = min_xi
        super().__init__(f"xi-positivity violated (min xi = {min_xi:.3e})")


class PicardStalledError(NovikovLabError, RuntimeError):
    def __init__(self, residuals: List[float]):
        self.residuals = list(residuals)
        last = residuals[-1] if residuals else float("nan")
        super().__init__(f"picard stalled after {len(residuals)} iterations (residual {last:.3e})")


class NearBreakingError(NovikovLabError, RuntimeError):
    def __init__(self, max_slope: float, guard: float):
        self.max_slope = max_slope
        super().__init__(
            f"near-breaking: switch to characteristic solver (max |u_x| = {max_slope:.3f} > {guard})"
        )


class EnergyInconsistencyError(NovikovLabError, ValueError):
    def __init__(self, E: float, F: float):
        super().__init__(f"energy inconsistency: 2E^2 - F = {2 * E * E - F:.3e} < 0")


class NoCollisionError(NovikovLabError, RuntimeError):
    def __init__(self):
        super().__init__("no collision detected")
