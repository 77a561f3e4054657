"""Experiment configuration models and loader"""

import json
from enum import Enum
from pathlib import Path
from typing import Annotated, List, Literal, Optional, Tuple, Union

import numpy as np
import yaml
from pydantic import BaseModel, Field, field_validator, model_validator

from src.core.grid_function import GridFunction
from src.core.profile import Profile
from src.peakons.dynamics import PeakonState, peakon_profile


class Command(str, Enum):
    PEAKONS = "peakons"
    SEMILINEAR = "semilinear"
    SMOOTH = "smooth"
    METRIC = "metric"
    CH = "ch"
    CONCENTRATION = "concentration"


class Solver(str, Enum):
    RK4 = "rk4"
    PICARD = "picard"


class GridConfig(BaseModel):
    """Truncated line [-L, L] with n nodes"""
    L: float = Field(default=20.0, gt=0, description="Half-width of the domain")
    n: int = Field(default=4096, description="Node count, a power of two >= 256")

    @field_validator("n")
    @classmethod
    def _power_of_two(cls, n: int) -> int:
        if n < 256 or n & (n - 1):
            raise ValueError(f"n must be a power of two >= 256, got {n}")
        return n

    def template(self) -> GridFunction:
        return GridFunction.zeros(self.L, self.n)


class TimeConfig(BaseModel):
    t_end: float = Field(default=1.0, gt=0)
    dt: float = Field(default=1e-3, gt=0)
    store_every: int = Field(default=10, ge=1, description="Keep every k-th step")


class PicardConfig(BaseModel):
    max_iter: int = Field(default=50, ge=1)
    tol: float = Field(default=1e-10, gt=0)
    n_slices: int = Field(default=64, ge=2)


class MetricConfig(BaseModel):
    n_theta: int = Field(default=33, ge=3, description="Samples along each interpolation path")
    n_pairs: int = Field(default=20, ge=1, description="Random Gaussian pairs in the comparison family")


class PeakonData(BaseModel):
    kind: Literal["peakons"] = "peakons"
    peakons: List[Tuple[float, float]] = Field(description="(p, q) amplitude and position pairs")

    @field_validator("peakons")
    @classmethod
    def _non_empty(cls, peakons):
        if not peakons:
            raise ValueError("at least one peakon is required")
        return sorted(peakons, key=lambda pq: pq[1])

    def state(self) -> PeakonState:
        p, q = zip(*self.peakons)
        return PeakonState(0.0, np.array(p), np.array(q))

    def profile(self) -> Profile:
        return peakon_profile(self.state())

    def sample(self, x: np.ndarray) -> np.ndarray:
        return self.profile()(x)[0]


class GaussianData(BaseModel):
    kind: Literal["gaussian"] = "gaussian"
    amp: float = 0.5
    width: float = Field(default=1.0, gt=0)
    center: float = 0.0

    def sample(self, x: np.ndarray) -> np.ndarray:
        return self.amp * np.exp(-(((x - self.center) / self.width) ** 2))

    def profile(self) -> Profile:
        def evaluate(x, _side):
            u = self.sample(x)
            return u, -2.0 * (x - self.center) / self.width ** 2 * u

        return Profile(evaluate)


class SumData(BaseModel):
    kind: Literal["sum"] = "sum"
    terms: List[Annotated[Union[PeakonData, GaussianData], Field(discriminator="kind")]]

    def sample(self, x: np.ndarray) -> np.ndarray:
        return sum(term.sample(x) for term in self.terms)

    def profile(self) -> Profile:
        parts = [term.profile() for term in self.terms]

        def evaluate(x, side):
            values = [part(x, side) for part in parts]
            return sum(v[0] for v in values), sum(v[1] for v in values)

        return Profile(evaluate, kinks=tuple(sorted(k for part in parts for k in part.kinks)))


InitialData = Annotated[Union[PeakonData, GaussianData, SumData], Field(discriminator="kind")]


class WindowConfig(BaseModel):
    """Lagrangian labels of the two tracked characteristics"""
    Y1: float
    Y2: float

    @model_validator(mode="after")
    def _ordered(self):
        if not self.Y1 < self.Y2:
            raise ValueError("window needs Y1 < Y2")
        return self


class ExperimentConfig(BaseModel):
    command: Command
    initial_data: InitialData
    grid: GridConfig = Field(default_factory=GridConfig)
    time: TimeConfig = Field(default_factory=TimeConfig)
    solver: Solver = Solver.RK4
    picard: PicardConfig = Field(default_factory=PicardConfig)
    metric: MetricConfig = Field(default_factory=MetricConfig)
    window: Optional[WindowConfig] = None
    output_dir: Path = Path("runs/latest")
    seed: int = 0

    def initial_field(self) -> GridFunction:
        return GridFunction.on_interval(self.grid.L, self.grid.n, self.initial_data.sample)

    def canonical_json(self) -> str:
        """Sorted-key JSON of the validated config, the input of the run hash"""
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))


def load_config(path: Union[str, Path], command: Optional[str] = None) -> ExperimentConfig:
    """Read a JSON or YAML config; ``command`` fills a missing command and must match a given one"""
    path = Path(path)
    with open(path, "r") as f:
        # PyYAML reads 1e-3 as a string, so JSON goes through json
        data = (json.load(f) if path.suffix == ".json" else yaml.safe_load(f)) or {}
    if not isinstance(data, dict):
        raise ValueError(f"config {path} must hold a mapping")
    if command is not None:
        given = data.setdefault("command", command)
        if given != command:
            raise ValueError(f"config command '{given}' does not match '{command}'")
    return ExperimentConfig.model_validate(data)
