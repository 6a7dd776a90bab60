from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from src.models.plane import LagrangianPlane


@dataclass(frozen=True, eq=False)
class SymplecticPath:
    """
    Sampled path t -> S_t in Sp(n), t in [0, 1], with S_0 = I.
    Stands for its class in the universal cover. `generator` evaluates the
    path between samples so lifts can bisect steps that turn too fast.
    """

    n: int
    times: np.ndarray
    samples: np.ndarray  # shape (N + 1, 2n, 2n)
    generator: Optional[Callable[[float], np.ndarray]] = None
    max_step_rotation: float = 0.0  # largest |delta arg det u| between samples
    label: str = "path"

    @property
    def endpoint(self) -> np.ndarray:
        return self.samples[-1]

    def at(self, t: float) -> np.ndarray:
        if t == self.times[0]:
            return self.samples[0]
        if t == self.times[-1]:
            return self.samples[-1]
        if self.generator is None:
            raise ValueError(f"{self.label} cannot be evaluated between samples")
        return self.generator(float(t))

    def __len__(self) -> int:
        return len(self.times)


@dataclass(frozen=True, eq=False)
class LagrangianPath:
    times: np.ndarray
    planes: List[LagrangianPlane]
    plane_at: Optional[Callable[[float], LagrangianPlane]] = None


@dataclass(frozen=True, eq=False)
class LiftedAngle:
    """Continuous determination of an argument along sample times."""

    times: np.ndarray
    angles: np.ndarray
    refinements: int = 0

    @property
    def start(self) -> float:
        return float(self.angles[0])

    @property
    def end(self) -> float:
        return float(self.angles[-1])

    @property
    def total(self) -> float:
        return self.end - self.start

