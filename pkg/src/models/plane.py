from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class LagrangianPlane:
    """
    An n-plane of R^2n on which sigma vanishes.
    `basis` is orthonormal (2n x n); `souriau_w` is the symmetric unitary
    w = u u^T for the plane written as u * l_P.
    """

    n: int
    basis: np.ndarray
    souriau_w: np.ndarray

    @property
    def det_w(self) -> complex:
        d = complex(np.linalg.det(self.souriau_w))
        return d / abs(d)


@dataclass(frozen=True, eq=False)
class LagrangianLift:
    """A point (w, theta) of the universal cover, det w = e^{i theta}."""

    plane: LagrangianPlane
    theta: float

    @property
    def n(self) -> int:
        return self.plane.n

    def shifted(self, turns: int) -> "LagrangianLift":
        # action of beta^turns
        return LagrangianLift(plane=self.plane, theta=self.theta + 2 * np.pi * turns)
