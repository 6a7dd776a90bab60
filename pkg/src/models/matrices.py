from dataclasses import dataclass
from enum import Enum

import numpy as np


class SpClass(str, Enum):
    SP_PLUS = "Sp+"
    SP_MINUS = "Sp-"
    SP_ZERO = "Sp0"


@dataclass(frozen=True, eq=False)
class SymplecticMatrix:
    """A 2n x 2n real matrix in (x, p) block order with S^T J S = J."""

    entries: np.ndarray
    residual: float = 0.0  # ||S^T J S - J||_max at construction

    @property
    def n(self) -> int:
        return self.entries.shape[0] // 2


@dataclass(frozen=True, eq=False)
class SymmetricForm:
    entries: np.ndarray

    @classmethod
    def symmetrized(cls, a) -> "SymmetricForm":
        a = np.asarray(a, dtype=float)
        return cls(entries=(a + a.T) / 2)

    @property
    def size(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class InertiaTriple:
    n_plus: int
    n_zero: int
    n_minus: int

    @property
    def signature(self) -> int:
        return self.n_plus - self.n_minus

    @property
    def size(self) -> int:
        return self.n_plus + self.n_zero + self.n_minus


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    """Image u = A + iB of an orthosymplectic U = [[A, -B], [B, A]]."""

    entries: np.ndarray

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def det(self) -> complex:
        return complex(np.linalg.det(self.entries))
