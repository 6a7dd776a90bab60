from dataclasses import dataclass
from enum import Enum
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator


class HamiltonianKind(str, Enum):
    QUADRATIC = "quadratic"  # H = 1/2 z^T M z
    SEPARABLE_POLYNOMIAL = "separable_polynomial"  # H = 1/2 |p|^2 + sum_i V(x_i)
    CENTRAL_POTENTIAL = "central_potential"  # H = 1/2 |p|^2 + U(|x|)


class HamiltonianSpec(BaseModel):
    """
    Time-independent Hamiltonian on R^2n.
    V(x) = sum_k coefficients[k] x^k; U(r) = sum_j coefficients[j] r^exponents[j].
    """

    kind: HamiltonianKind
    n: int = Field(ge=1)
    matrix: Optional[List[List[float]]] = None
    coefficients: List[float] = []
    exponents: List[float] = []

    @model_validator(mode="after")
    def check_kind(self):
        if self.kind == HamiltonianKind.QUADRATIC:
            if self.matrix is None:
                raise ValueError("quadratic Hamiltonian needs a matrix")
            m = np.asarray(self.matrix, dtype=float)
            if m.shape != (2 * self.n, 2 * self.n):
                raise ValueError(f"matrix must be {2 * self.n}x{2 * self.n}")
            if np.max(np.abs(m - m.T), initial=0.0) > 1e-8 * max(1.0, np.max(np.abs(m), initial=0.0)):
                raise ValueError("matrix must be symmetric")
        elif not self.coefficients:
            raise ValueError(f"{self.kind.value} Hamiltonian needs coefficients")
        if self.kind == HamiltonianKind.CENTRAL_POTENTIAL and len(self.exponents) != len(self.coefficients):
            raise ValueError("central potential needs one exponent per coefficient")
        if not np.all(np.isfinite(self.coefficients)) or not np.all(np.isfinite(self.exponents)):
            raise ValueError("potential data must be finite")
        return self


@dataclass(frozen=True, eq=False)
class PeriodicOrbit:
    z0: np.ndarray
    period: float
    closure_residual: float = 0.0  # ||f_T(z0) - z0||
