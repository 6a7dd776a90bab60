from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from src.models.matrices import SymmetricForm

# nu is an integer except when Ker(S - I) has odd dimension
IndexValue = Union[int, Fraction]


@dataclass(frozen=True, eq=False)
class CayleyTransform:
    """M_S = 1/2 J (S + I)(S - I)^-1, symmetric."""

    m_s: SymmetricForm
    asymmetry: float = 0.0  # before symmetrization, relative to ||M_S||

    @property
    def entries(self) -> np.ndarray:
        return self.m_s.entries


@dataclass(frozen=True, eq=False)
class GeneratingFunctionData:
    p: np.ndarray
    l: np.ndarray
    q: np.ndarray
    w_xx: SymmetricForm

    @property
    def n(self) -> int:
        return self.p.shape[0]

    def reconstruct(self) -> np.ndarray:
        """S_W = [[L^-1 Q, L^-1], [P L^-1 Q - L^T, P L^-1]]."""
        l_inv = np.linalg.inv(self.l)
        top = np.hstack([l_inv @ self.q, l_inv])
        bottom = np.hstack([self.p @ l_inv @ self.q - self.l.T, self.p @ l_inv])
        return np.vstack([top, bottom])


@dataclass(frozen=True)
class ProductRecord:
    """nu of a pointwise product against nu + nu' + 1/2 sign(M_S + M_S')."""

    nu_product: IndexValue
    nu_first: IndexValue
    nu_second: IndexValue
    half_signature: Fraction

    @property
    def rhs(self) -> Fraction:
        return Fraction(self.nu_first) + Fraction(self.nu_second) + self.half_signature

    @property
    def agrees(self) -> bool:
        return Fraction(self.nu_product) == self.rhs


@dataclass(frozen=True)
class PowerRecord:
    r: int
    value: IndexValue
    closed_form: Optional[Fraction]  # r nu + 1/2 (r - 1) sign M_S
    direct: Optional[IndexValue]
    used_fallback: bool

    @property
    def closed_form_agrees(self) -> Optional[bool]:
        if self.closed_form is None:
            return None
        return self.closed_form == Fraction(self.value)

    @property
    def agrees_direct(self) -> Optional[bool]:
        if self.direct is None:
            return None
        return Fraction(self.direct) == Fraction(self.value)


@dataclass(frozen=True)
class ConcavityRecord:
    mu_lp: int
    m_lp: int
    concavity: int
    signature_w: int

    @property
    def via_reduced(self) -> int:
        return self.m_lp - self.concavity

    @property
    def via_signature(self) -> Fraction:
        return Fraction(self.mu_lp + self.signature_w, 2)
