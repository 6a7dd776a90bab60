"""
Linear-algebra primitives shared by every index computation.

Block convention: vectors are z = (x, p), J = [[0, I], [-I, 0]] and
sigma(z, z') = <Jz, z'>. Unitary images use iota(U) = A + iB for
U = [[A, -B], [B, A]].
"""
import logging
from typing import Optional, Tuple

import numpy as np
from scipy import linalg

from src.config import Settings, settings
from src.errors import BranchCut, NotSymplectic, PolarFailure
from src.models.matrices import (
    InertiaTriple,
    SpClass,
    SymmetricForm,
    SymplecticMatrix,
    UnitaryMatrix,
)

logger = logging.getLogger("symplinalg")


def standard_J(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be positive")
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def symplectic_inverse(S: np.ndarray) -> np.ndarray:
    # S^-1 = -J S^T J
    J = standard_J(S.shape[0] // 2)
    return -J @ S.T @ J


def symplectic_residual(S: np.ndarray) -> float:
    """||S^T J S - J||_max relative to max(1, ||S||_2^2)."""
    S = np.asarray(S, dtype=float)
    J = standard_J(S.shape[0] // 2)
    scale = max(1.0, np.linalg.norm(S, 2) ** 2)
    return float(np.max(np.abs(S.T @ J @ S - J)) / scale)


def check_symplectic(S, tolerances: Optional[Settings] = None) -> SymplecticMatrix:
    tol = tolerances or settings
    S = np.asarray(getattr(S, "entries", S), dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] % 2:
        raise NotSymplectic(f"expected a 2n x 2n matrix, got shape {S.shape}")
    residual = symplectic_residual(S)
    if residual > tol.TOL_SYMPL:
        raise NotSymplectic(f"S^T J S - J has size {residual:.3e} > {tol.TOL_SYMPL:.1e}")
    return SymplecticMatrix(entries=S, residual=residual)


def inertia(A, eps_eig: Optional[float] = None, scale: Optional[float] = None) -> InertiaTriple:
    """
    Counts of eigenvalues above, within and below +-eps * max(1, scale).
    `scale` defaults to ||A||_2; a form that is zero up to rounding has no
    sign, so the band never shrinks below eps.
    """
    a = A.entries if isinstance(A, SymmetricForm) else SymmetricForm.symmetrized(A).entries
    if a.size == 0:
        return InertiaTriple(0, 0, 0)
    eigenvalues = np.linalg.eigvalsh(a)
    if scale is None:
        scale = float(np.max(np.abs(eigenvalues)))
    eps = (settings.EPS_EIG if eps_eig is None else eps_eig) * max(1.0, scale)
    n_plus = int(np.sum(eigenvalues > eps))
    n_minus = int(np.sum(eigenvalues < -eps))
    return InertiaTriple(n_plus, len(eigenvalues) - n_plus - n_minus, n_minus)


def signature(A, eps_eig: Optional[float] = None) -> int:
    return inertia(A, eps_eig).signature


def complexify(U: np.ndarray) -> np.ndarray:
    n = U.shape[0] // 2
    a = (U[:n, :n] + U[n:, n:]) / 2
    b = (U[n:, :n] - U[:n, n:]) / 2
    return a + 1j * b


def realify(u: np.ndarray) -> np.ndarray:
    """Inverse of iota: A + iB -> [[A, -B], [B, A]]."""
    a, b = u.real, u.imag
    return np.block([[a, -b], [b, a]])


def polar_unitary(S, tolerances: Optional[Settings] = None) -> UnitaryMatrix:
    """
    Unitary part of S = P U, from the SVD of S so that the conditioning of
    S is not squared. The orthogonal factor is projected onto U(n) and
    rejected if that moves it by more than TOL_SYMPL * ||S||.
    """
    tol = tolerances or settings
    S = check_symplectic(S, tol).entries
    _, U = polar_factors(S)
    u = complexify(U)
    w, _, vh = np.linalg.svd(u)
    u = w @ vh
    drift = float(np.max(np.abs(realify(u) - U)))
    if drift > tol.TOL_SYMPL * max(1.0, np.linalg.norm(S, 2)):
        raise PolarFailure(f"orthogonal factor off by {drift:.3e}")
    return UnitaryMatrix(entries=u)


def rho(S, tolerances: Optional[Settings] = None) -> complex:
    d = polar_unitary(S, tolerances).det
    return d / abs(d)


def unitary_eigenangles(u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Principal eigen-angles in (-pi, pi] and a unitary eigenbasis."""
    t, z = linalg.schur(np.asarray(u, dtype=complex), output="complex")
    return np.angle(np.diag(t)), z


def unitary_log_trace(U, eps_branch: Optional[float] = None) -> complex:
    """Tr Log U on the principal branch."""
    u = np.asarray(getattr(U, "entries", U), dtype=complex)
    eps = settings.EPS_BRANCH if eps_branch is None else eps_branch
    angles, _ = unitary_eigenangles(u)
    if np.any(np.abs(angles) > np.pi - eps):
        raise BranchCut(f"eigenvalue within {eps:.1e} rad of -1")
    return 1j * float(np.sum(angles))


def direct_sum(S1: np.ndarray, S2: np.ndarray) -> np.ndarray:
    """S1 (+) S2 in the (x1, x2, p1, p2) ordering."""
    n1, n2 = S1.shape[0] // 2, S2.shape[0] // 2
    n = n1 + n2
    out = np.zeros((2 * n, 2 * n), dtype=np.result_type(S1, S2))
    i1 = np.r_[0:n1, n:n + n1]
    i2 = np.r_[n1:n, n + n1:2 * n]
    out[np.ix_(i1, i1)] = S1
    out[np.ix_(i2, i2)] = S2
    return out


def rotation(angle: float) -> np.ndarray:
    """exp(angle * J_1) = [[cos, sin], [-sin, cos]]; its unitary image is e^{-i angle}."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, s], [-s, c]])


def positive_power(P: np.ndarray, s: float) -> np.ndarray:
    d, v = np.linalg.eigh((P + P.T) / 2)
    return (v * d ** s) @ v.T


def unitary_power(u: np.ndarray, s: float) -> np.ndarray:
    angles, z = unitary_eigenangles(u)
    return (z * np.exp(1j * s * angles)) @ z.conj().T


def polar_factors(S: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """S = P U with P = W Sigma W^T positive and U = W V^T orthogonal, S = W Sigma V^T."""
    w, s, vh = np.linalg.svd(S)
    P = (w * s) @ w.T
    return (P + P.T) / 2, w @ vh


def geodesic_power(D: np.ndarray, s: float) -> np.ndarray:
    """P^s U^s for D = P U; runs from I to D through Sp(n) as s goes 0 -> 1."""
    P, U = polar_factors(D)
    return positive_power(P, s) @ realify(unitary_power(complexify(U), s))


def symplectic_projection(S: np.ndarray) -> Tuple[np.ndarray, float]:
    """
    Nearby symplectic matrix: the unitary part is re-orthonormalized and
    log P is projected onto the symmetric matrices anticommuting with J.
    Returns the projection and the drift ||S^T J S - J||_max beforehand.
    """
    n = S.shape[0] // 2
    J = standard_J(n)
    drift = float(np.max(np.abs(S.T @ J @ S - J)))
    P, U = polar_factors(S)
    u = complexify(U)
    w, _, vh = np.linalg.svd(u)
    u = w @ vh
    d, v = np.linalg.eigh(P)
    log_p = (v * np.log(d)) @ v.T
    log_p = (log_p + J @ log_p @ J) / 2
    d, v = np.linalg.eigh(log_p)
    return (v * np.exp(d)) @ v.T @ realify(u), drift


def det_minus_identity(S: np.ndarray) -> float:
    return float(np.linalg.det(S - np.eye(S.shape[0])))


def is_degenerate(S: np.ndarray, tolerances: Optional[Settings] = None) -> bool:
    """True when S - I is numerically singular (S in Sp0)."""
    tol = tolerances or settings
    smallest = np.linalg.svd(S - np.eye(S.shape[0]), compute_uv=False)[-1]
    return bool(smallest <= tol.EPS_DET * max(1.0, np.linalg.norm(S, 2)))


def sp_class(S: np.ndarray, tolerances: Optional[Settings] = None) -> SpClass:
    if is_degenerate(S, tolerances):
        return SpClass.SP_ZERO
    return SpClass.SP_PLUS if det_minus_identity(S) > 0 else SpClass.SP_MINUS


def kernel_dim(S: np.ndarray, tolerances: Optional[Settings] = None) -> int:
    tol = tolerances or settings
    values = np.linalg.svd(S - np.eye(S.shape[0]), compute_uv=False)
    return int(np.sum(values <= tol.EPS_RANK * max(1.0, np.linalg.norm(S, 2))))
