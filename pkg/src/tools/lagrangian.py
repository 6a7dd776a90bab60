"""
Lagrangian planes, Souriau coordinates and the Wall-Kashiwara signature.

A plane l = u * l_P (R^2n = C^n through (x, p) -> x + ip) has Souriau
coordinate w = u u^T. For an orthonormal basis [X; P] of l the matrix
Z = X + iP is unitary and u = -iZ, so w = -Z Z^T.
"""
import logging
from typing import Optional

import numpy as np

from src.config import Settings, settings
from src.errors import IntegralityViolation, NotIsotropic, NotTransversal, RankDeficient
from src.models.plane import LagrangianPlane
from src.tools.symplinalg import inertia, standard_J

logger = logging.getLogger("lagrangian")


def plane_from_basis(B, tolerances: Optional[Settings] = None) -> LagrangianPlane:
    tol = tolerances or settings
    B = np.asarray(B, dtype=float)
    if B.ndim != 2 or B.shape[0] % 2:
        raise RankDeficient(f"basis must be 2n x k, got shape {B.shape}")
    n = B.shape[0] // 2
    u_s, s, _ = np.linalg.svd(B, full_matrices=False)
    rank = int(np.sum(s > tol.EPS_RANK * s[0])) if s.size and s[0] > 0 else 0
    if rank < n:
        raise RankDeficient(f"basis spans {rank} dimensions, need {n}")
    if rank > n:
        raise NotIsotropic(f"basis spans {rank} > {n} dimensions")
    q = u_s[:, :n]
    isotropy = float(np.max(np.abs(q.T @ standard_J(n) @ q)))
    if isotropy > tol.TOL_SYMPL:
        raise NotIsotropic(f"sigma does not vanish on the span ({isotropy:.3e})")
    z = q[:n] + 1j * q[n:]
    w = -z @ z.T
    return LagrangianPlane(n=n, basis=q, souriau_w=(w + w.T) / 2)


def plane_x(n: int) -> LagrangianPlane:
    return plane_from_basis(np.vstack([np.eye(n), np.zeros((n, n))]))


def plane_p(n: int) -> LagrangianPlane:
    return plane_from_basis(np.vstack([np.zeros((n, n)), np.eye(n)]))


def plane_from_unitary(u) -> LagrangianPlane:
    """The plane u * l_P."""
    z = 1j * np.asarray(u, dtype=complex)
    return plane_from_basis(np.vstack([z.real, z.imag]))


def graph_of_symmetric(A) -> LagrangianPlane:
    """{(x, Ax)}."""
    A = np.asarray(A, dtype=float)
    return plane_from_basis(np.vstack([np.eye(A.shape[0]), A]))


def apply(S: np.ndarray, plane: LagrangianPlane) -> LagrangianPlane:
    return plane_from_basis(S @ plane.basis)


def sigma_gram(B1: np.ndarray, B2: np.ndarray) -> np.ndarray:
    """Matrix of sigma(B1 a, B2 b) = a^T (B1^T J^T B2) b."""
    J = standard_J(B1.shape[0] // 2)
    return B1.T @ J.T @ B2


def intersection_dim(
    l1: LagrangianPlane, l2: LagrangianPlane, tolerances: Optional[Settings] = None
) -> int:
    tol = tolerances or settings
    s = np.linalg.svd(np.hstack([l1.basis, l2.basis]), compute_uv=False)
    rank = int(np.sum(s > tol.EPS_RANK * s[0]))
    return 2 * l1.n - rank


def wall_kashiwara(
    l1: LagrangianPlane,
    l2: LagrangianPlane,
    l3: LagrangianPlane,
    tolerances: Optional[Settings] = None,
) -> int:
    """
    Signature of Q(z, z', z'') = sigma(z, z') + sigma(z', z'') + sigma(z'', z)
    on l1 + l2 + l3, in the orthonormal bases of the three planes.
    """
    tol = tolerances or settings
    n = l1.n
    g12 = sigma_gram(l1.basis, l2.basis) / 2
    g23 = sigma_gram(l2.basis, l3.basis) / 2
    g31 = sigma_gram(l3.basis, l1.basis) / 2
    zero = np.zeros((n, n))
    q = np.block([
        [zero, g12, g31.T],
        [g12.T, zero, g23],
        [g31, g23.T, zero],
    ])
    return inertia(q, tol.EPS_EIG).signature


def wall_kashiwara_transversal(
    l1: LagrangianPlane,
    l2: LagrangianPlane,
    l3: LagrangianPlane,
    tolerances: Optional[Settings] = None,
) -> int:
    """Signature of Q'(z') = sigma(Pr z', z') on l2, Pr the projection onto l1 along l3."""
    tol = tolerances or settings
    if intersection_dim(l1, l3, tol) > 0:
        raise NotTransversal("first and third planes intersect")
    n = l1.n
    coefficients = np.linalg.solve(np.hstack([l1.basis, l3.basis]), l2.basis)
    along_l1 = coefficients[:n]
    form = along_l1.T @ sigma_gram(l1.basis, l2.basis)
    return inertia(form, tol.EPS_EIG).signature


def inert_triple(
    l1: LagrangianPlane,
    l2: LagrangianPlane,
    l3: LagrangianPlane,
    tolerances: Optional[Settings] = None,
) -> int:
    tol = tolerances or settings
    total = (
        wall_kashiwara(l1, l2, l3, tol)
        + l1.n
        + intersection_dim(l1, l2, tol)
        - intersection_dim(l2, l3, tol)
        + intersection_dim(l3, l1, tol)
    )
    if total % 2:
        raise IntegralityViolation("index of inertia", total / 2, 0.5)
    return total // 2


def direct_sum_plane(l1: LagrangianPlane, l2: LagrangianPlane) -> LagrangianPlane:
    n1, n2 = l1.n, l2.n
    n = n1 + n2
    basis = np.zeros((2 * n, n))
    basis[:n1, :n1] = l1.basis[:n1]
    basis[n1:n, n1:] = l2.basis[:n2]
    basis[n:n + n1, :n1] = l1.basis[n1:]
    basis[n + n1:, n1:] = l2.basis[n2:]
    return plane_from_basis(basis)


# Doubled space (R^2n + R^2n, sigma (+) -sigma) carried to standard R^4n by
# Phi = id (+) phi, phi(x, p) = (p, x): (x1, p1, x2, p2) -> X = (x1, p2), P = (p1, x2).

def doubled_form(n: int) -> np.ndarray:
    J = standard_J(n)
    zero = np.zeros_like(J)
    return np.block([[J, zero], [zero, -J]])


def doubled_isomorphism(n: int) -> np.ndarray:
    order = np.r_[0:n, 3 * n:4 * n, n:2 * n, 2 * n:3 * n]
    return np.eye(4 * n)[order]


def graph_plane(S: np.ndarray) -> LagrangianPlane:
    """Phi({(z, Sz)}), a Lagrangian plane of standard R^4n."""
    n = S.shape[0] // 2
    basis = np.vstack([np.eye(2 * n), S])
    return plane_from_basis(doubled_isomorphism(n) @ basis)


def diagonal_plane(n: int) -> LagrangianPlane:
    return graph_plane(np.eye(2 * n))
