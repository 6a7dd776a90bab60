"""
The extended Conley-Zehnder index nu and the tools around it.

nu is half the ALM index, in the doubled space, of the diagonal against the
graph of the endpoint, lifted along the path. It is defined for every
endpoint. The Cayley transform, generating-function and winding routes only
apply to nondegenerate endpoints and serve as cross-checks.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy import linalg

from src.config import Settings, settings
from src.errors import (
    DegenerateEndpoint,
    IntegralityViolation,
    NotFree,
    NotSymplectic,
    PathExtensionFailed,
)
from src.models.matrices import SpClass, SymmetricForm
from src.models.path import LagrangianPath, SymplecticPath
from src.models.transforms import (
    CayleyTransform,
    ConcavityRecord,
    GeneratingFunctionData,
    IndexValue,
    PowerRecord,
    ProductRecord,
)
from src.tools.lagrangian import apply, diagonal_plane, graph_plane, intersection_dim, plane_p
from src.tools.maslov import (
    alm,
    as_integer,
    lift_determinant,
    lift_lagrangian_path,
    lift_plane,
    relative_maslov,
    rho_angle,
    step_angles,
)
from src.tools.paths import inverse_path, product_path, repeat_path
from src.tools.symplinalg import (
    direct_sum,
    geodesic_power,
    inertia,
    is_degenerate,
    kernel_dim,
    polar_unitary,
    rotation,
    sp_class,
    standard_J,
    symplectic_inverse,
    symplectic_residual,
)

logger = logging.getLogger("czindex")


def _require_nondegenerate(S: np.ndarray, what: str, tol: Settings) -> None:
    if is_degenerate(S, tol):
        raise DegenerateEndpoint(f"det({what} - I) vanishes")


# Cayley calculus

def cayley(S: np.ndarray, tolerances: Optional[Settings] = None) -> CayleyTransform:
    """M_S = 1/2 J (S + I)(S - I)^-1."""
    tol = tolerances or settings
    S = np.asarray(S, dtype=float)
    _require_nondegenerate(S, "S", tol)
    n = S.shape[0] // 2
    eye = np.eye(2 * n)
    inv = np.linalg.inv(S - eye)
    m = 0.5 * standard_J(n) @ (S + eye) @ inv
    scale = max(1.0, float(np.max(np.abs(m))))
    asymmetry = float(np.max(np.abs(m - m.T))) / scale
    if asymmetry > tol.TOL_SYM * np.linalg.cond(S - eye):
        raise NotSymplectic(f"Cayley transform is not symmetric ({asymmetry:.3e})")
    return CayleyTransform(m_s=SymmetricForm.symmetrized(m), asymmetry=asymmetry)


def cayley_sum_inverse(S: np.ndarray, S2: np.ndarray, tolerances: Optional[Settings] = None) -> np.ndarray:
    """(M_S + M_S')^-1 = -(S' - I)(S S' - I)^-1 (S - I) J."""
    tol = tolerances or settings
    _require_nondegenerate(S, "S", tol)
    _require_nondegenerate(S2, "S'", tol)
    _require_nondegenerate(S @ S2, "S S'", tol)
    eye = np.eye(S.shape[0])
    J = standard_J(S.shape[0] // 2)
    return -(S2 - eye) @ np.linalg.inv(S @ S2 - eye) @ (S - eye) @ J


def cayley_product(S: np.ndarray, S2: np.ndarray, tolerances: Optional[Settings] = None) -> np.ndarray:
    """M_SS' = M_S + (S^T - I)^-1 J (M_S + M_S')^-1 J (S - I)^-1."""
    tol = tolerances or settings
    eye = np.eye(S.shape[0])
    J = standard_J(S.shape[0] // 2)
    middle = cayley_sum_inverse(S, S2, tol)
    return cayley(S, tol).entries + np.linalg.inv(S.T - eye) @ J @ middle @ J @ np.linalg.inv(S - eye)


# nu through the doubled space

def graph_lagrangian_path(path: SymplecticPath) -> LagrangianPath:
    return LagrangianPath(
        times=path.times,
        planes=[graph_plane(S) for S in path.samples],
        plane_at=(lambda t: graph_plane(path.at(t))) if path.generator is not None else None,
    )


def nu(path: SymplecticPath, tolerances: Optional[Settings] = None) -> IndexValue:
    """
    nu(S_inf) = 1/2 mu(Delta_inf, graph(S)_inf) with graph(S_t) lifted from
    the diagonal. Half-integral exactly when dim Ker(S - I) is odd.
    """
    tol = tolerances or settings
    delta = lift_plane(diagonal_plane(path.n))
    end, _ = lift_lagrangian_path(graph_lagrangian_path(path), delta.theta)
    doubled = alm(delta, end, tol)
    kernel = kernel_dim(path.endpoint, tol)
    if (doubled - kernel) % 2:
        raise IntegralityViolation(f"2 nu against dim Ker(S - I) = {kernel}", doubled / 2, 0.5)
    value = Fraction(doubled, 2)
    logger.debug("nu(%s) = %s", path.label, value)
    return int(value) if value.denominator == 1 else value


def nu_inverse_check(path: SymplecticPath, tolerances: Optional[Settings] = None) -> IndexValue:
    """nu of t -> S_t^-1."""
    return nu(inverse_path(path, tolerances), tolerances)


def nu_product(
    path: SymplecticPath, other: SymplecticPath, tolerances: Optional[Settings] = None
) -> ProductRecord:
    tol = tolerances or settings
    S, S2 = path.endpoint, other.endpoint
    _require_nondegenerate(S, "S", tol)
    _require_nondegenerate(S2, "S'", tol)
    _require_nondegenerate(S @ S2, "S S'", tol)
    half = Fraction(inertia(cayley(S, tol).entries + cayley(S2, tol).entries, tol.EPS_EIG).signature, 2)
    return ProductRecord(
        nu_product=nu(product_path(path, other, tol), tol),
        nu_first=nu(path, tol),
        nu_second=nu(other, tol),
        half_signature=half,
    )


def nu_power(
    path: SymplecticPath, r: int, cross_check: bool = True, tolerances: Optional[Settings] = None
) -> PowerRecord:
    """
    nu of the r-fold path by iterating the product formula:
    nu(S^r) = r nu(S) + 1/2 sum_{k<r} sign(M_{S^k} + M_S).
    Falls back to the r-fold path itself when some S^k is degenerate.
    """
    tol = tolerances or settings
    if r < 1:
        raise ValueError("r must be positive")
    S = path.endpoint
    base = nu(path, tol)
    if r == 1:
        return PowerRecord(r=1, value=base, closed_form=Fraction(base), direct=base, used_fallback=False)

    powers = [S]
    for _ in range(r - 1):
        powers.append(powers[-1] @ S)

    if any(is_degenerate(P, tol) for P in powers):
        logger.debug("nu_power: an intermediate power is degenerate, using the %d-fold path", r)
        direct = nu(repeat_path(path, r, tol), tol)
        closed = None
        if not is_degenerate(S, tol):
            closed = r * Fraction(base) + Fraction((r - 1) * inertia(cayley(S, tol).entries, tol.EPS_EIG).signature, 2)
        return PowerRecord(r=r, value=direct, closed_form=closed, direct=direct, used_fallback=True)

    m_s = cayley(S, tol).entries
    half = sum(inertia(cayley(P, tol).entries + m_s, tol.EPS_EIG).signature for P in powers[:-1])
    value = r * Fraction(base) + Fraction(half, 2)
    closed = r * Fraction(base) + Fraction((r - 1) * inertia(m_s, tol.EPS_EIG).signature, 2)
    if closed != value:
        logger.warning("nu_power: r nu + (r-1)/2 sign M_S = %s differs from the iterated value %s", closed, value)
    direct = nu(repeat_path(path, r, tol), tol) if cross_check else None
    if direct is not None and Fraction(direct) != value:
        logger.warning("nu_power: iterated value %s, %d-fold path gives %s", value, r, direct)
    value = int(value) if value.denominator == 1 else value
    return PowerRecord(r=r, value=value, closed_form=closed, direct=direct, used_fallback=False)


def arg_det_class(path: SymplecticPath, tolerances: Optional[Settings] = None) -> int:
    """(n - nu) mod 4, the class of arg det(S - I) / pi."""
    value = Fraction(nu(path, tolerances))
    if value.denominator != 1:
        raise DegenerateEndpoint("nu is half-integral")
    return int((path.n - value) % 4)


# generating functions

def _blocks(S: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    n = S.shape[0] // 2
    return S[:n, :n], S[:n, n:], S[n:, :n], S[n:, n:]


def generating_function(S: np.ndarray, tolerances: Optional[Settings] = None) -> GeneratingFunctionData:
    """P = D B^-1, L = B^-1, Q = B^-1 A and W''_xx = P + Q - L - L^T."""
    tol = tolerances or settings
    S = np.asarray(S, dtype=float)
    A, B, _, D = _blocks(S)
    smallest = np.linalg.svd(B, compute_uv=False)[-1]
    if smallest <= tol.EPS_DET * max(1.0, np.linalg.norm(S, 2)):
        raise NotFree(f"upper-right block is singular (sigma_min {smallest:.3e})")
    L = np.linalg.inv(B)
    P = D @ L
    Q = L @ A
    bound = tol.TOL_SYM * np.linalg.cond(B) * max(1.0, np.linalg.norm(S, 2))
    if max(np.max(np.abs(P - P.T)), np.max(np.abs(Q - Q.T))) > bound:
        raise NotSymplectic("D B^-1 or B^-1 A is not symmetric")
    P = (P + P.T) / 2
    Q = (Q + Q.T) / 2
    return GeneratingFunctionData(p=P, l=L, q=Q, w_xx=SymmetricForm.symmetrized(P + Q - L - L.T))


def det_factorization_check(S: np.ndarray, tolerances: Optional[Settings] = None) -> Tuple[float, float]:
    """(det(S - I), (-1)^n det B det W''_xx)."""
    data = generating_function(S, tolerances)
    n = data.n
    _, B, _, _ = _blocks(np.asarray(S, dtype=float))
    lhs = float(np.linalg.det(S - np.eye(2 * n)))
    rhs = float((-1) ** n * np.linalg.det(B) * np.linalg.det(data.w_xx.entries))
    return lhs, rhs


def concavity_index(S: np.ndarray, tolerances: Optional[Settings] = None) -> int:
    """Inert W''_xx, the number of negative eigenvalues."""
    tol = tolerances or settings
    data = generating_function(S, tol)
    _require_nondegenerate(np.asarray(S, dtype=float), "S", tol)
    triple = inertia(data.w_xx, tol.EPS_EIG)
    if triple.n_zero:
        raise DegenerateEndpoint("W''_xx is singular")
    return triple.n_minus


def nu_via_concavity(path: SymplecticPath, tolerances: Optional[Settings] = None) -> ConcavityRecord:
    """
    nu = m_lP - Inert W''_xx = 1/2 (mu_lP + sign W''_xx) for a free,
    nondegenerate endpoint. Both forms are computed and must agree.
    """
    tol = tolerances or settings
    S = path.endpoint
    concavity = concavity_index(S, tol)
    data = generating_function(S, tol)
    lp = plane_p(path.n)
    mu = relative_maslov(path, lp, tol)
    total = mu + path.n + intersection_dim(apply(S, lp), lp, tol)
    if total % 2:
        raise IntegralityViolation("reduced Maslov index on l_P", total / 2, 0.5)
    record = ConcavityRecord(
        mu_lp=mu,
        m_lp=total // 2,
        concavity=concavity,
        signature_w=inertia(data.w_xx, tol.EPS_EIG).signature,
    )
    if Fraction(record.via_reduced) != record.via_signature:
        raise IntegralityViolation(
            "m_lP - Inert W against 1/2 (mu_lP + sign W)",
            float(record.via_signature),
            abs(float(record.via_signature) - record.via_reduced),
        )
    return record


# winding oracle

@dataclass(frozen=True, eq=False)
class _Block:
    """A piece of the symplectic normal form; `move(s)` runs from the block to its base form."""

    kind: str
    n: int
    e: np.ndarray  # 2N x n
    f: np.ndarray  # 2N x n
    move: Callable[[float], np.ndarray]


def _omega(a: np.ndarray, b: np.ndarray) -> float:
    J = standard_J(a.shape[0] // 2)
    return float(a @ J @ b)


def _two_dof(A: np.ndarray) -> np.ndarray:
    """[[A, 0], [0, A^-T]] on R^4."""
    out = np.zeros((4, 4))
    out[:2, :2] = A
    out[2:, 2:] = np.linalg.inv(A).T
    return out


def _elliptic_move(phi: float) -> Callable[[float], np.ndarray]:
    target = np.sign(phi) * np.pi
    return lambda s: rotation(phi + s * (target - phi))


def _hyperbolic_move(lam: float, end: float) -> Callable[[float], np.ndarray]:
    """diag(lam, 1/lam) to diag(end, 1/end) through numbers of the same sign, |.| > 1."""
    log_start, log_end = np.log(abs(lam)), np.log(abs(end))
    sign = np.sign(lam)

    def move(s: float) -> np.ndarray:
        value = sign * np.exp((1 - s) * log_start + s * log_end)
        return np.diag([value, 1 / value])

    return move


def _loxodromic_move(r: float, phi: float) -> Callable[[float], np.ndarray]:
    """r R(phi) turned to -r, then shrunk to -1; eigenvalues stay off 1."""

    def move(s: float) -> np.ndarray:
        if s <= 0.5:
            return _two_dof(r * rotation(phi + 2 * s * (np.pi - phi)))
        return _two_dof(-(r ** (2 - 2 * s)) * np.eye(2))

    return move


def _positive_pair_move(lam1: float, lam2: float) -> Callable[[float], np.ndarray]:
    """diag(l1, l2, 1/l1, 1/l2) to diag(2, 2, 1/2, 1/2), then as a loxodromic block to -I."""
    first, second = _hyperbolic_move(lam1, 2.0), _hyperbolic_move(lam2, 2.0)
    rest = _loxodromic_move(2.0, 0.0)

    def move(s: float) -> np.ndarray:
        if s <= 1 / 3:
            a, b = first(3 * s), second(3 * s)
            return _two_dof(np.diag([a[0, 0], b[0, 0]]))
        return rest((3 * s - 1) / 2)

    return move


def _symplectic_gram_schmidt(vectors: List[np.ndarray]) -> Tuple[List[np.ndarray], List[np.ndarray]]:
    es, fs = [], []
    vectors = list(vectors)
    while vectors:
        a = vectors.pop(0)
        if not vectors:
            raise PathExtensionFailed("odd-dimensional invariant subspace")
        k = int(np.argmax([abs(_omega(a, v)) for v in vectors]))
        b = vectors.pop(k)
        w = _omega(a, b)
        if abs(w) < 1e-12:
            raise PathExtensionFailed("invariant subspace is not symplectic")
        b = b / w
        vectors = [v - _omega(v, b) * a + _omega(v, a) * b for v in vectors]
        es.append(a)
        fs.append(b)
    return es, fs


def _normal_form_blocks(S: np.ndarray) -> List[_Block]:
    """Invariant symplectic pieces of S with symplectic bases and moves to the base forms."""
    dim = S.shape[0]
    scale = max(1.0, np.linalg.norm(S, 2))
    delta = 1e-6 * scale
    values, vectors = np.linalg.eig(S)

    def partner(target: complex) -> int:
        return int(np.argmin(np.abs(values - target)))

    minus, blocks, positives = [], [], []
    for i, lam in enumerate(values):
        v = vectors[:, i]
        if abs(lam + 1) < delta:
            minus.extend([v.real, v.imag])
        elif lam.imag > delta and abs(abs(lam) - 1) < delta:
            a, b = v.real, v.imag
            w = _omega(a, b)
            phi = float(np.angle(lam))
            if w < 0:
                a, b, w, phi = b, a, -w, -phi
            root = np.sqrt(w)
            blocks.append(_Block("elliptic", 1, (a / root)[:, None], (b / root)[:, None], _elliptic_move(phi)))
        elif lam.imag > delta and abs(lam) > 1:
            u = vectors[:, partner(1 / lam)]
            E = np.column_stack([v.real, v.imag])
            F = np.column_stack([u.real, u.imag])
            gram = E.T @ standard_J(dim // 2) @ F
            F = F @ np.linalg.inv(gram)
            blocks.append(_Block("loxodromic", 2, E, F, _loxodromic_move(abs(lam), float(np.angle(lam)))))
        elif abs(lam.imag) <= delta and abs(lam) > 1:
            e = v.real
            f = vectors[:, partner(1 / lam.real)].real
            w = _omega(e, f)
            if abs(w) < 1e-12:
                raise PathExtensionFailed("hyperbolic eigenvectors are not paired")
            if lam.real > 0:
                positives.append((float(lam.real), e, f / w))
            else:
                blocks.append(_Block("hyperbolic", 1, e[:, None], (f / w)[:, None], _hyperbolic_move(lam.real, -1.0)))

    out: List[_Block] = []
    if len(positives) % 2:
        lam, e, f = positives.pop()
        out.append(_Block("positive", 1, e[:, None], f[:, None], _hyperbolic_move(lam, 2.0)))
    for (l1, e1, f1), (l2, e2, f2) in zip(positives[::2], positives[1::2]):
        out.append(
            _Block("positive_pair", 2, np.column_stack([e1, e2]), np.column_stack([f1, f2]), _positive_pair_move(l1, l2))
        )
    out.extend(blocks)
    if minus:
        basis, s, _ = np.linalg.svd(np.column_stack(minus), full_matrices=False)
        rank = int(np.sum(s > 1e-8 * s[0]))
        es, fs = _symplectic_gram_schmidt([basis[:, k] for k in range(rank)])
        m = len(es)
        out.append(_Block("minus_identity", m, np.column_stack(es), np.column_stack(fs), lambda s, m=m: -np.eye(2 * m)))
    return out


def _assemble(blocks: List[_Block], s: float) -> np.ndarray:
    total = blocks[0].move(s)
    for block in blocks[1:]:
        total = direct_sum(total, block.move(s))
    return total


def connector_basepoint(n: int, component: SpClass) -> np.ndarray:
    """S+ = -I; S- = diag(L, L^-1) with L = diag(2, -1, ..., -1)."""
    if component == SpClass.SP_PLUS:
        return -np.eye(2 * n)
    L = np.diag([2.0] + [-1.0] * (n - 1))
    return np.block([[L, np.zeros((n, n))], [np.zeros((n, n)), np.linalg.inv(L)]])


def _stage_angle(
    fn: Callable[[float], np.ndarray], component: SpClass, label: str, tol: Settings
) -> Tuple[float, np.ndarray, np.ndarray]:
    """Lifted change of arg det u along fn on [0, 1], checking fn stays in `component`."""
    grid = np.linspace(0.0, 1.0, tol.INITIAL_PATH_SAMPLES + 1)
    angle = lift_determinant(lambda s: polar_unitary(fn(s), tol).entries, grid)
    for s in angle.times:
        if sp_class(fn(float(s)), tol) != component:
            raise PathExtensionFailed(f"{label} leaves {component.value} at s={s:.4g}")
    return angle.total, polar_unitary(fn(0.0), tol).entries, polar_unitary(fn(1.0), tol).entries


def _normal_form_basis(S: np.ndarray, component: SpClass) -> Tuple[np.ndarray, List[_Block]]:
    """Symplectic Q with Q^-1 S Q in normal form, and the blocks of that form."""
    n = S.shape[0] // 2
    try:
        blocks = _normal_form_blocks(S)
        E = np.column_stack([b.e for b in blocks])
        F = np.column_stack([b.f for b in blocks])
    except (np.linalg.LinAlgError, ValueError) as e:
        raise PathExtensionFailed(f"normal form: {e}") from e
    Q = np.hstack([E, F])
    if Q.shape != (2 * n, 2 * n) or symplectic_residual(Q) > 1e-6:
        raise PathExtensionFailed("could not build a symplectic normal-form basis")
    conjugated = symplectic_inverse(Q) @ S @ Q
    if np.max(np.abs(conjugated - _assemble(blocks, 0.0))) > 1e-6 * max(1.0, np.linalg.norm(S, 2)):
        raise PathExtensionFailed("normal form does not match the endpoint")
    if not np.allclose(_assemble(blocks, 1.0), connector_basepoint(n, component), atol=1e-9):
        raise PathExtensionFailed("connector does not reach the base point")
    return Q, blocks


def _split_spectrum(
    S: np.ndarray, component: SpClass, attempts: int = 4
) -> Tuple[Callable[[float], np.ndarray], np.ndarray, np.ndarray, List[_Block]]:
    """
    A short segment s -> S exp(s eps JH) inside the component of S ending at a
    matrix with simple spectrum. eps keeps the segment within a tenth of the
    smallest singular value of S - I. Seeded, so the result is reproducible.
    """
    n = S.shape[0] // 2
    J = standard_J(n)
    margin = float(np.linalg.svd(S - np.eye(2 * n), compute_uv=False)[-1])
    eps = min(1e-3, 0.1 * margin / max(1.0, np.linalg.norm(S, 2)))
    rng = np.random.default_rng(0)
    for _ in range(attempts):
        A = rng.normal(size=(2 * n, 2 * n))
        H = (A + A.T) / 2
        step = eps * J @ H / np.linalg.norm(H, 2)

        def segment(s: float, step=step) -> np.ndarray:
            return S @ linalg.expm(s * step)

        target = segment(1.0)
        try:
            Q, blocks = _normal_form_basis(target, component)
        except PathExtensionFailed:
            continue
        return segment, target, Q, blocks
    raise PathExtensionFailed("no nearby endpoint with a usable normal form")


def cz_winding_oracle(path: SymplecticPath, tolerances: Optional[Settings] = None) -> int:
    """
    Classical Conley-Zehnder index: degree of rho^2 along the path followed by
    a connector inside Sp+ or Sp- to the base point -I or diag(L, L^-1).
    The connector conjugates S to its symplectic normal form, then moves each
    block to its base form without letting 1 become an eigenvalue. Repeated
    eigenvalues and Jordan blocks are first split by a short segment that
    stays in the component.
    """
    tol = tolerances or settings
    S = path.endpoint
    _require_nondegenerate(S, "S", tol)
    component = sp_class(S, tol)

    stages: List[Tuple[Callable[[float], np.ndarray], str]] = []
    target = S
    try:
        Q, blocks = _normal_form_basis(S, component)
    except PathExtensionFailed as e:
        logger.debug("splitting the spectrum of the endpoint: %s", e)
        segment, target, Q, blocks = _split_spectrum(S, component)
        stages.append((segment, "spectrum split"))

    def conjugation(s: float, target=target) -> np.ndarray:
        G = geodesic_power(Q, s)
        return symplectic_inverse(G) @ target @ G

    stages.append((conjugation, "conjugation"))
    stages.append((lambda s: _assemble(blocks, s), "normal-form move"))

    along_path = rho_angle(path).total
    connector = 0.0
    previous = polar_unitary(S, tol).entries
    for fn, label in stages:
        angle, start, end = _stage_angle(fn, component, label, tol)
        connector += angle + float(np.sum(step_angles(previous, start)))
        previous = end
    logger.debug("winding oracle: path %.4f, connector %.4f", along_path, connector)
    return as_integer((along_path + connector) / np.pi, "Conley-Zehnder winding", tol)
