"""
ALM index and the Maslov indices built from it.

Points of the universal covers are represented by lifts: a Lagrangian plane
with a real angle theta, det w = e^{i theta}, carried continuously along a
sampled path. Nothing here decides homotopy classes directly; every index is
read off lifted angles.
"""
import logging
from typing import Callable, Iterator, Optional, Sequence, Tuple

import numpy as np

from src.config import Settings, settings
from src.errors import (
    AuxiliarySearchFailed,
    BranchCut,
    IntegralityViolation,
    NotALoop,
    NotTransversal,
    UnderResolved,
)
from src.models.path import LagrangianPath, LiftedAngle, SymplecticPath
from src.models.plane import LagrangianLift, LagrangianPlane
from src.tools.lagrangian import apply, intersection_dim, plane_from_unitary, wall_kashiwara
from src.tools.symplinalg import polar_unitary, unitary_log_trace

logger = logging.getLogger("maslov")

UnitaryFn = Callable[[float], np.ndarray]


def as_integer(value: float, what: str, tolerances: Optional[Settings] = None) -> int:
    tol = tolerances or settings
    nearest = int(round(value))
    residual = abs(value - nearest)
    if residual > tol.INTEGRALITY_TOL:
        raise IntegralityViolation(what, value, residual)
    return nearest


def step_angles(ua: np.ndarray, ub: np.ndarray) -> np.ndarray:
    """Principal eigen-angles of ub ua^-1 for unitary ua, ub."""
    return np.angle(np.linalg.eigvals(ub @ ua.conj().T))


def quarter_turns(ua: np.ndarray, inner: Sequence[np.ndarray], ub: np.ndarray) -> Optional[np.ndarray]:
    """
    Net turn of each quarter of the step ua -> ub through the three `inner`
    points, or None when a quarter turns by pi/4 or more or the quarters
    do not add up to the direct step.
    """
    chain = [ua, *inner, ub]
    pieces = [step_angles(x, y) for x, y in zip(chain, chain[1:])]
    if max(float(np.max(np.abs(p))) for p in pieces) >= np.pi / 4:
        return None
    direct = step_angles(ua, ub)
    if float(np.max(np.abs(direct))) >= np.pi / 2:
        return None
    turns = np.array([float(np.sum(p)) for p in pieces])
    if abs(float(np.sum(turns)) - float(np.sum(direct))) > 0.5:
        return None
    return turns


def lift_determinant(
    unitary_at: Optional[UnitaryFn],
    times: Sequence[float],
    values: Optional[Sequence[np.ndarray]] = None,
    theta0: Optional[float] = None,
    max_depth: Optional[int] = None,
) -> LiftedAngle:
    """
    Continuous argument of det u_t for a unitary-valued function known at `times`.
    Each step adds the eigen-angles of u_{k+1} u_k^-1. With `unitary_at` a step
    is only taken once its quarters agree with it (see quarter_turns) and is
    bisected otherwise; without it every step must stay below pi/2. Past
    `max_depth`, or without a function to bisect through, UnderResolved is raised.
    """
    depth_limit = settings.MAX_REFINEMENT_DEPTH if max_depth is None else max_depth
    times = [float(t) for t in times]
    if values is None:
        if unitary_at is None:
            raise ValueError("need sample values or a unitary-valued function")
        values = [unitary_at(t) for t in times]
    values = [np.atleast_2d(np.asarray(v, dtype=complex)) for v in values]

    def at(t: float) -> np.ndarray:
        return np.atleast_2d(np.asarray(unitary_at(t), dtype=complex))

    first = complex(np.linalg.det(values[0]))
    theta = float(np.angle(first)) if theta0 is None else float(theta0)
    if abs(np.exp(1j * theta) - first / abs(first)) > 1e-6:
        raise ValueError(f"initial angle {theta} does not match the first sample")

    out_t, out_a = [times[0]], [theta]
    bisections = 0
    for k in range(len(times) - 1):
        stack = [(times[k], values[k], times[k + 1], values[k + 1], 0)]
        while stack:
            ta, ua, tb, ub, depth = stack.pop()
            if unitary_at is None:
                angles = step_angles(ua, ub)
                if np.max(np.abs(angles)) >= np.pi / 2:
                    raise UnderResolved(f"step from t={ta:.6g} to t={tb:.6g} turns by {np.max(np.abs(angles)):.3f} rad")
                theta += float(np.sum(angles))
                out_t.append(tb)
                out_a.append(theta)
                continue
            inner = [at(ta + (tb - ta) * j / 4) for j in (1, 2, 3)]
            turns = quarter_turns(ua, inner, ub)
            if turns is not None:
                theta += float(np.sum(turns))
                out_t.append(tb)
                out_a.append(theta)
                continue
            if depth >= depth_limit:
                raise UnderResolved(f"step from t={ta:.6g} to t={tb:.6g} does not settle under bisection")
            tm = (ta + tb) / 2
            bisections += 1
            stack.append((tm, inner[1], tb, ub, depth + 1))
            stack.append((ta, ua, tm, inner[1], depth + 1))
    if bisections:
        logger.debug("lift needed %d bisections", bisections)
    return LiftedAngle(times=np.array(out_t), angles=np.array(out_a), refinements=bisections)


def lift_plane(plane: LagrangianPlane, theta: Optional[float] = None) -> LagrangianLift:
    """A lift of `plane`; the principal one when theta is omitted."""
    if theta is None:
        theta = float(np.angle(plane.det_w))
    elif abs(np.exp(1j * theta) - plane.det_w) > 1e-8:
        raise ValueError("theta is not an argument of det w")
    return LagrangianLift(plane=plane, theta=theta)


def lagrangian_path_of(path: SymplecticPath, plane: LagrangianPlane) -> LagrangianPath:
    """t -> S_t l."""
    return LagrangianPath(
        times=path.times,
        planes=[apply(S, plane) for S in path.samples],
        plane_at=(lambda t: apply(path.at(t), plane)) if path.generator is not None else None,
    )


def lift_lagrangian_path(lpath: LagrangianPath, theta0: float) -> Tuple[LagrangianLift, LiftedAngle]:
    unitary_at = None
    if lpath.plane_at is not None:
        unitary_at = lambda t: lpath.plane_at(t).souriau_w  # noqa: E731
    angle = lift_determinant(unitary_at, lpath.times, [p.souriau_w for p in lpath.planes], theta0)
    return LagrangianLift(plane=lpath.planes[-1], theta=angle.end), angle


def alm_transversal(
    a: LagrangianLift, b: LagrangianLift, tolerances: Optional[Settings] = None
) -> int:
    """(1/pi) [theta - theta' + i Tr Log(-w w'^-1)] for transversal planes."""
    tol = tolerances or settings
    u = -a.plane.souriau_w @ b.plane.souriau_w.conj().T
    try:
        log_trace = unitary_log_trace(u, tol.EPS_BRANCH)
    except BranchCut as e:
        raise NotTransversal("planes intersect") from e
    value = (a.theta - b.theta + (1j * log_trace).real) / np.pi
    return as_integer(value, "ALM index", tol)


def auxiliary_lifts(n: int, count: int = 64) -> Iterator[LagrangianLift]:
    """Rotations of l_P by pi/(2k+1) in the unitary coordinate, k = 1, 2, ..."""
    for k in range(1, count + 1):
        angle = np.pi / (2 * k + 1)
        plane = plane_from_unitary(np.exp(1j * angle) * np.eye(n))
        yield LagrangianLift(plane=plane, theta=2 * n * angle)


def alm(a: LagrangianLift, b: LagrangianLift, tolerances: Optional[Settings] = None) -> int:
    """
    ALM index of two lifts. Non-transversal pairs go through an auxiliary
    plane l'' transversal to both:
    mu(l, l') = mu(l, l'') - mu(l', l'') + tau(l, l', l'').
    The value is recomputed with a second auxiliary plane and must agree.
    """
    tol = tolerances or settings
    try:
        return alm_transversal(a, b, tol)
    except NotTransversal:
        pass

    values = []
    for aux in auxiliary_lifts(a.n):
        if intersection_dim(a.plane, aux.plane, tol) or intersection_dim(b.plane, aux.plane, tol):
            continue
        try:
            first = alm_transversal(a, aux, tol)
            second = alm_transversal(b, aux, tol)
        except NotTransversal:
            continue
        values.append(first - second + wall_kashiwara(a.plane, b.plane, aux.plane, tol))
        if len(values) == 2:
            break
    if not values:
        raise AuxiliarySearchFailed("no auxiliary plane transversal to both arguments")
    if len(values) == 2 and values[0] != values[1]:
        raise IntegralityViolation("ALM index under change of auxiliary plane", values[0], abs(values[0] - values[1]))
    logger.debug("ALM via auxiliary plane: %d", values[0])
    return values[0]


def relative_maslov(
    path: SymplecticPath, plane: LagrangianPlane, tolerances: Optional[Settings] = None
) -> int:
    """mu_l(S_inf) = mu(S_inf l_inf, l_inf)."""
    base = lift_plane(plane)
    end, _ = lift_lagrangian_path(lagrangian_path_of(path, plane), base.theta)
    return alm(end, base, tolerances)


def reduced_maslov(
    path: SymplecticPath, plane: LagrangianPlane, tolerances: Optional[Settings] = None
) -> int:
    """m_l = 1/2 (mu_l + n + dim(S l & l))."""
    tol = tolerances or settings
    mu = relative_maslov(path, plane, tol)
    total = mu + plane.n + intersection_dim(apply(path.endpoint, plane), plane, tol)
    if total % 2:
        raise IntegralityViolation("reduced Maslov index", total / 2, 0.5)
    return total // 2


def rho_angle(path: SymplecticPath) -> LiftedAngle:
    unitary_at = (lambda t: polar_unitary(path.at(t)).entries) if path.generator is not None else None
    return lift_determinant(unitary_at, path.times, [polar_unitary(S).entries for S in path.samples])


def loop_maslov(path: SymplecticPath, tolerances: Optional[Settings] = None) -> int:
    """Degree of t -> rho(S_t)^2 around a loop; alpha^r gives 2r."""
    tol = tolerances or settings
    gap = float(np.max(np.abs(path.endpoint - path.samples[0])))
    if gap > tol.EPS_ORBIT_INTEGRATED:
        raise NotALoop(f"endpoint differs from the start by {gap:.3e}")
    return as_integer(rho_angle(path).total / np.pi, "loop Maslov index", tol)
