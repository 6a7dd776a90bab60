"""
Monodromy paths t -> S_t(z0) = Df_t(z0) along periodic orbits.

Quadratic Hamiltonians and the harmonic oscillators have closed forms. Other
Hamiltonians are integrated with fixed-step RK4 on the orbit and its
variational equation dS/dt = J H''(z(t)) S, re-projecting S onto Sp(n)
after every step.
"""
import logging
from typing import Optional, Tuple

import numpy as np
from numpy.polynomial import Polynomial

from src.config import Settings, settings
from src.errors import OrbitNotClosed, SchemaError, SymplecticDriftExceeded, UnderResolved
from src.models.orbit import HamiltonianKind, HamiltonianSpec, PeriodicOrbit
from src.models.path import SymplecticPath
from src.tools.paths import path_from_function, path_from_samples
from src.tools.symplinalg import direct_sum, rotation, standard_J, symplectic_projection

logger = logging.getLogger("hamflow")


class Hamiltonian:
    """Value, gradient and Hessian of the Hamiltonian described by a spec."""

    def __init__(self, spec: HamiltonianSpec):
        self.spec = spec
        self.n = spec.n
        if spec.kind == HamiltonianKind.QUADRATIC:
            self.matrix = np.asarray(spec.matrix, dtype=float)
            self.matrix = (self.matrix + self.matrix.T) / 2
        elif spec.kind == HamiltonianKind.SEPARABLE_POLYNOMIAL:
            self.potential = Polynomial(spec.coefficients)
        else:
            self.coefficients = np.asarray(spec.coefficients, dtype=float)
            self.exponents = np.asarray(spec.exponents, dtype=float)

    def _radial(self, r: float) -> Tuple[float, float, float]:
        """U(r), U'(r), U''(r)."""
        c, e = self.coefficients, self.exponents
        return (
            float(np.sum(c * r ** e)),
            float(np.sum(c * e * r ** (e - 1))),
            float(np.sum(c * e * (e - 1) * r ** (e - 2))),
        )

    def value(self, z: np.ndarray) -> float:
        n = self.n
        if self.spec.kind == HamiltonianKind.QUADRATIC:
            return float(0.5 * z @ self.matrix @ z)
        x, p = z[:n], z[n:]
        kinetic = 0.5 * float(p @ p)
        if self.spec.kind == HamiltonianKind.SEPARABLE_POLYNOMIAL:
            return kinetic + float(np.sum(self.potential(x)))
        return kinetic + self._radial(float(np.linalg.norm(x)))[0]

    def gradient(self, z: np.ndarray) -> np.ndarray:
        n = self.n
        if self.spec.kind == HamiltonianKind.QUADRATIC:
            return self.matrix @ z
        x, p = z[:n], z[n:]
        if self.spec.kind == HamiltonianKind.SEPARABLE_POLYNOMIAL:
            return np.concatenate([self.potential.deriv()(x), p])
        r = float(np.linalg.norm(x))
        if r == 0.0:
            raise ValueError("central potential is not smooth at the origin")
        return np.concatenate([self._radial(r)[1] * x / r, p])

    def hessian(self, z: np.ndarray) -> np.ndarray:
        n = self.n
        if self.spec.kind == HamiltonianKind.QUADRATIC:
            return self.matrix
        x = z[:n]
        out = np.zeros((2 * n, 2 * n))
        out[n:, n:] = np.eye(n)
        if self.spec.kind == HamiltonianKind.SEPARABLE_POLYNOMIAL:
            out[:n, :n] = np.diag(self.potential.deriv(2)(x))
            return out
        r = float(np.linalg.norm(x))
        if r == 0.0:
            raise ValueError("central potential is not smooth at the origin")
        _, d1, d2 = self._radial(r)
        radial = np.outer(x, x) / r ** 2
        out[:n, :n] = d2 * radial + (d1 / r) * (np.eye(n) - radial)
        return out


def oscillator_monodromy(
    wx: float, wy: float, reps: int = 1, axis: str = "x", tolerances: Optional[Settings] = None
) -> SymplecticPath:
    """
    S_t = Sigma_t (+) S~_t over `reps` periods of the libration along `axis`:
    Sigma_t a full turn per period, S~_t turning by chi = 2 pi w_other / w_axis.
    """
    if wx <= 0 or wy <= 0:
        raise SchemaError("frequencies must be positive")
    if reps < 1:
        raise SchemaError("reps must be positive")
    if axis not in ("x", "y"):
        raise SchemaError(f"unknown axis: {axis}")
    w_axis, w_other = (wx, wy) if axis == "x" else (wy, wx)
    chi = 2 * np.pi * w_other / w_axis

    def at(s: float) -> np.ndarray:
        t = reps * s
        return direct_sum(rotation(2 * np.pi * t), rotation(chi * t))

    return path_from_function(at, 2, label=f"oscillator({wx:g}, {wy:g}) x{reps}", tolerances=tolerances)


def gutzwiller_closed_form(wx: float, wy: float, r: int, axis: str = "x") -> int:
    """1 + 2r + 2 floor(r w_other / w_axis); 2r + 2k when that ratio is the integer k."""
    w_axis, w_other = (wx, wy) if axis == "x" else (wy, wx)
    q = r * w_other / w_axis
    k = round(q)
    if abs(q - k) < 1e-9:
        return 2 * r + 2 * int(k)
    return 1 + 2 * r + 2 * int(np.floor(q))


def circular_orbit(spec: HamiltonianSpec, radius: float, tolerances: Optional[Settings] = None) -> PeriodicOrbit:
    """
    Circular orbit of a planar central potential: v^2 / R = U'(R). The exact
    flow turns x and p together at omega = v / R; the closure residual is
    that flow at T against z0.
    """
    tol = tolerances or settings
    if spec.kind != HamiltonianKind.CENTRAL_POTENTIAL or spec.n != 2:
        raise SchemaError("circular orbits need a planar central potential")
    _, force, _ = Hamiltonian(spec)._radial(radius)
    if force <= 0:
        raise OrbitNotClosed(f"potential is not attractive at r={radius}")
    speed = np.sqrt(radius * force)
    z0 = np.array([radius, 0.0, 0.0, speed])
    period = float(2 * np.pi * radius / speed)
    # rotation(-chi) turns the plane counterclockwise by chi
    turn = rotation(-speed / radius * period)
    closed = np.concatenate([turn @ z0[:2], turn @ z0[2:]])
    residual = float(np.linalg.norm(closed - z0))
    if residual > tol.EPS_ORBIT_CLOSED_FORM * max(1.0, float(np.linalg.norm(z0))):
        raise OrbitNotClosed(f"closed-form orbit misses its start by {residual:.3e}")
    return PeriodicOrbit(z0=z0, period=period, closure_residual=residual)


def _rk4_step(H: Hamiltonian, J: np.ndarray, z: np.ndarray, S: np.ndarray, h: float):
    def field(z_, S_):
        return J @ H.gradient(z_), J @ H.hessian(z_) @ S_

    k1z, k1s = field(z, S)
    k2z, k2s = field(z + h / 2 * k1z, S + h / 2 * k1s)
    k3z, k3s = field(z + h / 2 * k2z, S + h / 2 * k2s)
    k4z, k4s = field(z + h * k3z, S + h * k3s)
    return z + h / 6 * (k1z + 2 * k2z + 2 * k3z + k4z), S + h / 6 * (k1s + 2 * k2s + 2 * k3s + k4s)


def integrate_flow(
    H: Hamiltonian, z0: np.ndarray, duration: float, steps: int, tolerances: Optional[Settings] = None
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Times, orbit points and projected monodromy samples on a uniform grid."""
    tol = tolerances or settings
    n = H.n
    J = standard_J(n)
    h = duration / steps
    z = np.asarray(z0, dtype=float)
    S = np.eye(2 * n)
    zs, Ss = [z], [S]
    for k in range(steps):
        z, S = _rk4_step(H, J, z, S, h)
        S, drift = symplectic_projection(S)
        if drift > tol.DRIFT_TOL:
            raise SymplecticDriftExceeded(f"drift {drift:.3e} at step {k + 1}")
        zs.append(z)
        Ss.append(S)
    return np.linspace(0.0, duration, steps + 1), np.array(zs), np.array(Ss)


def energy_drift(H: Hamiltonian, zs: np.ndarray) -> float:
    """max |H(z_t) - H(z_0)| relative to max(1, |H(z_0)|)."""
    values = np.array([H.value(z) for z in zs])
    return float(np.max(np.abs(values - values[0])) / max(1.0, abs(values[0])))


def integrate_monodromy(
    spec: HamiltonianSpec,
    orbit: PeriodicOrbit,
    steps: Optional[int] = None,
    reps: int = 1,
    tolerances: Optional[Settings] = None,
) -> SymplecticPath:
    """
    Monodromy path over `reps` periods. The step count per period starts at
    STEPS_PER_PERIOD and doubles while the samples are too coarse to lift.
    """
    tol = tolerances or settings
    if orbit.closure_residual > tol.EPS_ORBIT_INTEGRATED:
        raise OrbitNotClosed(f"orbit closes only to {orbit.closure_residual:.3e}")
    H = Hamiltonian(spec)
    per_period = steps or tol.STEPS_PER_PERIOD
    for doubling in range(tol.MAX_STEP_DOUBLINGS + 1):
        times, zs, Ss = integrate_flow(H, orbit.z0, orbit.period * reps, per_period * reps, tol)
        closure = float(np.max(np.abs(zs[-1] - zs[0])))
        if closure > tol.EPS_ORBIT_INTEGRATED * max(1.0, float(np.max(np.abs(orbit.z0)))):
            raise OrbitNotClosed(f"integrated orbit misses its start by {closure:.3e}")
        try:
            path = path_from_samples(times, Ss, label=f"{spec.kind.value} orbit", tolerances=tol)
        except UnderResolved:
            if doubling == tol.MAX_STEP_DOUBLINGS:
                raise
            per_period *= 2
            logger.warning("monodromy samples too coarse, retrying with %d steps per period", per_period)
            continue
        logger.debug("integrated %d steps, closure %.2e, energy drift %.2e", len(times) - 1, closure, energy_drift(H, zs))
        return path
    raise UnderResolved("step doubling exhausted")


def origin_shift_monodromy(
    spec: HamiltonianSpec,
    orbit: PeriodicOrbit,
    t_shift: float,
    steps: Optional[int] = None,
    tolerances: Optional[Settings] = None,
) -> SymplecticPath:
    """Monodromy path of the same orbit started from z' = f_{t'}(z0)."""
    tol = tolerances or settings
    if t_shift == 0:
        return integrate_monodromy(spec, orbit, steps, tolerances=tol)
    per_period = steps or tol.STEPS_PER_PERIOD
    shift_steps = max(1, int(round(per_period * abs(t_shift) / orbit.period)))
    _, zs, _ = integrate_flow(Hamiltonian(spec), orbit.z0, t_shift, shift_steps, tol)
    shifted = PeriodicOrbit(z0=zs[-1], period=orbit.period, closure_residual=orbit.closure_residual)
    return integrate_monodromy(spec, shifted, steps, tolerances=tol)
