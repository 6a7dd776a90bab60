"""
Symplectic paths t -> S_t from the identity and the named generators that build them.

A path is sampled until every step between consecutive unitary parts
agrees with its four quarters, each turning by less than pi/4. Generators keep their closure so later lifts of
derived paths (S_t l, graphs in the doubled space) can bisect further.
"""
import logging
from enum import Enum
from typing import Any, Callable, Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from src.config import Settings, settings
from src.errors import NotSymplectic, SchemaError, UnderResolved, UnknownGenerator
from src.models.path import SymplecticPath
from src.tools.maslov import quarter_turns, step_angles
from src.tools.symplinalg import (
    check_symplectic,
    direct_sum,
    geodesic_power,
    polar_unitary,
    rotation,
    standard_J,
    symplectic_inverse,
)

logger = logging.getLogger("paths")

PathFn = Callable[[float], np.ndarray]


def path_from_function(
    fn: PathFn,
    n: int,
    label: str = "path",
    knots: Optional[Sequence[float]] = None,
    tolerances: Optional[Settings] = None,
) -> SymplecticPath:
    """
    Sample fn on [0, 1], bisecting every step whose quarters do not settle
    (see quarter_turns). `knots` are times that must appear among the samples.
    """
    tol = tolerances or settings
    grid = np.linspace(0.0, 1.0, tol.INITIAL_PATH_SAMPLES + 1)
    if knots is not None:
        grid = np.union1d(grid, np.clip(np.asarray(knots, dtype=float), 0.0, 1.0))

    start = check_symplectic(fn(0.0), tol).entries
    if start.shape != (2 * n, 2 * n):
        raise NotSymplectic(f"{label}: expected {2 * n}x{2 * n} matrices, got {start.shape}")
    if np.max(np.abs(start - np.eye(2 * n))) > tol.TOL_SYMPL:
        raise NotSymplectic(f"{label} does not start at the identity")

    def sample(t: float) -> Tuple[np.ndarray, np.ndarray]:
        S = check_symplectic(fn(t), tol).entries
        return S, polar_unitary(S, tol).entries

    times, samples, unitaries = [0.0], [np.eye(2 * n)], [np.eye(n, dtype=complex)]
    max_turn = 0.0
    bisections = 0
    for t_next in grid[1:]:
        pending = [(float(t_next), *sample(float(t_next)), 0)]
        while pending:
            tb, Sb, ub, depth = pending[-1]
            ta = times[-1]
            inner = [sample(ta + (tb - ta) * j / 4) for j in (1, 2, 3)]
            turns = quarter_turns(unitaries[-1], [u for _, u in inner], ub)
            if turns is not None:
                pending.pop()
                times.append(tb)
                samples.append(Sb)
                unitaries.append(ub)
                max_turn = max(max_turn, abs(float(np.sum(turns))))
                continue
            if depth >= tol.MAX_REFINEMENT_DEPTH:
                raise UnderResolved(f"{label} turns too fast near t={tb:.6g}")
            pending.append(((ta + tb) / 2, *inner[1], depth + 1))
            bisections += 1
    if bisections:
        logger.debug("%s: %d bisections, %d samples", label, bisections, len(times))
    return SymplecticPath(
        n=n,
        times=np.array(times),
        samples=np.array(samples),
        generator=fn,
        max_step_rotation=max_turn,
        label=label,
    )


def geodesic_interpolator(times: np.ndarray, samples: np.ndarray) -> PathFn:
    """S_k (S_k^-1 S_{k+1})^s between consecutive samples."""
    steps: Dict[int, np.ndarray] = {}

    def at(t: float) -> np.ndarray:
        k = int(np.clip(np.searchsorted(times, t, side="right") - 1, 0, len(times) - 2))
        if k not in steps:
            steps[k] = symplectic_inverse(samples[k]) @ samples[k + 1]
        s = (t - times[k]) / (times[k + 1] - times[k])
        return samples[k] @ geodesic_power(steps[k], s)

    return at


def path_from_samples(
    times: Sequence[float],
    matrices: Sequence[Any],
    label: str = "samples",
    tolerances: Optional[Settings] = None,
) -> SymplecticPath:
    """An explicit sample list; it must already satisfy the winding bound."""
    tol = tolerances or settings
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) < 2 or len(times) != len(matrices):
        raise SchemaError("need at least two times, one per sample")
    if times[0] != 0.0 or np.any(np.diff(times) <= 0):
        raise SchemaError("times must start at 0 and increase strictly")
    times = times / times[-1]

    samples = np.array([check_symplectic(_as_square(m), tol).entries for m in matrices])
    n = samples.shape[1] // 2
    if np.max(np.abs(samples[0] - np.eye(2 * n))) > tol.TOL_SYMPL:
        raise NotSymplectic(f"{label} does not start at the identity")
    samples[0] = np.eye(2 * n)

    unitaries = [polar_unitary(S, tol).entries for S in samples]
    max_turn = 0.0
    for k in range(len(samples) - 1):
        angles = step_angles(unitaries[k], unitaries[k + 1])
        if np.max(np.abs(angles)) >= np.pi / 2:
            raise UnderResolved(f"{label}: samples {k} and {k + 1} are too far apart")
        max_turn = max(max_turn, abs(float(np.sum(angles))))
    return SymplecticPath(
        n=n,
        times=times,
        samples=samples,
        generator=geodesic_interpolator(times, samples),
        max_step_rotation=max_turn,
        label=label,
    )


def _as_square(m: Any) -> np.ndarray:
    a = np.asarray(m, dtype=float)
    if a.ndim == 1:
        side = int(round(np.sqrt(a.size)))
        if side * side != a.size:
            raise SchemaError(f"{a.size} entries do not form a square matrix")
        a = a.reshape(side, side)
    return a


def _embed(S: np.ndarray, n: int) -> np.ndarray:
    """S (+) I in dimension n."""
    k = S.shape[0] // 2
    return S if k == n else direct_sum(S, np.eye(2 * (n - k)))


# generators

def rotation_path(chi: float, fraction: float = 1.0, n: int = 1, tolerances: Optional[Settings] = None) -> SymplecticPath:
    """t -> exp(chi * fraction * t J_1) (+) I."""
    return path_from_function(
        lambda t: _embed(rotation(chi * fraction * t), n), n, label=f"rotation({chi:g})", tolerances=tolerances
    )


def oscillator_path(
    omega: float, period: Optional[float] = None, reps: int = 1, tolerances: Optional[Settings] = None
) -> SymplecticPath:
    """Flow of H = (omega/2)(p^2 + x^2) over reps periods; period 2 pi/omega unless given."""
    if omega <= 0:
        raise SchemaError("omega must be positive")
    total = (2 * np.pi / omega if period is None else period) * reps
    return path_from_function(lambda t: rotation(omega * total * t), 1, label="oscillator", tolerances=tolerances)


def alpha_power_path(r: int, n: int = 1, tolerances: Optional[Settings] = None) -> SymplecticPath:
    """alpha^r: t -> exp(-2 pi r t J_1) (+) I, the loop with Maslov index 2r."""
    return path_from_function(
        lambda t: _embed(rotation(-2 * np.pi * r * t), n), n, label=f"alpha^{r}", tolerances=tolerances
    )


def half_turn_path(n: int = 1, tolerances: Optional[Settings] = None) -> SymplecticPath:
    """t -> exp(-pi t J), ending at -I."""
    J = standard_J(n)
    return path_from_function(
        lambda t: np.cos(np.pi * t) * np.eye(2 * n) - np.sin(np.pi * t) * J, n, label="half_turn", tolerances=tolerances
    )


def quadratic_flow_path(hamiltonian: Any, duration: float = 1.0, tolerances: Optional[Settings] = None) -> SymplecticPath:
    """t -> exp(t * duration * J H) for a symmetric H."""
    H = _as_square(hamiltonian)
    if H.shape[0] % 2 or np.max(np.abs(H - H.T)) > (tolerances or settings).TOL_SYM * max(1.0, np.max(np.abs(H))):
        raise SchemaError("hamiltonian must be a symmetric 2n x 2n matrix")
    n = H.shape[0] // 2
    generator = duration * standard_J(n) @ (H + H.T) / 2
    return path_from_function(lambda t: linalg.expm(t * generator), n, label="quadratic_flow", tolerances=tolerances)


def direct_sum_path(a: SymplecticPath, b: SymplecticPath, tolerances: Optional[Settings] = None) -> SymplecticPath:
    return path_from_function(
        lambda t: direct_sum(a.at(t), b.at(t)),
        a.n + b.n,
        label=f"{a.label} (+) {b.label}",
        knots=np.union1d(a.times, b.times),
        tolerances=tolerances,
    )


def product_path(a: SymplecticPath, b: SymplecticPath, tolerances: Optional[Settings] = None) -> SymplecticPath:
    """Pointwise product t -> S_t S'_t, the group law on the covering group."""
    if a.n != b.n:
        raise SchemaError(f"cannot multiply paths in dimensions {a.n} and {b.n}")
    return path_from_function(
        lambda t: a.at(t) @ b.at(t),
        a.n,
        label=f"{a.label} * {b.label}",
        knots=np.union1d(a.times, b.times),
        tolerances=tolerances,
    )


def inverse_path(a: SymplecticPath, tolerances: Optional[Settings] = None) -> SymplecticPath:
    return path_from_function(
        lambda t: symplectic_inverse(a.at(t)), a.n, label=f"{a.label}^-1", knots=a.times, tolerances=tolerances
    )


def repeat_path(a: SymplecticPath, r: int, tolerances: Optional[Settings] = None) -> SymplecticPath:
    """The r-fold path: a, then a S, then a S^2, ... ending at S^r."""
    if r < 1:
        raise SchemaError("repetitions must be positive")
    if r == 1:
        return a
    powers = [np.eye(2 * a.n)]
    for _ in range(r - 1):
        powers.append(powers[-1] @ a.endpoint)

    def at(t: float) -> np.ndarray:
        k = min(int(np.floor(r * t)), r - 1)
        return a.at(r * t - k) @ powers[k]

    knots = np.concatenate([(k + a.times) / r for k in range(r)])
    return path_from_function(at, a.n, label=f"{a.label}^{r}", knots=knots, tolerances=tolerances)


def interpolation_path(
    matrices: Sequence[Any], times: Optional[Sequence[float]] = None, tolerances: Optional[Settings] = None
) -> SymplecticPath:
    """Geodesic segments through the given matrices, starting at I."""
    tol = tolerances or settings
    mats = [check_symplectic(_as_square(m), tol).entries for m in matrices]
    if not mats:
        raise SchemaError("matrix_interpolation needs at least one matrix")
    n = mats[0].shape[0] // 2
    if np.max(np.abs(mats[0] - np.eye(2 * n))) > tol.TOL_SYMPL:
        mats.insert(0, np.eye(2 * n))
    if len(mats) == 1:
        mats.append(mats[0])
    knots = np.linspace(0.0, 1.0, len(mats)) if times is None else np.asarray(times, dtype=float)
    if len(knots) != len(mats) or knots[0] != 0.0 or np.any(np.diff(knots) <= 0):
        raise SchemaError("interpolation times must start at 0, increase, and match the matrices")
    knots = knots / knots[-1]
    return path_from_function(
        geodesic_interpolator(knots, np.array(mats)), n, label="matrix_interpolation", knots=knots, tolerances=tol
    )


def _unpack(spec: Any) -> Tuple[str, Dict[str, Any]]:
    if hasattr(spec, "name") and hasattr(spec, "params"):
        name, params = spec.name, dict(spec.params)
    elif isinstance(spec, Mapping):
        name = spec.get("name")
        params = dict(spec.get("params") or {k: v for k, v in spec.items() if k != "name"})
    else:
        raise SchemaError(f"not a generator spec: {spec!r}")
    if isinstance(name, Enum):
        name = name.value
    return str(name), params


def _oscillator_2d(p: Dict[str, Any], tol: Settings) -> SymplecticPath:
    from src.tools.hamflow import oscillator_monodromy

    return oscillator_monodromy(float(p["wx"]), float(p["wy"]), int(p.get("reps", 1)), tolerances=tol)


GENERATORS: Dict[str, Callable[[Dict[str, Any], Settings], SymplecticPath]] = {
    "rotation": lambda p, tol: rotation_path(
        float(p["chi"]), float(p.get("fraction", 1.0)), int(p.get("n", 1)), tolerances=tol
    ),
    "oscillator": lambda p, tol: oscillator_path(
        float(p["omega"]), p.get("period"), int(p.get("reps", 1)), tolerances=tol
    ),
    "alpha_power": lambda p, tol: alpha_power_path(int(p["r"]), int(p.get("n", 1)), tolerances=tol),
    "half_turn": lambda p, tol: half_turn_path(int(p.get("n", 1)), tolerances=tol),
    "quadratic_flow": lambda p, tol: quadratic_flow_path(
        p["hamiltonian"], float(p.get("duration", 1.0)), tolerances=tol
    ),
    "matrix_interpolation": lambda p, tol: interpolation_path(p["matrices"], p.get("times"), tolerances=tol),
    "direct_sum": lambda p, tol: direct_sum_path(
        symplectic_path_from_generator(p["first"], tol), symplectic_path_from_generator(p["second"], tol), tol
    ),
    "product": lambda p, tol: product_path(
        symplectic_path_from_generator(p["first"], tol), symplectic_path_from_generator(p["second"], tol), tol
    ),
    "inverse": lambda p, tol: inverse_path(symplectic_path_from_generator(p["of"], tol), tol),
    "repeat": lambda p, tol: repeat_path(symplectic_path_from_generator(p["of"], tol), int(p["r"]), tol),
    "oscillator_2d": _oscillator_2d,
}


def symplectic_path_from_generator(spec: Any, tolerances: Optional[Settings] = None) -> SymplecticPath:
    """Build a path from {"name": ..., "params": {...}}; nested specs for direct_sum, product, inverse, repeat."""
    tol = tolerances or settings
    name, params = _unpack(spec)
    builder = GENERATORS.get(name)
    if builder is None:
        raise UnknownGenerator(f"unknown generator: {name}")
    try:
        return builder(params, tol)
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"bad parameters for {name}: {e}") from e
