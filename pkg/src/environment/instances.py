import logging
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from src.config import Settings, settings
from src.models.path import SymplecticPath
from src.models.plane import LagrangianLift, LagrangianPlane
from src.tools.lagrangian import apply, graph_of_symmetric, plane_from_unitary, plane_x
from src.tools.maslov import lift_plane
from src.tools.paths import path_from_function
from src.tools.symplinalg import realify, standard_J

logger = logging.getLogger("instances")

Seed = Union[int, Sequence[int]]


class InstanceGenerator:
    """
    Seeded source of random symplectic data for the property suites.
    Matrices are products of elementary factors; paths are pointwise
    products of quadratic flows t -> exp(t J H) and a rotation t -> exp(t theta J).
    """

    def __init__(self, seed: Seed = 0, tolerances: Optional[Settings] = None):
        self.rng = np.random.default_rng(seed)
        self.tol = tolerances or settings

    def dimension(self, choices: Sequence[int] = (1, 2, 3)) -> int:
        return int(self.rng.choice(choices))

    def symmetric(self, k: int, scale: float = 1.0) -> np.ndarray:
        a = self.rng.normal(scale=scale, size=(k, k))
        return (a + a.T) / 2

    def unitary(self, n: int) -> np.ndarray:
        z = self.rng.normal(size=(n, n)) + 1j * self.rng.normal(size=(n, n))
        q, r = np.linalg.qr(z)
        return q * (np.diag(r) / np.abs(np.diag(r)))

    def symplectic(self, n: int, scale: float = 0.7) -> np.ndarray:
        eye, zero = np.eye(n), np.zeros((n, n))
        upper = np.block([[eye, self.symmetric(n, scale)], [zero, eye]])
        lower = np.block([[eye, zero], [self.symmetric(n, scale), eye]])
        d = np.exp(self.rng.normal(scale=scale / 2, size=n))
        stretch = np.diag(np.concatenate([d, 1 / d]))
        return realify(self.unitary(n)) @ upper @ stretch @ lower

    def nondegenerate_symplectic(self, n: int, margin: float = 1e-2) -> np.ndarray:
        while True:
            S = self.symplectic(n)
            if self.margin(S) > margin:
                return S

    def plane(self, n: int) -> LagrangianPlane:
        return plane_from_unitary(self.unitary(n))

    def lift(self, n: int, turns: int = 3) -> LagrangianLift:
        return lift_plane(self.plane(n)).shifted(int(self.rng.integers(-turns, turns + 1)))

    def plane_pair(self, n: int, meet: int) -> Tuple[LagrangianPlane, LagrangianPlane]:
        """Two planes whose intersection has dimension `meet`."""
        values = self.rng.uniform(0.5, 2.0, size=n) * self.rng.choice([-1.0, 1.0], size=n)
        values[:meet] = 0.0
        v, _ = np.linalg.qr(self.rng.normal(size=(n, n)))
        A = v @ np.diag(values) @ v.T
        S = self.symplectic(n)
        return apply(S, plane_x(n)), apply(S, graph_of_symmetric(A))

    def planes(self, n: int, count: int, degenerate: bool = False) -> List[LagrangianPlane]:
        """`count` planes; with `degenerate`, the first two meet in a random dimension >= 1."""
        out = [self.plane(n) for _ in range(count)]
        if degenerate and count >= 2:
            out[0], out[1] = self.plane_pair(n, int(self.rng.integers(1, n + 1)))
        return out

    def path(self, n: int, pieces: int = 2, scale: float = 0.8, max_turns: float = 1.5) -> SymplecticPath:
        J = standard_J(n)
        generators = [J @ self.symmetric(2 * n, scale) for _ in range(pieces)]
        theta = float(self.rng.uniform(-max_turns, max_turns) * 2 * np.pi)

        def at(t: float) -> np.ndarray:
            S = np.cos(theta * t) * np.eye(2 * n) + np.sin(theta * t) * J
            for g in generators:
                S = S @ linalg.expm(t * g)
            return S

        return path_from_function(at, n, label="random", tolerances=self.tol)

    def nondegenerate_path(self, n: int, margin: float = 1e-2, **kwargs) -> SymplecticPath:
        while True:
            path = self.path(n, **kwargs)
            if self.margin(path.endpoint) > margin:
                return path

    def free_path(self, n: int, margin: float = 1e-2, **kwargs) -> SymplecticPath:
        """Nondegenerate endpoint with an invertible upper-right block."""
        while True:
            path = self.nondegenerate_path(n, margin, **kwargs)
            S = path.endpoint
            B = S[:n, n:]
            if np.linalg.svd(B, compute_uv=False)[-1] > margin * max(1.0, np.linalg.norm(S, 2)):
                return path

    @staticmethod
    def margin(S: np.ndarray) -> float:
        smallest = np.linalg.svd(S - np.eye(S.shape[0]), compute_uv=False)[-1]
        return float(smallest / max(1.0, np.linalg.norm(S, 2)))
