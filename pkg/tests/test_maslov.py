import numpy as np
import pytest

from src.environment.instances import InstanceGenerator
from src.errors import NotALoop
from src.models.plane import LagrangianLift
from src.tools.lagrangian import apply, plane_from_unitary, plane_p, plane_x, wall_kashiwara
from src.tools.maslov import (
    alm,
    alm_transversal,
    lift_plane,
    loop_maslov,
    reduced_maslov,
    relative_maslov,
)
from src.tools.paths import alpha_power_path, half_turn_path, path_from_function, product_path, rotation_path
from src.tools.symplinalg import rotation, symplectic_inverse


def lift_at(phi: float) -> LagrangianLift:
    """The n = 1 plane e^{i phi} l_P with theta = 2 phi."""
    return LagrangianLift(plane=plane_from_unitary([[np.exp(1j * phi)]]), theta=2 * phi)


def test_lift_plane_principal():
    lift = lift_plane(plane_p(2))
    assert np.isclose(lift.theta, 0.0)
    with pytest.raises(ValueError):
        lift_plane(plane_p(1), theta=1.0)


def test_alm_transversal_n1():
    assert alm_transversal(lift_at(0.3), lift_at(0.0)) == 1
    assert alm_transversal(lift_at(0.0), lift_at(0.3)) == -1


def test_alm_of_a_lift_with_itself():
    gen = InstanceGenerator(29)
    a = gen.lift(2)
    assert alm(a, a) == 0
    assert alm(a.shifted(1), a) == 2
    assert alm(a, a.shifted(2)) == -4


def test_alm_cocycle_on_a_triple():
    a, b, c = lift_at(0.0), lift_at(np.pi / 6), lift_at(np.pi / 3)
    assert alm(a, b) + alm(b, c) + alm(c, a) == wall_kashiwara(a.plane, b.plane, c.plane) == -1


def test_alm_degenerate_pair_parity():
    gen = InstanceGenerator(31)
    for meet in (1, 2):
        first, second = gen.plane_pair(2, meet)
        mu = alm(lift_plane(first), lift_plane(second))
        assert (mu - 2 - meet) % 2 == 0
        assert alm(lift_plane(second), lift_plane(first)) == -mu


@pytest.mark.parametrize("r", [-2, -1, 1, 3])
def test_relative_maslov_of_alpha_powers(r):
    assert relative_maslov(alpha_power_path(r), plane_p(1)) == 4 * r
    assert relative_maslov(alpha_power_path(r, n=2), plane_x(2)) == 4 * r


def test_relative_maslov_of_constant_path():
    assert relative_maslov(rotation_path(0.0), plane_x(1)) == 0
    assert reduced_maslov(rotation_path(0.0), plane_x(1)) == 1


def test_reduced_maslov_of_alpha():
    assert reduced_maslov(alpha_power_path(1), plane_x(1)) == 3


@pytest.mark.parametrize("r", [-3, 1, 2])
def test_loop_maslov(r):
    assert loop_maslov(alpha_power_path(r)) == 2 * r
    assert loop_maslov(alpha_power_path(r, n=3)) == 2 * r


def test_loop_maslov_of_oscillator_period():
    # a full turn of exp(tJ) runs against alpha
    assert loop_maslov(rotation_path(2 * np.pi)) == -2


def test_conjugated_loop_with_strong_shear():
    G = np.diag([5.3, 1 / 5.3]) @ rotation(0.3)
    G_inv = symplectic_inverse(G)
    loop = path_from_function(lambda t: G @ rotation(4 * np.pi * t) @ G_inv, 1)
    assert loop_maslov(loop) == -4
    assert relative_maslov(loop, plane_p(1)) == -8
    assert relative_maslov(loop, plane_x(1)) == -8


def test_full_turn_between_grid_points_is_found():
    # the whole turn happens inside one step of the initial grid
    path = path_from_function(lambda t: rotation(2 * np.pi * np.clip((t - 0.5) * 64, 0.0, 1.0)), 1)
    assert len(path) > 65
    assert loop_maslov(path) == -2
    assert relative_maslov(path, plane_x(1)) == -4


def test_loop_maslov_rejects_open_paths():
    with pytest.raises(NotALoop):
        loop_maslov(half_turn_path())


def test_relative_maslov_product_property():
    gen = InstanceGenerator(37)
    first, second = gen.path(2), gen.path(2)
    lag = gen.plane(2)
    S, S2 = first.endpoint, second.endpoint
    expected = (
        relative_maslov(first, lag)
        + relative_maslov(second, lag)
        + wall_kashiwara(lag, apply(S, lag), apply(S @ S2, lag))
    )
    assert relative_maslov(product_path(first, second), lag) == expected
