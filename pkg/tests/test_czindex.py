from fractions import Fraction

import numpy as np
import pytest
from scipy.linalg import expm

from src.environment.instances import InstanceGenerator
from src.errors import DegenerateEndpoint, NotFree
from src.models.matrices import SpClass
from src.tools.czindex import (
    arg_det_class,
    cayley,
    cayley_product,
    cayley_sum_inverse,
    concavity_index,
    connector_basepoint,
    cz_winding_oracle,
    det_factorization_check,
    generating_function,
    nu,
    nu_inverse_check,
    nu_power,
    nu_product,
    nu_via_concavity,
)
from src.tools.paths import (
    alpha_power_path,
    direct_sum_path,
    half_turn_path,
    oscillator_path,
    path_from_function,
    rotation_path,
)
from src.tools.symplinalg import direct_sum, rotation, sp_class, standard_J, symplectic_inverse


def test_cayley_of_hyperbolic_matrix():
    m = cayley(np.diag([2.0, 0.5])).entries
    assert np.allclose(m, [[0.0, -1.5], [-1.5, 0.0]])


def test_cayley_of_rotation():
    chi = 0.6 * np.pi
    assert np.allclose(cayley(rotation(chi)).entries, 0.5 / np.tan(chi / 2) * np.eye(2))


def test_cayley_needs_nondegenerate_matrix():
    with pytest.raises(DegenerateEndpoint):
        cayley(np.eye(2))


def test_cayley_identities():
    gen = InstanceGenerator(41)
    S, S2 = gen.nondegenerate_symplectic(2), gen.nondegenerate_symplectic(2)
    m, m2 = cayley(S).entries, cayley(S2).entries
    assert np.allclose(cayley_sum_inverse(S, S2) @ (m + m2), np.eye(4), atol=1e-7)
    assert np.allclose(cayley_product(S, S2), cayley(S @ S2).entries, atol=1e-7)
    assert np.allclose(cayley(np.linalg.inv(S)).entries, -m, atol=1e-7)
    J = standard_J(2)
    assert np.allclose(np.linalg.inv(np.eye(4) - S), J @ m + 0.5 * np.eye(4), atol=1e-7)


def test_nu_normalization():
    assert nu(half_turn_path()) == 1
    assert nu(half_turn_path(2)) == 2


@pytest.mark.parametrize("r", [-2, -1, 0, 1, 3])
def test_nu_of_alpha_powers(r):
    assert nu(alpha_power_path(r)) == 2 * r


@pytest.mark.parametrize("r", [1, 2, 3, 4, 5])
def test_nu_of_oscillator_loops(r):
    assert nu(oscillator_path(1.0, reps=r)) == -2 * r


def test_nu_of_rotations():
    assert nu(rotation_path(0.6 * np.pi)) == -1
    assert nu(rotation_path(1.6 * np.pi)) == -1
    assert nu(rotation_path(-0.6 * np.pi)) == 1
    assert nu(rotation_path(2.4 * np.pi)) == -3


def test_nu_half_integral_on_odd_kernel():
    path = direct_sum_path(rotation_path(2 * np.pi), half_turn_path())
    assert nu(path) == -1
    shear = path_from_function(lambda t: np.array([[1.0, t], [0.0, 1.0]]), 1, label="shear")
    assert Fraction(nu(shear)).denominator == 2


def test_nu_inverse():
    path = InstanceGenerator(43).nondegenerate_path(2)
    assert nu_inverse_check(path) == -nu(path)


def test_nu_product_formula():
    record = nu_product(rotation_path(0.6 * np.pi), rotation_path(0.7 * np.pi))
    assert record.nu_product == -1
    assert record.half_signature == 1
    assert record.agrees


def test_nu_power_iterated_against_closed_form():
    record = nu_power(rotation_path(0.6 * np.pi), 3)
    assert record.value == record.direct == -1
    assert record.closed_form_agrees

    record = nu_power(rotation_path(0.6 * np.pi), 4)
    assert record.value == record.direct == -3
    assert record.closed_form == -1
    assert not record.closed_form_agrees


def test_nu_power_falls_back_on_degenerate_powers():
    record = nu_power(rotation_path(np.pi), 2)
    assert record.used_fallback
    assert record.value == record.direct == nu(rotation_path(2 * np.pi))


def test_arg_det_class_parity():
    path = InstanceGenerator(47).nondegenerate_path(3)
    value = nu(path)
    S = path.endpoint
    assert (-1) ** (arg_det_class(path) % 2) == np.sign(np.linalg.det(S - np.eye(6)))
    assert arg_det_class(path) == (3 - value) % 4


def test_generating_function_of_J():
    data = generating_function(standard_J(1))
    assert np.allclose(data.w_xx.entries, [[-2.0]])
    assert np.allclose(data.reconstruct(), standard_J(1))
    assert concavity_index(standard_J(1)) == 1
    lhs, rhs = det_factorization_check(standard_J(1))
    assert np.isclose(lhs, 2.0) and np.isclose(rhs, 2.0)


def test_generating_function_needs_free_matrix():
    with pytest.raises(NotFree):
        generating_function(np.diag([2.0, 0.5]))


@pytest.mark.parametrize("chi, inert, expected", [(0.6 * np.pi, 1, -1), (1.6 * np.pi, 0, -1), (-0.6 * np.pi, 0, 1)])
def test_concavity_route_on_rotations(chi, inert, expected):
    record = nu_via_concavity(rotation_path(chi))
    assert record.concavity == inert
    assert record.via_reduced == expected
    assert record.via_signature == expected


def test_concavity_route_on_random_free_paths():
    gen = InstanceGenerator(53)
    for _ in range(5):
        path = gen.free_path(gen.dimension())
        record = nu_via_concavity(path)
        assert record.via_reduced == nu(path)


def test_connector_basepoints():
    assert np.allclose(connector_basepoint(2, SpClass.SP_PLUS), -np.eye(4))
    base = connector_basepoint(2, SpClass.SP_MINUS)
    assert sp_class(base) == SpClass.SP_MINUS
    assert np.allclose(np.diag(base), [2.0, -1.0, 0.5, -1.0])


def test_oracle_on_known_paths():
    assert cz_winding_oracle(half_turn_path()) == 1
    assert cz_winding_oracle(rotation_path(0.6 * np.pi)) == -1
    assert cz_winding_oracle(rotation_path(2.4 * np.pi)) == -3


def test_oracle_on_hyperbolic_endpoint():
    flow = np.diag([np.log(2.0), -np.log(2.0)])
    path = path_from_function(lambda t: expm(t * flow), 1, label="hyperbolic")
    assert cz_winding_oracle(path) == nu(path) == 0


def test_oracle_matches_nu_on_random_paths():
    gen = InstanceGenerator(59)
    for _ in range(6):
        path = gen.nondegenerate_path(gen.dimension())
        assert cz_winding_oracle(path) == nu(path)


@pytest.mark.parametrize("second, expected", [(0.6, -2), (-0.6, 0)])
def test_oracle_on_repeated_eigenvalues(second, expected):
    G = InstanceGenerator(61).symplectic(2)
    G_inv = symplectic_inverse(G)
    path = path_from_function(
        lambda t: G @ direct_sum(rotation(0.6 * np.pi * t), rotation(second * np.pi * t)) @ G_inv, 2, label="repeated"
    )
    assert cz_winding_oracle(path) == nu(path) == expected


def test_oracle_on_sheared_half_turn():
    J = standard_J(1)
    path = path_from_function(
        lambda t: (np.cos(np.pi * t) * np.eye(2) - np.sin(np.pi * t) * J) @ np.array([[1.0, t], [0.0, 1.0]]),
        1,
        label="sheared half turn",
    )
    assert cz_winding_oracle(path) == nu(path) == 1


def test_oracle_on_jordan_blocks():
    def at(t):
        A = np.array([[2.0 ** t, t], [0.0, 2.0 ** t]])
        return np.block([[A, np.zeros((2, 2))], [np.zeros((2, 2)), np.linalg.inv(A).T]])

    path = path_from_function(at, 2, label="jordan")
    assert cz_winding_oracle(path) == nu(path) == 0


def test_oracle_rejects_degenerate_endpoint():
    with pytest.raises(DegenerateEndpoint):
        cz_winding_oracle(alpha_power_path(1))
