import numpy as np
import pytest

from src.environment.instances import InstanceGenerator
from src.errors import BranchCut, NotSymplectic
from src.models.matrices import SpClass
from src.tools.symplinalg import (
    check_symplectic,
    direct_sum,
    geodesic_power,
    inertia,
    kernel_dim,
    polar_factors,
    polar_unitary,
    realify,
    rho,
    rotation,
    signature,
    sp_class,
    standard_J,
    symplectic_inverse,
    symplectic_projection,
    symplectic_residual,
    unitary_log_trace,
)


def test_standard_J():
    J = standard_J(1)
    assert np.array_equal(J, np.array([[0.0, 1.0], [-1.0, 0.0]]))
    assert np.allclose(standard_J(2) @ standard_J(2), -np.eye(4))


def test_check_symplectic_rejects_scaling():
    check_symplectic(rotation(0.3))
    with pytest.raises(NotSymplectic):
        check_symplectic(np.diag([2.0, 1.0]))
    with pytest.raises(NotSymplectic):
        check_symplectic(np.eye(3))


def test_symplectic_inverse():
    S = InstanceGenerator(3).symplectic(2)
    assert np.allclose(symplectic_inverse(S) @ S, np.eye(4))
    assert symplectic_residual(S) < 1e-10


def test_inertia_counts():
    triple = inertia(np.diag([3.0, 0.0, -1.0, 2.0]))
    assert (triple.n_plus, triple.n_zero, triple.n_minus) == (2, 1, 1)
    assert triple.signature == 1
    assert inertia(np.zeros((2, 2))).n_zero == 2


def test_inertia_congruence_invariant():
    gen = InstanceGenerator(7)
    for m in (2, 5, 8):
        A = gen.symmetric(m)
        C = gen.rng.normal(size=(m, m)) + 3 * np.eye(m)
        assert inertia(A) == inertia(C.T @ A @ C)


def test_polar_unitary_of_rotation():
    u = polar_unitary(rotation(0.7)).entries
    assert np.allclose(u, [[np.exp(-0.7j)]])
    assert np.isclose(rho(np.diag([2.0, 0.5])), 1.0)


def test_polar_unitary_of_ill_conditioned_matrix():
    gen = InstanceGenerator(41)
    u1, u2 = gen.unitary(2), gen.unitary(2)
    # (x1, x2, p1, p2): stretch 6000 along x1
    D = np.diag([6000.0, np.exp(0.5), 1 / 6000.0, np.exp(-0.5)])
    S = realify(u1) @ D @ realify(u2)
    assert np.linalg.norm(S, 2) > 5.9e3
    assert np.allclose(polar_unitary(S).entries, u1 @ u2, atol=1e-6)
    P, U = polar_factors(S)
    assert np.allclose(P @ U, S, atol=1e-8)
    assert np.allclose(U.T @ U, np.eye(4), atol=1e-10)
    assert np.all(np.linalg.eigvalsh(P) > 0)


def test_inertia_of_rounding_noise_is_zero():
    assert inertia(1e-17 * np.diag([1.0, -1.0, 1.0])).n_zero == 3
    assert inertia(np.diag([1e-3, -1e-3])).signature == 0
    assert inertia(np.diag([1e-3, -1e-3]), scale=1e-3).n_zero == 0


def test_direct_sum_ordering():
    S = direct_sum(rotation(0.3), np.diag([2.0, 0.5]))
    assert np.allclose(S[np.ix_([0, 2], [0, 2])], rotation(0.3))
    assert np.allclose(S[np.ix_([1, 3], [1, 3])], np.diag([2.0, 0.5]))
    assert symplectic_residual(S) < 1e-12


def test_unitary_log_trace_branch_cut():
    assert np.isclose(unitary_log_trace(np.diag([np.exp(0.4j), np.exp(-0.1j)])), 0.3j)
    with pytest.raises(BranchCut):
        unitary_log_trace(np.array([[-1.0 + 0j]]))


def test_geodesic_power_endpoints():
    D = InstanceGenerator(11).symplectic(2)
    assert np.allclose(geodesic_power(D, 0.0), np.eye(4))
    assert np.allclose(geodesic_power(D, 1.0), D)
    assert symplectic_residual(geodesic_power(D, 0.4)) < 1e-10


def test_symplectic_projection_removes_drift():
    S = rotation(0.5) + 1e-6 * np.array([[1.0, 0.0], [0.0, 0.0]])
    projected, drift = symplectic_projection(S)
    assert drift > 0
    assert symplectic_residual(projected) < 1e-12
    assert np.max(np.abs(projected - S)) < 1e-5


def test_sp_class_and_kernel():
    assert sp_class(np.diag([2.0, 0.5])) == SpClass.SP_MINUS
    assert sp_class(rotation(np.pi / 2)) == SpClass.SP_PLUS
    assert sp_class(np.eye(2)) == SpClass.SP_ZERO
    assert kernel_dim(np.eye(4)) == 4
    assert kernel_dim(direct_sum(np.eye(2), rotation(1.0))) == 2
    assert signature(np.diag([1.0, -1.0])) == 0
