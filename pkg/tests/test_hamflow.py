from fractions import Fraction

import numpy as np
import pytest
from scipy.linalg import expm

from src.errors import OrbitNotClosed, SchemaError
from src.models.orbit import HamiltonianKind, HamiltonianSpec, PeriodicOrbit
from src.tools.czindex import nu
from src.tools.hamflow import (
    Hamiltonian,
    circular_orbit,
    energy_drift,
    gutzwiller_closed_form,
    integrate_flow,
    integrate_monodromy,
    origin_shift_monodromy,
    oscillator_monodromy,
)
from src.tools.symplinalg import standard_J, symplectic_inverse, symplectic_residual

SQRT2 = float(np.sqrt(2.0))


def resonant_oscillator() -> HamiltonianSpec:
    # frequencies 1 and 2
    return HamiltonianSpec(kind=HamiltonianKind.QUADRATIC, n=2, matrix=np.diag([1.0, 4.0, 1.0, 1.0]).tolist())


def quartic() -> HamiltonianSpec:
    return HamiltonianSpec(kind=HamiltonianKind.CENTRAL_POTENTIAL, n=2, coefficients=[0.25], exponents=[4.0])


@pytest.mark.parametrize("r, expected", [(1, 5), (2, 9), (3, 15), (4, 19), (5, 25), (6, 29)])
def test_oscillator_table(r, expected):
    assert gutzwiller_closed_form(1.0, SQRT2, r) == expected
    assert -nu(oscillator_monodromy(1.0, SQRT2, r)) == expected


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_equal_frequencies(r):
    assert gutzwiller_closed_form(1.0, 1.0, r) == 4 * r
    assert -nu(oscillator_monodromy(1.0, 1.0, r)) == 4 * r


def test_y_axis_swaps_frequencies():
    assert gutzwiller_closed_form(SQRT2, 1.0, 2, axis="y") == gutzwiller_closed_form(1.0, SQRT2, 2)
    assert nu(oscillator_monodromy(SQRT2, 1.0, 2, axis="y")) == -9


def test_oscillator_validation():
    with pytest.raises(SchemaError):
        oscillator_monodromy(0.0, 1.0)
    with pytest.raises(SchemaError):
        oscillator_monodromy(1.0, 1.0, axis="z")


def test_hamiltonian_derivatives():
    H = Hamiltonian(quartic())
    z = np.array([0.6, -0.3, 0.2, 0.1])
    eps = 1e-6
    numeric = np.array([(H.value(z + eps * e) - H.value(z - eps * e)) / (2 * eps) for e in np.eye(4)])
    assert np.allclose(H.gradient(z), numeric, atol=1e-6)
    numeric = np.array([(H.gradient(z + eps * e) - H.gradient(z - eps * e)) / (2 * eps) for e in np.eye(4)])
    assert np.allclose(H.hessian(z), numeric, atol=1e-5)


def test_separable_polynomial_hessian():
    spec = HamiltonianSpec(kind=HamiltonianKind.SEPARABLE_POLYNOMIAL, n=1, coefficients=[0.0, 0.0, 0.5, 0.0, 0.25])
    H = Hamiltonian(spec)
    assert np.allclose(H.hessian(np.array([1.0, 0.0])), np.diag([4.0, 1.0]))


def test_hamiltonian_spec_validation():
    with pytest.raises(ValueError):
        HamiltonianSpec(kind=HamiltonianKind.QUADRATIC, n=1)
    with pytest.raises(ValueError):
        HamiltonianSpec(kind=HamiltonianKind.QUADRATIC, n=1, matrix=[[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        HamiltonianSpec(kind=HamiltonianKind.CENTRAL_POTENTIAL, n=2, coefficients=[1.0])


def test_circular_orbit():
    orbit = circular_orbit(quartic(), 1.0)
    assert np.allclose(orbit.z0, [1.0, 0.0, 0.0, 1.0])
    assert np.isclose(orbit.period, 2 * np.pi)
    assert orbit.closure_residual <= 1e-9
    with pytest.raises(SchemaError):
        circular_orbit(resonant_oscillator(), 1.0)


def test_integrated_flow_stays_symplectic():
    H = Hamiltonian(quartic())
    orbit = circular_orbit(quartic(), 1.0)
    _, zs, Ss = integrate_flow(H, orbit.z0, orbit.period, 1024)
    assert energy_drift(H, zs) < 1e-7
    assert np.max(np.abs(zs[-1] - zs[0])) < 1e-6
    assert max(symplectic_residual(S) for S in Ss) < 1e-10


def test_integrated_oscillator_matches_closed_form():
    orbit = PeriodicOrbit(z0=np.array([1.0, 0.5, 0.0, 0.0]), period=2 * np.pi)
    path = integrate_monodromy(resonant_oscillator(), orbit)
    assert np.allclose(path.endpoint, np.eye(4), atol=1e-8)
    assert nu(path) == nu(oscillator_monodromy(1.0, 2.0)) == -6


def test_open_orbit_is_rejected():
    orbit = PeriodicOrbit(z0=np.array([1.0, 0.0, 0.0, 0.0]), period=np.pi)
    with pytest.raises(OrbitNotClosed):
        integrate_monodromy(resonant_oscillator(), orbit, steps=256)


def test_origin_independence_on_quartic_orbit():
    spec = quartic()
    orbit = circular_orbit(spec, 1.0)
    values = {
        Fraction(nu(origin_shift_monodromy(spec, orbit, fraction * orbit.period)))
        for fraction in (0.0, 1 / 7, 1 / 3, 1 / 2)
    }
    assert len(values) == 1


def test_closed_form_orbit_residual_scales_with_radius():
    for radius in (0.5, 2.0, 3.0):
        orbit = circular_orbit(quartic(), radius)
        assert 0.0 <= orbit.closure_residual <= 1e-9 * max(1.0, float(np.linalg.norm(orbit.z0)))


def test_integrated_quadratic_flow_matches_exponential():
    spec = resonant_oscillator()
    H = Hamiltonian(spec)
    JH = standard_J(2) @ H.matrix
    ts, _, Ss = integrate_flow(H, np.array([1.0, 0.5, 0.0, 0.0]), 2 * np.pi, 2048)
    assert max(float(np.max(np.abs(S - expm(t * JH)))) for t, S in zip(ts, Ss)) < 1e-7

    path = integrate_monodromy(spec, PeriodicOrbit(z0=np.array([1.0, 0.5, 0.0, 0.0]), period=2 * np.pi))
    for s, S in zip(path.times, path.samples):
        assert np.allclose(S, expm(2 * np.pi * s * JH), atol=1e-7)


def test_shifted_origin_monodromy_is_conjugate():
    spec = quartic()
    H = Hamiltonian(spec)
    orbit = circular_orbit(spec, 1.0)
    t_shift = orbit.period / 3
    # same grid origin_shift_monodromy uses to reach z'
    _, _, Ss = integrate_flow(H, orbit.z0, t_shift, round(2048 / 3))
    S_shift = Ss[-1]

    base = integrate_monodromy(spec, orbit).endpoint
    shifted = origin_shift_monodromy(spec, orbit, t_shift).endpoint
    expected = S_shift @ base @ symplectic_inverse(S_shift)
    assert np.allclose(shifted, expected, atol=1e-6)
